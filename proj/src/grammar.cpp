#include "nrg/grammar.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace nrg {

namespace {

// All nonterminal ids referenced by a rule, in body order.
template <typename Fn>
void for_each_reference(const Rule& r, Fn&& fn) {
    if (r.is_inner()) {
        for (const auto& e : r.inner().expansions)
            for (Symbol s : e)
                if (s.is_nonterminal()) fn(s.nt_id());
    } else {
        for (Symbol s : r.plain())
            if (s.is_nonterminal()) fn(s.nt_id());
    }
}

// Reverse DFS postorder = topological order of the reference DAG.
// Returns nullopt when a cycle exists.
std::optional<std::vector<int32_t>> topo_order(const Grammar& g) {
    const int32_t n = g.n_rules();
    std::vector<uint8_t> state(static_cast<size_t>(n), 0);  // 0 new, 1 open, 2 done
    std::vector<int32_t> order;
    order.reserve(static_cast<size_t>(n));
    // Explicit stack: (rule, next-reference cursor materialized up front).
    std::vector<std::vector<int32_t>> refs(static_cast<size_t>(n));
    for (int32_t i = 0; i < n; ++i)
        for_each_reference(g.rules[static_cast<size_t>(i)],
                           [&](int32_t x) { refs[static_cast<size_t>(i)].push_back(x); });

    std::vector<std::pair<int32_t, size_t>> stack;
    for (int32_t root = 0; root < n; ++root) {
        if (state[static_cast<size_t>(root)] != 0) continue;
        stack.emplace_back(root, 0);
        state[static_cast<size_t>(root)] = 1;
        while (!stack.empty()) {
            auto& [cur, idx] = stack.back();
            const auto& rs = refs[static_cast<size_t>(cur)];
            if (idx < rs.size()) {
                int32_t nxt = rs[idx++];
                if (nxt < 0 || nxt >= n) continue;  // dangling, reported elsewhere
                uint8_t st = state[static_cast<size_t>(nxt)];
                if (st == 1) return std::nullopt;
                if (st == 0) {
                    state[static_cast<size_t>(nxt)] = 1;
                    stack.emplace_back(nxt, 0);
                }
            } else {
                state[static_cast<size_t>(cur)] = 2;
                order.push_back(cur);
                stack.pop_back();
            }
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

bool body_has_separator(const Rule& r) {
    if (r.is_inner()) {
        for (const auto& e : r.inner().expansions)
            for (Symbol s : e)
                if (s.is_separator()) return true;
        return false;
    }
    for (Symbol s : r.plain())
        if (s.is_separator()) return true;
    return false;
}

}  // namespace

std::string violation_to_string(const Violation& v) {
    const char* k = "";
    switch (v.kind) {
        case Violation::Kind::MissingStart: k = "missing-start"; break;
        case Violation::Kind::EmptyBody: k = "empty-body"; break;
        case Violation::Kind::EmptyExpansion: k = "empty-expansion"; break;
        case Violation::Kind::DanglingReference: k = "dangling-reference"; break;
        case Violation::Kind::Cycle: k = "cycle"; break;
        case Violation::Kind::Unreachable: k = "unreachable"; break;
        case Violation::Kind::InnerRefCount: k = "inner-ref-count"; break;
        case Violation::Kind::MultipleInnerRefs: k = "multiple-inner-refs"; break;
        case Violation::Kind::EmptyAffix: k = "empty-affix"; break;
        case Violation::Kind::ExpansionCount: k = "expansion-count"; break;
        case Violation::Kind::FixedLenMismatch: k = "fixed-len-mismatch"; break;
        case Violation::Kind::SeparatorInBody: k = "separator-in-body"; break;
    }
    return std::string(k) + " at rule " + std::to_string(v.rule) +
           (v.detail.empty() ? "" : (": " + v.detail));
}

std::vector<Violation> validate(const Grammar& g) {
    std::vector<Violation> out;
    const int32_t n = g.n_rules();
    if (n == 0) {
        out.push_back({Violation::Kind::MissingStart, 0, "grammar has no rules"});
        return out;
    }

    bool structure_ok = true;
    for (int32_t i = 0; i < n; ++i) {
        const Rule& r = g.rules[static_cast<size_t>(i)];
        if (body_has_separator(r)) {
            out.push_back({Violation::Kind::SeparatorInBody, i, ""});
            structure_ok = false;
        }
        if (r.is_inner()) {
            const InnerRule& ir = r.inner();
            if (ir.expansions.empty())
                out.push_back({Violation::Kind::EmptyBody, i, "inner rule lists no expansions"});
            for (const auto& e : ir.expansions)
                if (e.empty()) {
                    out.push_back({Violation::Kind::EmptyExpansion, i, ""});
                    break;
                }
            if (ir.fixed_len) {
                if (*ir.fixed_len < 1) {
                    out.push_back({Violation::Kind::FixedLenMismatch, i, "fixed_len < 1"});
                } else {
                    for (const auto& e : ir.expansions) {
                        if (static_cast<int32_t>(e.size()) != *ir.fixed_len) {
                            out.push_back({Violation::Kind::FixedLenMismatch, i,
                                           "expansion length != " + std::to_string(*ir.fixed_len)});
                            break;
                        }
                    }
                }
            }
        } else if (r.plain().empty()) {
            out.push_back({Violation::Kind::EmptyBody, i, ""});
        }
        bool dangling = false;
        for_each_reference(r, [&](int32_t x) {
            if (x < 0 || x >= n) dangling = true;
        });
        if (dangling) {
            out.push_back({Violation::Kind::DanglingReference, i, ""});
            structure_ok = false;
        }
    }
    if (g.rules[0].is_inner()) {
        out.push_back({Violation::Kind::InnerRefCount, 0, "start symbol is an inner rule"});
        structure_ok = false;
    }

    auto topo = topo_order(g);
    if (!topo) {
        // Name one rule on a cycle: any rule still reachable from itself.
        int32_t culprit = 0;
        for (int32_t i = 0; i < n; ++i) {
            std::vector<uint8_t> seen(static_cast<size_t>(n), 0);
            std::vector<int32_t> stack{i};
            bool cyc = false;
            while (!stack.empty() && !cyc) {
                int32_t cur = stack.back();
                stack.pop_back();
                for_each_reference(g.rules[static_cast<size_t>(cur)], [&](int32_t x) {
                    if (x == i) cyc = true;
                    if (x >= 0 && x < n && !seen[static_cast<size_t>(x)]) {
                        seen[static_cast<size_t>(x)] = 1;
                        stack.push_back(x);
                    }
                });
            }
            if (cyc) {
                culprit = i;
                break;
            }
        }
        out.push_back({Violation::Kind::Cycle, culprit, ""});
        return out;  // most downstream checks are meaningless on cyclic input
    }
    if (!structure_ok) return out;

    // Reachability from the start symbol.
    std::vector<uint8_t> reach(static_cast<size_t>(n), 0);
    {
        std::vector<int32_t> stack{0};
        reach[0] = 1;
        while (!stack.empty()) {
            int32_t cur = stack.back();
            stack.pop_back();
            for_each_reference(g.rules[static_cast<size_t>(cur)], [&](int32_t x) {
                if (!reach[static_cast<size_t>(x)]) {
                    reach[static_cast<size_t>(x)] = 1;
                    stack.push_back(x);
                }
            });
        }
        for (int32_t i = 0; i < n; ++i)
            if (!reach[static_cast<size_t>(i)])
                out.push_back({Violation::Kind::Unreachable, i, ""});
    }

    // Inner pairing: each inner nonterminal occurs exactly once, in a plain
    // body, with non-empty prefix and suffix around it; a plain body holds at
    // most one inner reference.
    std::vector<int32_t> inner_refs_from_plain(static_cast<size_t>(n), 0);
    std::vector<int32_t> inner_refs_from_inner(static_cast<size_t>(n), 0);
    for (int32_t i = 0; i < n; ++i) {
        const Rule& r = g.rules[static_cast<size_t>(i)];
        if (r.is_inner()) {
            for (const auto& e : r.inner().expansions)
                for (Symbol s : e)
                    if (s.is_nonterminal() && g.rules[static_cast<size_t>(s.nt_id())].is_inner())
                        ++inner_refs_from_inner[static_cast<size_t>(s.nt_id())];
            continue;
        }
        int32_t inner_here = 0;
        size_t inner_pos = 0;
        const SymbolSeq& body = r.plain();
        for (size_t j = 0; j < body.size(); ++j) {
            Symbol s = body[j];
            if (s.is_nonterminal() && g.rules[static_cast<size_t>(s.nt_id())].is_inner()) {
                ++inner_here;
                inner_pos = j;
                ++inner_refs_from_plain[static_cast<size_t>(s.nt_id())];
            }
        }
        if (inner_here > 1) out.push_back({Violation::Kind::MultipleInnerRefs, i, ""});
        if (inner_here == 1 && (inner_pos == 0 || inner_pos + 1 == body.size()))
            out.push_back({Violation::Kind::EmptyAffix, i, ""});
    }
    for (int32_t i = 0; i < n; ++i) {
        if (!g.rules[static_cast<size_t>(i)].is_inner()) continue;
        int32_t refs = inner_refs_from_plain[static_cast<size_t>(i)];
        if (inner_refs_from_inner[static_cast<size_t>(i)] > 0)
            out.push_back({Violation::Kind::InnerRefCount, i, "referenced from an expansion list"});
        else if (refs != 1)
            out.push_back({Violation::Kind::InnerRefCount, i,
                           "referenced " + std::to_string(refs) + " times"});
    }
    if (!out.empty()) return out;

    // Expansion-list lengths must match how often each inner is derived.
    std::vector<int64_t> d = derivation_counts(g);
    for (int32_t i = 0; i < n; ++i) {
        const Rule& r = g.rules[static_cast<size_t>(i)];
        if (!r.is_inner()) continue;
        int64_t want = d[static_cast<size_t>(i)];
        int64_t have = static_cast<int64_t>(r.inner().expansions.size());
        if (want != have)
            out.push_back({Violation::Kind::ExpansionCount, i,
                           "listed " + std::to_string(have) + ", derived " + std::to_string(want)});
    }
    return out;
}

std::vector<int32_t> depths(const Grammar& g) {
    auto topo = topo_order(g);
    if (!topo) throw std::invalid_argument("depths: grammar is recursive");
    const int32_t n = g.n_rules();
    std::vector<int32_t> d(static_cast<size_t>(n), 0);
    for (int32_t id : *topo) {
        for_each_reference(g.rules[static_cast<size_t>(id)], [&](int32_t x) {
            if (x >= 0 && x < n)
                d[static_cast<size_t>(x)] =
                    std::max(d[static_cast<size_t>(x)], d[static_cast<size_t>(id)] + 1);
        });
    }
    return d;
}

int32_t depth(const Grammar& g, int32_t nonterminal) {
    if (nonterminal < 0 || nonterminal >= g.n_rules())
        throw std::out_of_range("depth: unknown nonterminal id " + std::to_string(nonterminal));
    return depths(g)[static_cast<size_t>(nonterminal)];
}

std::vector<int64_t> derivation_counts(const Grammar& g) {
    auto topo = topo_order(g);
    if (!topo) throw std::invalid_argument("derivation_counts: grammar is recursive");
    const int32_t n = g.n_rules();
    std::vector<int64_t> d(static_cast<size_t>(n), 0);
    d[0] = 1;
    for (int32_t id : *topo) {
        const Rule& r = g.rules[static_cast<size_t>(id)];
        if (r.is_inner()) {
            for (const auto& e : r.inner().expansions)
                for (Symbol s : e)
                    if (s.is_nonterminal()) d[static_cast<size_t>(s.nt_id())] += 1;
        } else {
            int64_t mult = d[static_cast<size_t>(id)];
            for (Symbol s : r.plain())
                if (s.is_nonterminal()) d[static_cast<size_t>(s.nt_id())] += mult;
        }
    }
    return d;
}

bool is_straight_line(const Grammar& g) {
    for (const Rule& r : g.rules)
        if (r.is_inner()) return false;
    return true;
}

std::optional<BranchingView> branching(const Grammar& g, int32_t outer_id) {
    if (outer_id < 0 || outer_id >= g.n_rules()) return std::nullopt;
    const Rule& r = g.rules[static_cast<size_t>(outer_id)];
    if (r.is_inner()) return std::nullopt;
    const SymbolSeq& body = r.plain();
    for (size_t j = 0; j < body.size(); ++j) {
        Symbol s = body[j];
        if (s.is_nonterminal() && g.rules[static_cast<size_t>(s.nt_id())].is_inner()) {
            BranchingView v;
            v.outer = outer_id;
            v.inner = s.nt_id();
            v.prefix = std::span<const Symbol>(body.data(), j);
            v.suffix = std::span<const Symbol>(body.data() + j + 1, body.size() - j - 1);
            return v;
        }
    }
    return std::nullopt;
}

std::vector<int32_t> emission_order(const Grammar& g) {
    const int32_t n = g.n_rules();
    std::vector<int32_t> dep = depths(g);

    // Map each inner rule to its outer.
    std::vector<int32_t> inner_of(static_cast<size_t>(n), -1);
    for (int32_t i = 0; i < n; ++i) {
        auto b = branching(g, i);
        if (b) inner_of[static_cast<size_t>(i)] = b->inner;
    }

    std::vector<int32_t> plain_ids;
    for (int32_t i = 0; i < n; ++i)
        if (!g.rules[static_cast<size_t>(i)].is_inner()) plain_ids.push_back(i);
    std::stable_sort(plain_ids.begin(), plain_ids.end(), [&](int32_t a, int32_t b) {
        if (dep[static_cast<size_t>(a)] != dep[static_cast<size_t>(b)])
            return dep[static_cast<size_t>(a)] < dep[static_cast<size_t>(b)];
        return a < b;
    });

    std::vector<int32_t> order;
    order.reserve(static_cast<size_t>(n));
    for (int32_t id : plain_ids) {
        order.push_back(id);
        int32_t in = inner_of[static_cast<size_t>(id)];
        if (in >= 0) order.push_back(in);
    }
    return order;
}

Grammar canonicalized(const Grammar& g) {
    std::vector<int32_t> order = emission_order(g);
    const int32_t n = g.n_rules();
    std::vector<int32_t> new_id(static_cast<size_t>(n), -1);
    for (int32_t pos = 0; pos < static_cast<int32_t>(order.size()); ++pos)
        new_id[static_cast<size_t>(order[static_cast<size_t>(pos)])] = pos;

    auto remap_seq = [&](const SymbolSeq& in) {
        SymbolSeq out;
        out.reserve(in.size());
        for (Symbol s : in)
            out.push_back(s.is_nonterminal()
                              ? Symbol::nonterminal(new_id[static_cast<size_t>(s.nt_id())])
                              : s);
        return out;
    };

    Grammar out;
    out.mode = g.mode;
    out.tokens = g.tokens;
    out.rules.resize(static_cast<size_t>(n));
    for (int32_t old = 0; old < n; ++old) {
        const Rule& r = g.rules[static_cast<size_t>(old)];
        Rule nr;
        if (r.is_inner()) {
            InnerRule ir;
            ir.fixed_len = r.inner().fixed_len;
            for (const auto& e : r.inner().expansions) ir.expansions.push_back(remap_seq(e));
            nr = Rule::make_inner(std::move(ir.expansions), ir.fixed_len);
        } else {
            nr = Rule::make_plain(remap_seq(r.plain()));
        }
        out.rules[static_cast<size_t>(new_id[static_cast<size_t>(old)])] = std::move(nr);
    }
    return out;
}

namespace {

class CanonicalResolver : public ChoiceResolver {
public:
    explicit CanonicalResolver(const Grammar& g)
        : g_(g), next_(static_cast<size_t>(g.n_rules()), 0) {}

    size_t next(int32_t inner_id) override {
        size_t& c = next_[static_cast<size_t>(inner_id)];
        return c++;
    }

    void check_fully_consumed() const {
        for (int32_t i = 0; i < g_.n_rules(); ++i) {
            const Rule& r = g_.rules[static_cast<size_t>(i)];
            if (!r.is_inner()) continue;
            if (next_[static_cast<size_t>(i)] != r.inner().expansions.size())
                throw std::invalid_argument(
                    "expand: expansion list of rule " + std::to_string(i) +
                    " consumed " + std::to_string(next_[static_cast<size_t>(i)]) + "/" +
                    std::to_string(r.inner().expansions.size()) + " entries");
        }
    }

private:
    const Grammar& g_;
    std::vector<size_t> next_;
};

class PermutedResolver : public ChoiceResolver {
public:
    PermutedResolver(const Grammar& g, const std::vector<std::vector<size_t>>& order)
        : order_(order), cursor_(order.size(), 0) {
        (void)g;
    }

    size_t next(int32_t inner_id) override {
        auto id = static_cast<size_t>(inner_id);
        if (id >= order_.size() || cursor_[id] >= order_[id].size())
            throw std::invalid_argument("expand: resolver exhausted for rule " +
                                        std::to_string(inner_id));
        return order_[id][cursor_[id]++];
    }

private:
    const std::vector<std::vector<size_t>>& order_;
    std::vector<size_t> cursor_;
};

}  // namespace

SymbolSeq expand(const Grammar& g, ChoiceResolver& resolver) {
    if (g.n_rules() == 0) throw std::invalid_argument("expand: empty grammar");
    SymbolSeq out;

    struct Frame {
        const SymbolSeq* seq;
        size_t idx;
    };
    std::vector<Frame> stack;
    auto enter = [&](int32_t id) {
        const Rule& r = g.rules.at(static_cast<size_t>(id));
        if (r.is_inner()) {
            size_t which = resolver.next(id);
            const auto& exps = r.inner().expansions;
            if (which >= exps.size())
                throw std::invalid_argument("expand: expansion index out of range for rule " +
                                            std::to_string(id));
            stack.push_back({&exps[which], 0});
        } else {
            stack.push_back({&r.plain(), 0});
        }
    };
    enter(0);
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.idx >= f.seq->size()) {
            stack.pop_back();
            continue;
        }
        Symbol s = (*f.seq)[f.idx++];
        if (s.is_terminal()) {
            out.push_back(s);
        } else if (s.is_nonterminal()) {
            enter(s.nt_id());
        } else {
            throw std::invalid_argument("expand: separator symbol inside rule body");
        }
    }
    return out;
}

SymbolSeq expand(const Grammar& g) {
    CanonicalResolver r(g);
    SymbolSeq s = expand(g, r);
    r.check_fully_consumed();
    return s;
}

SymbolSeq expand_permuted(const Grammar& g, const std::vector<std::vector<size_t>>& order) {
    PermutedResolver r(g, order);
    return expand(g, r);
}

SizeReport size(const Grammar& g, Encoding enc) {
    SizeReport rep;
    for (int32_t i = 0; i < g.n_rules(); ++i) {
        const Rule& r = g.rules[static_cast<size_t>(i)];
        if (!r.is_inner()) {
            rep.rule_symbols += static_cast<int64_t>(r.plain().size()) + 1;
            continue;
        }
        const InnerRule& ir = r.inner();
        const int64_t m = static_cast<int64_t>(ir.expansions.size());
        int64_t total_syms = 0;
        for (const auto& e : ir.expansions) total_syms += static_cast<int64_t>(e.size());

        // Distinct expansions, for the disambiguation-cost split.
        std::map<SymbolSeq, int, bool (*)(const SymbolSeq&, const SymbolSeq&)> distinct(seq_less);
        int64_t distinct_syms = 0;
        for (const auto& e : ir.expansions)
            if (distinct.emplace(e, 1).second) distinct_syms += static_cast<int64_t>(e.size());
        const int64_t u = static_cast<int64_t>(distinct.size());

        if (enc == Encoding::Fixed) {
            if (!ir.fixed_len)
                throw std::invalid_argument(
                    "size: fixed encoding requested but rule " + std::to_string(i) +
                    " has variable-length expansions");
            const int64_t k = *ir.fixed_len;
            // First expansion, one choice separator declaring k, then the
            // remaining expansions back to back; self-delimiting, no closing
            // rule separator.
            rep.branching_overhead += k * m + 1;
            rep.cost_s += k * (m - u);
        } else {
            // Expansions joined by choice separators, closed by a rule
            // separator.
            rep.branching_overhead += total_syms + m;
            rep.cost_s += (total_syms - distinct_syms) + (m - u);
        }
    }
    rep.total = rep.rule_symbols + rep.branching_overhead;
    return rep;
}

}  // namespace nrg
