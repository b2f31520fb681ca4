#include "nrg/motif.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "nrg/encoder.hpp"
#include "nrg/repeat_index.hpp"

namespace nrg {

namespace {

// The bodies motifs may rewrite: plain rules derived exactly once, reached
// through plain references (never through an expansion list). Each body
// position carries a derivation timestamp so realizations across nested
// once-derived rules order the expansion list the way a leftmost derivation
// consumes it.
struct MotifSpace {
    std::vector<int32_t> rule_ids;    // in first-visit order
    std::vector<uint8_t> searchable;  // per rule id
    // Per rule: (start offset, timestamp of that offset), sorted by offset.
    std::vector<std::vector<std::pair<int32_t, int64_t>>> segs;
    int64_t total_len = 0;

    int64_t time(int32_t rule, int32_t offset) const {
        const auto& v = segs[static_cast<size_t>(rule)];
        auto it = std::upper_bound(v.begin(), v.end(),
                                   std::make_pair(offset, INT64_MAX));
        --it;
        return it->second + (offset - it->first);
    }
};

MotifSpace build_space(const Grammar& g) {
    MotifSpace sp;
    sp.searchable.assign(static_cast<size_t>(g.n_rules()), 0);
    sp.segs.resize(static_cast<size_t>(g.n_rules()));
    if (g.rules.empty() || g.rules[0].is_inner()) return sp;
    std::vector<int64_t> d = derivation_counts(g);

    struct Frame {
        int32_t rule;
        int32_t idx;
    };
    std::vector<Frame> stack;
    int64_t t = 0;
    auto open = [&](int32_t r) {
        sp.rule_ids.push_back(r);
        sp.searchable[static_cast<size_t>(r)] = 1;
        sp.total_len += static_cast<int64_t>(g.rules[static_cast<size_t>(r)].plain().size());
        sp.segs[static_cast<size_t>(r)].push_back({0, t});
        stack.push_back({r, 0});
    };
    open(0);
    while (!stack.empty()) {
        Frame& f = stack.back();
        const SymbolSeq& body = g.rules[static_cast<size_t>(f.rule)].plain();
        if (f.idx >= static_cast<int32_t>(body.size())) {
            stack.pop_back();
            if (!stack.empty()) {
                Frame& parent = stack.back();
                sp.segs[static_cast<size_t>(parent.rule)].push_back({parent.idx, t});
            }
            continue;
        }
        Symbol s = body[static_cast<size_t>(f.idx)];
        ++f.idx;
        ++t;
        if (s.is_nonterminal()) {
            int32_t x = s.nt_id();
            const Rule& rx = g.rules[static_cast<size_t>(x)];
            if (!rx.is_inner() && d[static_cast<size_t>(x)] == 1 &&
                !sp.searchable[static_cast<size_t>(x)])
                open(x);
        }
    }
    return sp;
}

bool matches_at(const SymbolSeq& body, size_t at, const SymbolSeq& w) {
    if (at + w.size() > body.size()) return false;
    return std::equal(w.begin(), w.end(), body.begin() + static_cast<std::ptrdiff_t>(at));
}

bool gap_clean(const Grammar& g, const SymbolSeq& body, size_t from, size_t len) {
    for (size_t i = from; i < from + len; ++i) {
        Symbol s = body[i];
        if (s.is_nonterminal() && g.rules[static_cast<size_t>(s.nt_id())].is_inner())
            return false;
    }
    return true;
}

struct TimedRealization {
    int64_t time;
    Realization where;
    int32_t gap_len;
};

// Leftmost-greedy realizations of (u, gap, v) over the space, in derivation
// order. Variable gaps take the shortest clean gap per match.
std::vector<TimedRealization> collect_realizations(const Grammar& g, const MotifSpace& sp,
                                                   const SymbolSeq& u, const SymbolSeq& v,
                                                   std::optional<int32_t> gap) {
    std::vector<TimedRealization> out;
    for (int32_t r : sp.rule_ids) {
        const SymbolSeq& body = g.rules[static_cast<size_t>(r)].plain();
        const size_t lu = u.size(), lv = v.size();
        size_t j = 0;
        while (j + lu + 1 + lv <= body.size()) {
            if (!matches_at(body, j, u)) {
                ++j;
                continue;
            }
            int32_t found_gap = -1;
            if (gap) {
                size_t k = static_cast<size_t>(*gap);
                if (j + lu + k + lv <= body.size() && matches_at(body, j + lu + k, v) &&
                    gap_clean(g, body, j + lu, k))
                    found_gap = *gap;
            } else {
                for (size_t k = 1; j + lu + k + lv <= body.size(); ++k) {
                    if (matches_at(body, j + lu + k, v) && gap_clean(g, body, j + lu, k)) {
                        found_gap = static_cast<int32_t>(k);
                        break;
                    }
                }
            }
            if (found_gap < 0) {
                ++j;
                continue;
            }
            out.push_back({sp.time(r, static_cast<int32_t>(j)),
                           {r, static_cast<int32_t>(j)}, found_gap});
            j += lu + static_cast<size_t>(found_gap) + lv;
        }
    }
    std::sort(out.begin(), out.end(),
              [](const TimedRealization& a, const TimedRealization& b) { return a.time < b.time; });
    return out;
}

MotifCandidate to_candidate(const Grammar& g, const SymbolSeq& u, const SymbolSeq& v,
                            std::optional<int32_t> gap,
                            const std::vector<TimedRealization>& picked) {
    MotifCandidate m;
    m.u = u;
    m.v = v;
    m.gap = gap;
    for (const TimedRealization& tr : picked) {
        m.realizations.push_back(tr.where);
        const SymbolSeq& body = g.rules[static_cast<size_t>(tr.where.rule)].plain();
        size_t from = static_cast<size_t>(tr.where.offset) + u.size();
        m.expansions.emplace_back(body.begin() + static_cast<std::ptrdiff_t>(from),
                                  body.begin() + static_cast<std::ptrdiff_t>(from + tr.gap_len));
    }
    return m;
}

// Flat open-addressing counter for (left, right, gap) triples, reused
// across search calls through epoch tagging so clearing is O(1).
class PairCounter {
public:
    struct Entry {
        int32_t a, b, k, count;
    };

    void reset() {
        if (slots_.empty()) grow(1u << 20);
        ++epoch_;
        if (epoch_ == 0) {
            std::fill(epochs_.begin(), epochs_.end(), 0u);
            epoch_ = 1;
        }
        used_ = 0;
    }

    void add(int32_t a, int32_t b, int32_t k) {
        if ((used_ + 1) * 2 >= slots_.size()) rehash(slots_.size() * 2);
        const size_t mask = slots_.size() - 1;
        size_t h = mix(a, b, k) & mask;
        while (true) {
            if (epochs_[h] != epoch_) {
                epochs_[h] = epoch_;
                slots_[h] = {a, b, k, 1};
                ++used_;
                return;
            }
            Slot& s = slots_[h];
            if (s.a == a && s.b == b && s.k == k) {
                ++s.count;
                return;
            }
            h = (h + 1) & mask;
        }
    }

    std::vector<Entry> entries(int32_t min_count) const {
        std::vector<Entry> out;
        for (size_t i = 0; i < slots_.size(); ++i)
            if (epochs_[i] == epoch_ && slots_[i].count >= min_count)
                out.push_back({slots_[i].a, slots_[i].b, slots_[i].k, slots_[i].count});
        return out;
    }

private:
    struct Slot {
        int32_t a, b, k, count;
    };

    static uint64_t mix(int32_t a, int32_t b, int32_t k) {
        uint64_t h = (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) ^
                     (static_cast<uint64_t>(static_cast<uint32_t>(b)) << 7) ^
                     static_cast<uint32_t>(k);
        h ^= h >> 33;
        h *= 0xff51afd7ed558ccdULL;
        h ^= h >> 29;
        h *= 0xc4ceb9fe1a85ec53ULL;
        h ^= h >> 32;
        return h;
    }

    void grow(size_t n) {
        slots_.assign(n, Slot{});
        epochs_.assign(n, 0u);
        epoch_ = 1;
        used_ = 0;
    }

    void rehash(size_t n) {
        std::vector<Slot> old_slots = std::move(slots_);
        std::vector<uint32_t> old_epochs = std::move(epochs_);
        const uint32_t old_epoch = epoch_;
        grow(n);
        const size_t mask = slots_.size() - 1;
        for (size_t i = 0; i < old_slots.size(); ++i) {
            if (old_epochs[i] != old_epoch) continue;
            const Slot& s = old_slots[i];
            size_t h = mix(s.a, s.b, s.k) & mask;
            while (epochs_[h] == epoch_) h = (h + 1) & mask;
            epochs_[h] = epoch_;
            slots_[h] = s;
            ++used_;
        }
    }

    std::vector<Slot> slots_;
    std::vector<uint32_t> epochs_;
    uint32_t epoch_ = 0;
    size_t used_ = 0;
};

PairCounter& pair_counter_scratch() {
    static thread_local PairCounter counter;
    return counter;
}

// Total order for the search: larger gain, larger context, smaller gap,
// lexicographically smaller contexts.
bool motif_better(int64_t gain_a, const MotifCandidate& a, int64_t gain_b,
                  const MotifCandidate& b) {
    if (gain_a != gain_b) return gain_a > gain_b;
    size_t ca = a.u.size() + a.v.size(), cb = b.u.size() + b.v.size();
    if (ca != cb) return ca > cb;
    int32_t ka = a.gap.value_or(0), kb = b.gap.value_or(0);
    if (ka != kb) return ka < kb;
    if (a.u != b.u) return seq_less(a.u, b.u);
    if (a.v != b.v) return seq_less(a.v, b.v);
    return false;
}

}  // namespace

int64_t gain_fixed(const MotifCandidate& m) {
    const int64_t a = static_cast<int64_t>(m.u.size() + m.v.size());
    return (a - 1) * (m.occ() - 1) - 4;
}

int64_t gain_variable(const MotifCandidate& m, const Grammar& g) {
    Grammar after = replace_motif(g, m);
    return size(g, Encoding::Variable).total - size(after, Encoding::Variable).total;
}

std::optional<MotifCandidate> make_motif(const Grammar& g, const SymbolSeq& u,
                                         const SymbolSeq& v, std::optional<int32_t> gap) {
    if (u.empty() || v.empty()) throw std::invalid_argument("make_motif: empty context");
    if (gap && *gap < 1) throw std::invalid_argument("make_motif: gap must be >= 1");
    MotifSpace sp = build_space(g);
    auto picked = collect_realizations(g, sp, u, v, gap);
    if (picked.empty()) return std::nullopt;
    return to_candidate(g, u, v, gap, picked);
}

Grammar replace_motif(const Grammar& g, const MotifCandidate& m) {
    if (m.u.empty() || m.v.empty() || m.realizations.empty())
        throw std::invalid_argument("replace_motif: degenerate candidate");
    if (m.realizations.size() != m.expansions.size())
        throw std::invalid_argument("replace_motif: realization/expansion count mismatch");

    // Verify every realization still matches the grammar text.
    for (size_t i = 0; i < m.realizations.size(); ++i) {
        const Realization& re = m.realizations[i];
        const SymbolSeq& exp = m.expansions[i];
        if (re.rule < 0 || re.rule >= g.n_rules() ||
            g.rules[static_cast<size_t>(re.rule)].is_inner())
            throw std::invalid_argument("replace_motif: stale realization (bad rule)");
        const SymbolSeq& body = g.rules[static_cast<size_t>(re.rule)].plain();
        size_t at = static_cast<size_t>(re.offset);
        size_t k = exp.size();
        if (m.gap && static_cast<size_t>(*m.gap) != k)
            throw std::invalid_argument("replace_motif: expansion length != fixed gap");
        if (k < 1 || at + m.u.size() + k + m.v.size() > body.size() ||
            !matches_at(body, at, m.u) ||
            !std::equal(exp.begin(), exp.end(),
                        body.begin() + static_cast<std::ptrdiff_t>(at + m.u.size())) ||
            !matches_at(body, at + m.u.size() + k, m.v) ||
            !gap_clean(g, body, at + m.u.size(), k))
            throw std::invalid_argument("replace_motif: stale realization (text changed)");
    }

    const int32_t outer = g.n_rules();
    const int32_t inner = outer + 1;

    // Realizations grouped per rule, spliced in ascending offset order.
    std::map<int32_t, std::vector<std::pair<int32_t, int32_t>>> by_rule;  // rule -> (offset, k)
    for (size_t i = 0; i < m.realizations.size(); ++i)
        by_rule[m.realizations[i].rule].push_back(
            {m.realizations[i].offset, static_cast<int32_t>(m.expansions[i].size())});

    Grammar out;
    out.mode = g.mode;
    out.tokens = g.tokens;
    out.rules.reserve(static_cast<size_t>(g.n_rules()) + 2);
    for (int32_t r = 0; r < g.n_rules(); ++r) {
        const Rule& rule = g.rules[static_cast<size_t>(r)];
        auto it = by_rule.find(r);
        if (it == by_rule.end() || rule.is_inner()) {
            out.rules.push_back(rule);
            continue;
        }
        auto spans = it->second;
        std::sort(spans.begin(), spans.end());
        const SymbolSeq& body = rule.plain();
        SymbolSeq rebuilt;
        size_t cur = 0;
        for (auto [off, k] : spans) {
            if (static_cast<size_t>(off) < cur)
                throw std::invalid_argument("replace_motif: overlapping realizations");
            rebuilt.insert(rebuilt.end(), body.begin() + static_cast<std::ptrdiff_t>(cur),
                           body.begin() + static_cast<std::ptrdiff_t>(off));
            rebuilt.push_back(Symbol::nonterminal(outer));
            cur = static_cast<size_t>(off) + m.u.size() + static_cast<size_t>(k) + m.v.size();
        }
        rebuilt.insert(rebuilt.end(), body.begin() + static_cast<std::ptrdiff_t>(cur), body.end());
        out.rules.push_back(Rule::make_plain(std::move(rebuilt)));
    }

    SymbolSeq o_body = m.u;
    o_body.push_back(Symbol::nonterminal(inner));
    o_body.insert(o_body.end(), m.v.begin(), m.v.end());
    out.rules.push_back(Rule::make_plain(std::move(o_body)));
    out.rules.push_back(Rule::make_inner(m.expansions, m.gap));
    return out;
}

std::optional<std::pair<MotifCandidate, int64_t>> best_fixed_motif(
    const Grammar& g, const MotifSearchParams& params, bool include_nonpositive) {
    MotifSpace sp = build_space(g);
    if (sp.total_len < 3) return std::nullopt;

    std::optional<MotifCandidate> best;
    int64_t best_gain = INT64_MIN;

    auto consider = [&](const SymbolSeq& u, const SymbolSeq& v, int32_t k) {
        auto picked = collect_realizations(g, sp, u, v, k);
        if (picked.size() < 2) return;
        MotifCandidate cand = to_candidate(g, u, v, k, picked);
        int64_t gain = gain_fixed(cand);
        if (!best || motif_better(gain, cand, best_gain, *best)) {
            best = std::move(cand);
            best_gain = gain;
        }
    };

    const int32_t max_ctx =
        params.max_context > 0 ? params.max_context : static_cast<int32_t>(sp.total_len);

    if (sp.total_len <= params.exhaustive_limit) {
        // Full scan over distinct context pairs drawn from every body span.
        std::set<std::tuple<SymbolSeq, int32_t, SymbolSeq>> seen;
        for (int32_t r : sp.rule_ids) {
            const SymbolSeq& body = g.rules[static_cast<size_t>(r)].plain();
            const int32_t n = static_cast<int32_t>(body.size());
            for (int32_t p1 = 0; p1 < n; ++p1)
                for (int32_t l1 = 1; l1 <= std::min(max_ctx, n - p1 - 2); ++l1)
                    for (int32_t k = 1; k <= std::min(params.max_gap, n - p1 - l1 - 1); ++k)
                        for (int32_t l2 = 1; l2 <= std::min(max_ctx, n - p1 - l1 - k); ++l2) {
                            SymbolSeq u(body.begin() + p1, body.begin() + p1 + l1);
                            SymbolSeq v(body.begin() + p1 + l1 + k,
                                        body.begin() + p1 + l1 + k + l2);
                            if (seen.insert({u, k, v}).second) consider(u, v, k);
                        }
        }
    } else {
        // Tier A: single-symbol contexts, counted with a bounded-gap sweep.
        // Raw pair counts upper-bound the non-overlapping occurrence count,
        // so candidates are evaluated in decreasing raw order with early
        // exit.
        std::unordered_map<int64_t, int32_t> symbol_count;
        for (int32_t r : sp.rule_ids)
            for (Symbol s : g.rules[static_cast<size_t>(r)].plain()) ++symbol_count[s.raw()];

        // A single-symbol pair needs occ >= 6 for positive gain; when only
        // positive results matter, rarer symbols cannot contribute.
        const int32_t min_count = include_nonpositive ? 2 : 6;

        // Per-body position lists of frequent symbols, plus prefix counts of
        // inner references for O(1) gap-cleanliness checks.
        std::unordered_map<int64_t, std::vector<std::pair<int32_t, int32_t>>> positions;
        std::vector<std::vector<int32_t>> inner_prefix(sp.rule_ids.size());
        PairCounter& counter = pair_counter_scratch();
        counter.reset();
        for (size_t ri = 0; ri < sp.rule_ids.size(); ++ri) {
            const int32_t r = sp.rule_ids[ri];
            const SymbolSeq& body = g.rules[static_cast<size_t>(r)].plain();
            const int32_t n = static_cast<int32_t>(body.size());
            std::vector<uint8_t> freq(static_cast<size_t>(n));
            auto& ip = inner_prefix[ri];
            ip.assign(static_cast<size_t>(n) + 1, 0);
            for (int32_t i = 0; i < n; ++i) {
                Symbol s = body[static_cast<size_t>(i)];
                freq[static_cast<size_t>(i)] = symbol_count[s.raw()] >= min_count;
                bool inner_sym =
                    s.is_nonterminal() && g.rules[static_cast<size_t>(s.nt_id())].is_inner();
                ip[static_cast<size_t>(i) + 1] = ip[static_cast<size_t>(i)] + (inner_sym ? 1 : 0);
                if (freq[static_cast<size_t>(i)]) positions[s.raw()].push_back({r, i});
            }
            for (int32_t i = 0; i < n; ++i) {
                if (!freq[static_cast<size_t>(i)]) continue;
                const int32_t dmax = std::min(params.max_gap + 1, n - 1 - i);
                const int32_t a = body[static_cast<size_t>(i)].raw();
                for (int32_t d = 2; d <= dmax; ++d) {
                    if (!freq[static_cast<size_t>(i + d)]) continue;
                    counter.add(a, body[static_cast<size_t>(i + d)].raw(), d - 1);
                }
            }
        }
        std::vector<int32_t> rule_index(static_cast<size_t>(g.n_rules()), -1);
        for (size_t ri = 0; ri < sp.rule_ids.size(); ++ri)
            rule_index[static_cast<size_t>(sp.rule_ids[ri])] = static_cast<int32_t>(ri);

        // Evaluates one single-symbol candidate from the position list of
        // its left context instead of rescanning every body.
        auto consider_single = [&](int32_t a_raw, int32_t b_raw, int32_t k) {
            auto it = positions.find(a_raw);
            if (it == positions.end()) return;
            std::vector<TimedRealization> matches;
            for (auto [r, off] : it->second) {
                const SymbolSeq& body = g.rules[static_cast<size_t>(r)].plain();
                const int32_t j = off + k + 1;
                if (j >= static_cast<int32_t>(body.size())) continue;
                if (body[static_cast<size_t>(j)].raw() != b_raw) continue;
                const auto& ip = inner_prefix[static_cast<size_t>(
                    rule_index[static_cast<size_t>(r)])];
                if (ip[static_cast<size_t>(j)] != ip[static_cast<size_t>(off) + 1])
                    continue;  // an inner reference sits in the gap
                matches.push_back({sp.time(r, off), {r, off}, k});
            }
            if (matches.size() < 2) return;
            std::sort(matches.begin(), matches.end(),
                      [](const TimedRealization& x, const TimedRealization& y) {
                          return x.time < y.time;
                      });
            // Leftmost-greedy selection; spans only collide within a body.
            std::vector<TimedRealization> picked;
            std::unordered_map<int32_t, int32_t> next_free;
            const int32_t span = k + 2;
            for (const TimedRealization& m : matches) {
                auto [nf, fresh] = next_free.try_emplace(m.where.rule, 0);
                if (!fresh && m.where.offset < nf->second) continue;
                nf->second = m.where.offset + span;
                picked.push_back(m);
            }
            if (picked.size() < 2) return;
            MotifCandidate cand = to_candidate(g, {Symbol::from_raw(a_raw)},
                                               {Symbol::from_raw(b_raw)}, k, picked);
            int64_t gain = gain_fixed(cand);
            if (!best || motif_better(gain, cand, best_gain, *best)) {
                best = std::move(cand);
                best_gain = gain;
            }
        };

        std::vector<PairCounter::Entry> entries = counter.entries(2);
        std::sort(entries.begin(), entries.end(),
                  [](const PairCounter::Entry& x, const PairCounter::Entry& y) {
                      if (x.count != y.count) return x.count > y.count;
                      if (x.k != y.k) return x.k < y.k;
                      if (x.a != y.a) return x.a < y.a;
                      return x.b < y.b;
                  });
        for (const PairCounter::Entry& e : entries) {
            int64_t bound = static_cast<int64_t>(e.count) - 5;
            if (best && bound < best_gain) break;
            consider_single(e.a, e.b, e.k);
        }

        // Tier B: contexts drawn from maximal repeats of the searchable
        // space (plus frequent single partners), paired through position
        // windows, processed in decreasing bound order.
        if (max_ctx > 1) {
            RepeatIndex idx(g, sp.rule_ids);
            std::vector<RepeatStats> reps = idx.maximal_repeats();
            std::sort(reps.begin(), reps.end(), [](const RepeatStats& a, const RepeatStats& b) {
                int64_t ba = (static_cast<int64_t>(a.word.size()) - 1) * (a.occ - 1);
                int64_t bb = (static_cast<int64_t>(b.word.size()) - 1) * (b.occ - 1);
                if (ba != bb) return ba > bb;
                return seq_less(a.word, b.word);
            });
            if (static_cast<int32_t>(reps.size()) > params.top_repeats)
                reps.resize(static_cast<size_t>(params.top_repeats));

            std::vector<SymbolSeq> contexts;
            for (const RepeatStats& r : reps)
                if (static_cast<int32_t>(r.word.size()) <= max_ctx) contexts.push_back(r.word);

            std::vector<std::pair<int32_t, int64_t>> freq_singles;  // raw, count
            for (const auto& [raw, cnt] : symbol_count)
                if (cnt >= min_count) freq_singles.push_back({static_cast<int32_t>(raw), cnt});
            std::sort(freq_singles.begin(), freq_singles.end(), [](const auto& x, const auto& y) {
                if (x.second != y.second) return x.second > y.second;
                return x.first < y.first;
            });
            if (static_cast<int32_t>(freq_singles.size()) > params.top_partners)
                freq_singles.resize(static_cast<size_t>(params.top_partners));
            for (const auto& [raw, cnt] : freq_singles) contexts.push_back({Symbol::from_raw(raw)});

            // Flat occurrence positions per context, from the space index.
            std::vector<std::vector<int32_t>> positions(contexts.size());
            std::vector<int64_t> counts(contexts.size());
            for (size_t c = 0; c < contexts.size(); ++c) {
                positions[c] = idx.all_positions(contexts[c]);
                counts[c] = static_cast<int64_t>(positions[c].size());
            }

            struct PairKey {
                size_t cu, cv;
                int64_t bound;
            };
            std::vector<PairKey> pairs;
            for (size_t a = 0; a < contexts.size(); ++a) {
                for (size_t b = 0; b < contexts.size(); ++b) {
                    size_t total_ctx = contexts[a].size() + contexts[b].size();
                    if (total_ctx < 3) continue;  // single-single handled by tier A
                    int64_t bound = (static_cast<int64_t>(total_ctx) - 1) *
                                        (std::min(counts[a], counts[b]) - 1) -
                                    4;
                    pairs.push_back({a, b, bound});
                }
            }
            std::sort(pairs.begin(), pairs.end(),
                      [](const PairKey& x, const PairKey& y) { return x.bound > y.bound; });

            std::map<int32_t, int32_t> k_counts;
            for (const PairKey& p : pairs) {
                if (p.bound < 2 - 4) break;  // can never reach occ >= 2
                if (best && p.bound < best_gain) break;
                const SymbolSeq& u = contexts[p.cu];
                const SymbolSeq& v = contexts[p.cv];
                const auto& pu = positions[p.cu];
                const auto& pv = positions[p.cv];
                k_counts.clear();
                for (int32_t s : pu) {
                    int32_t end = s + static_cast<int32_t>(u.size());
                    auto lo = std::lower_bound(pv.begin(), pv.end(), end + 1);
                    auto hi = std::upper_bound(pv.begin(), pv.end(), end + params.max_gap);
                    for (auto it = lo; it != hi; ++it) ++k_counts[*it - end];
                }
                for (const auto& [k, cnt] : k_counts) {
                    if (cnt < 2) continue;
                    int64_t bound = (static_cast<int64_t>(u.size() + v.size()) - 1) *
                                        (static_cast<int64_t>(cnt) - 1) -
                                    4;
                    if (best && bound < best_gain) continue;
                    consider(u, v, k);
                }
            }
        }
    }

    if (!best) return std::nullopt;
    if (!include_nonpositive && best_gain <= 0) return std::nullopt;
    return std::make_pair(std::move(*best), best_gain);
}

}  // namespace nrg
