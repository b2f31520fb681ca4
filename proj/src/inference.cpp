#include "nrg/inference.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace nrg {

Encoding natural_encoding(const Grammar& g) {
    for (const Rule& r : g.rules)
        if (r.is_inner() && !r.inner().fixed_len) return Encoding::Variable;
    return Encoding::Fixed;
}

int64_t current_size(const Grammar& g) { return size(g, natural_encoding(g)).total; }

Grammar replace_repeat(const Grammar& g, const RepeatStats& rep) {
    if (rep.word.size() < 1 || rep.positions.empty())
        throw std::invalid_argument("replace_repeat: degenerate repeat");

    const int32_t fresh = g.n_rules();
    const int32_t wlen = static_cast<int32_t>(rep.word.size());

    // Occurrences grouped per (rule, part), ascending offsets.
    std::map<std::pair<int32_t, int32_t>, std::vector<int32_t>> by_part;
    for (const Located& at : rep.positions) by_part[{at.rule, at.part}].push_back(at.offset);

    auto splice = [&](const SymbolSeq& body, std::vector<int32_t>& offsets) {
        std::sort(offsets.begin(), offsets.end());
        SymbolSeq rebuilt;
        size_t cur = 0;
        for (int32_t off : offsets) {
            if (static_cast<size_t>(off) < cur || static_cast<size_t>(off) + wlen > body.size() ||
                !std::equal(rep.word.begin(), rep.word.end(),
                            body.begin() + static_cast<std::ptrdiff_t>(off)))
                throw std::invalid_argument("replace_repeat: stale occurrence list");
            rebuilt.insert(rebuilt.end(), body.begin() + static_cast<std::ptrdiff_t>(cur),
                           body.begin() + static_cast<std::ptrdiff_t>(off));
            rebuilt.push_back(Symbol::nonterminal(fresh));
            cur = static_cast<size_t>(off) + wlen;
        }
        rebuilt.insert(rebuilt.end(), body.begin() + static_cast<std::ptrdiff_t>(cur), body.end());
        return rebuilt;
    };

    Grammar out;
    out.mode = g.mode;
    out.tokens = g.tokens;
    out.rules.reserve(static_cast<size_t>(g.n_rules()) + 1);
    for (int32_t r = 0; r < g.n_rules(); ++r) {
        const Rule& rule = g.rules[static_cast<size_t>(r)];
        if (!rule.is_inner()) {
            auto it = by_part.find({r, -1});
            out.rules.push_back(it == by_part.end()
                                    ? rule
                                    : Rule::make_plain(splice(rule.plain(), it->second)));
            continue;
        }
        InnerRule ir;
        ir.fixed_len = rule.inner().fixed_len;
        for (size_t j = 0; j < rule.inner().expansions.size(); ++j) {
            auto it = by_part.find({r, static_cast<int32_t>(j)});
            if (it == by_part.end()) {
                ir.expansions.push_back(rule.inner().expansions[j]);
            } else {
                if (ir.fixed_len)
                    throw std::invalid_argument(
                        "replace_repeat: cannot rewrite fixed-length expansions");
                ir.expansions.push_back(splice(rule.inner().expansions[j], it->second));
            }
        }
        out.rules.push_back(Rule::make_inner(std::move(ir.expansions), ir.fixed_len));
    }
    out.rules.push_back(Rule::make_plain(rep.word));
    return out;
}

InferenceResult greedy(const Sequence& s, std::optional<int64_t> max_iterations) {
    if (s.syms.empty()) throw std::invalid_argument("greedy: empty input");
    InferenceResult res{Grammar::single_rule(s), {}};
    int64_t step = 0;
    while (true) {
        if (max_iterations && step >= *max_iterations) {
            res.trace.stop = RunTrace::StopReason::MaxIterations;
            break;
        }
        auto best = RepeatIndex(res.grammar).best_repeat();
        if (!best) {
            res.trace.stop = RunTrace::StopReason::NoPositiveGain;
            break;
        }
        res.grammar = replace_repeat(res.grammar, best->first);
        TraceStep ts;
        ts.step = step++;
        ts.action = TraceStep::Action::Repeat;
        ts.u = best->first.word;
        ts.gain = best->second;
        ts.size_after = current_size(res.grammar);
        res.trace.steps.push_back(std::move(ts));
    }
    return res;
}

InferenceResult nrgreedy_fix(const Sequence& s, const MotifSearchParams& motif) {
    if (s.syms.empty()) throw std::invalid_argument("nrgreedy_fix: empty input");
    InferenceResult res{Grammar::single_rule(s), {}};
    int64_t step = 0;
    while (true) {
        auto rep = RepeatIndex(res.grammar).best_repeat();
        auto mot = best_fixed_motif(res.grammar, motif, /*include_nonpositive=*/true);
        const int64_t f_w = rep ? rep->second : 0;
        const int64_t f_m = mot ? mot->second : 0;
        if (f_w <= 0 && f_m <= 0) break;

        TraceStep ts;
        ts.step = step++;
        if (f_w > f_m) {
            // Strictly better repeat; equal gains go to the motif branch.
            res.grammar = replace_repeat(res.grammar, rep->first);
            ts.action = TraceStep::Action::Repeat;
            ts.u = rep->first.word;
            ts.gain = f_w;
        } else {
            res.grammar = replace_motif(res.grammar, mot->first);
            ts.action = TraceStep::Action::Motif;
            ts.u = mot->first.u;
            ts.v = mot->first.v;
            ts.gap = mot->first.gap.value_or(0);
            ts.gain = f_m;
        }
        ts.size_after = current_size(res.grammar);
        res.trace.steps.push_back(std::move(ts));
    }
    return res;
}

PostResult post_process(const Grammar& g, const MotifSearchParams& motif) {
    if (!is_straight_line(g))
        throw std::invalid_argument("post_process: input grammar must be straight-line");

    PostResult res{g, {}, 0};
    MotifSearchParams params = motif;
    // A converged straight-line grammar has no worthwhile repeated context
    // longer than one symbol, so the search narrows accordingly.
    if (params.max_context == 0 && !RepeatIndex(g).best_repeat()) params.max_context = 1;

    int64_t step = 0;
    while (true) {
        auto mot = best_fixed_motif(res.grammar, params);
        if (!mot) break;
        res.grammar = replace_motif(res.grammar, mot->first);
        ++res.n_ctx;
        TraceStep ts;
        ts.step = step++;
        ts.action = TraceStep::Action::Motif;
        ts.u = mot->first.u;
        ts.v = mot->first.v;
        ts.gap = mot->first.gap.value_or(0);
        ts.gain = mot->second;
        ts.size_after = current_size(res.grammar);
        res.trace.steps.push_back(std::move(ts));
    }
    return res;
}

}  // namespace nrg
