#pragma once

// Independent brute-force reference implementations used to freeze expected
// values in tests. Everything here is deliberately naive and kept free of
// the library's algorithmic code paths.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "nrg/grammar.hpp"

namespace nrg::testing {

// --- depth oracle: maximal nonterminal depth over all parse trees ---------

inline void oracle_depth_walk(const Grammar& g, int32_t id, int32_t d,
                              std::vector<int32_t>& best,
                              std::set<std::pair<int32_t, int32_t>>& seen) {
    if (!seen.insert({id, d}).second) return;
    best[static_cast<size_t>(id)] = std::max(best[static_cast<size_t>(id)], d);
    const Rule& r = g.rules[static_cast<size_t>(id)];
    auto walk_seq = [&](const SymbolSeq& seq) {
        for (Symbol s : seq)
            if (s.is_nonterminal()) oracle_depth_walk(g, s.nt_id(), d + 1, best, seen);
    };
    if (r.is_inner()) {
        for (const auto& e : r.inner().expansions) walk_seq(e);
    } else {
        walk_seq(r.plain());
    }
}

inline std::vector<int32_t> oracle_depths(const Grammar& g) {
    std::vector<int32_t> best(static_cast<size_t>(g.n_rules()), 0);
    std::set<std::pair<int32_t, int32_t>> seen;
    oracle_depth_walk(g, 0, 0, best, seen);
    return best;
}

// --- language oracle: every string derivable with free expansion choice ---

inline void oracle_language_walk(const Grammar& g, const SymbolSeq& seq, size_t idx,
                                 SymbolSeq prefix, std::set<SymbolSeq>& out,
                                 size_t limit) {
    if (out.size() >= limit) return;
    for (size_t i = idx; i < seq.size(); ++i) {
        Symbol s = seq[i];
        if (s.is_terminal()) {
            prefix.push_back(s);
            continue;
        }
        const Rule& r = g.rules[static_cast<size_t>(s.nt_id())];
        if (r.is_inner()) {
            std::set<SymbolSeq, bool (*)(const SymbolSeq&, const SymbolSeq&)> options(seq_less);
            for (const auto& e : r.inner().expansions) options.insert(e);
            for (const auto& e : options) {
                SymbolSeq spliced = prefix;
                SymbolSeq rest(e.begin(), e.end());
                rest.insert(rest.end(), seq.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                            seq.end());
                oracle_language_walk(g, rest, 0, std::move(spliced), out, limit);
            }
            return;
        }
        SymbolSeq rest = r.plain();
        rest.insert(rest.end(), seq.begin() + static_cast<std::ptrdiff_t>(i) + 1, seq.end());
        oracle_language_walk(g, rest, 0, std::move(prefix), out, limit);
        return;
    }
    out.insert(prefix);
}

inline std::set<SymbolSeq> oracle_language(const Grammar& g, size_t limit = 100000) {
    std::set<SymbolSeq> out;
    oracle_language_walk(g, {Symbol::nonterminal(0)}, 0, {}, out, limit);
    return out;
}

// --- string scanning oracles ----------------------------------------------

// Leftmost-greedy maximal set of non-overlapping occurrences.
template <typename Seq>
std::vector<size_t> oracle_nonoverlap_positions(const Seq& text, const Seq& word) {
    std::vector<size_t> out;
    if (word.empty() || word.size() > text.size()) return out;
    size_t i = 0;
    while (i + word.size() <= text.size()) {
        if (std::equal(word.begin(), word.end(), text.begin() + static_cast<std::ptrdiff_t>(i))) {
            out.push_back(i);
            i += word.size();
        } else {
            ++i;
        }
    }
    return out;
}

// All plain (possibly overlapping) occurrence positions.
template <typename Seq>
std::vector<size_t> oracle_all_positions(const Seq& text, const Seq& word) {
    std::vector<size_t> out;
    if (word.empty() || word.size() > text.size()) return out;
    for (size_t i = 0; i + word.size() <= text.size(); ++i)
        if (std::equal(word.begin(), word.end(), text.begin() + static_cast<std::ptrdiff_t>(i)))
            out.push_back(i);
    return out;
}

// Maximal repeats of a single string: length >= 2, occurring >= 2 times,
// with occurrences that are neither all preceded nor all followed by one
// identical symbol (string boundaries never match anything). Only words
// whose leftmost-greedy non-overlapping count is >= 2 are reported.
template <typename Seq>
std::vector<std::pair<Seq, size_t>> oracle_maximal_repeats(const Seq& text) {
    std::map<Seq, std::vector<size_t>> occ;
    for (size_t len = 2; len <= text.size(); ++len)
        for (size_t i = 0; i + len <= text.size(); ++i)
            occ[Seq(text.begin() + static_cast<std::ptrdiff_t>(i),
                    text.begin() + static_cast<std::ptrdiff_t>(i + len))]
                .push_back(i);

    std::vector<std::pair<Seq, size_t>> out;
    for (auto& [word, positions] : occ) {
        if (positions.size() < 2) continue;
        bool left_uniform = true;
        for (size_t p : positions)
            if (p == 0) left_uniform = false;
        if (left_uniform)
            for (size_t p : positions)
                if (!(text[p - 1] == text[positions[0] - 1])) left_uniform = false;
        bool right_uniform = true;
        for (size_t p : positions)
            if (p + word.size() >= text.size()) right_uniform = false;
        if (right_uniform)
            for (size_t p : positions)
                if (!(text[p + word.size()] == text[positions[0] + word.size()]))
                    right_uniform = false;
        if (left_uniform || right_uniform) continue;
        size_t n = oracle_nonoverlap_positions(text, word).size();
        if (n >= 2) out.emplace_back(word, n);
    }
    return out;
}

// --- random instance generators -------------------------------------------

inline SymbolSeq random_symbols(std::mt19937& rng, size_t len, int alpha) {
    SymbolSeq s;
    s.reserve(len);
    std::uniform_int_distribution<int32_t> pick('a', 'a' + alpha - 1);
    for (size_t i = 0; i < len; ++i) s.push_back(Symbol::terminal(pick(rng)));
    return s;
}

// Random straight-line grammar: a start body over terminals plus factored
// rules, built by repeatedly replacing a repeated word with a fresh
// nonterminal (manual rewriting, independent of the library's rewrite ops).
inline Grammar random_straightline_grammar(std::mt19937& rng, size_t len = 48, int alpha = 3,
                                           int factorings = 3) {
    Grammar g;
    g.mode = AlphabetMode::Byte;
    g.rules.push_back(Rule::make_plain(random_symbols(rng, len, alpha)));

    for (int round = 0; round < factorings; ++round) {
        // Pick a random word from a random rule body and factor it out if it
        // occurs at least twice (across all plain bodies).
        std::uniform_int_distribution<size_t> pick_rule(0, g.rules.size() - 1);
        const SymbolSeq& src = g.rules[pick_rule(rng)].plain();
        if (src.size() < 4) continue;
        std::uniform_int_distribution<size_t> pick_len(2, std::min<size_t>(4, src.size() - 1));
        size_t wlen = pick_len(rng);
        std::uniform_int_distribution<size_t> pick_pos(0, src.size() - wlen);
        size_t at = pick_pos(rng);
        SymbolSeq word(src.begin() + static_cast<std::ptrdiff_t>(at),
                       src.begin() + static_cast<std::ptrdiff_t>(at + wlen));

        size_t total = 0;
        for (const Rule& r : g.rules) total += oracle_nonoverlap_positions(r.plain(), word).size();
        if (total < 2) continue;

        int32_t fresh = g.n_rules();
        for (Rule& r : g.rules) {
            SymbolSeq& body = r.plain();
            auto positions = oracle_nonoverlap_positions(body, word);
            SymbolSeq rebuilt;
            size_t cur = 0;
            for (size_t p : positions) {
                rebuilt.insert(rebuilt.end(), body.begin() + static_cast<std::ptrdiff_t>(cur),
                               body.begin() + static_cast<std::ptrdiff_t>(p));
                rebuilt.push_back(Symbol::nonterminal(fresh));
                cur = p + wlen;
            }
            rebuilt.insert(rebuilt.end(), body.begin() + static_cast<std::ptrdiff_t>(cur),
                           body.end());
            body = std::move(rebuilt);
        }
        g.rules.push_back(Rule::make_plain(word));
    }
    return g;
}

// Adds random branching pairs by hand: picks single-symbol contexts u, v and
// a gap length, replaces all leftmost-greedy disjoint realizations in the
// start body, and lists the gaps as the inner rule's expansions.
inline Grammar add_random_branching(std::mt19937& rng, Grammar g, int layers = 1,
                                    bool fixed_gap = true) {
    for (int layer = 0; layer < layers; ++layer) {
        SymbolSeq& body = g.rules[0].plain();
        if (body.size() < 8) break;
        std::uniform_int_distribution<size_t> pick_k(1, 3);
        size_t k = pick_k(rng);
        std::uniform_int_distribution<size_t> pick_pos(0, body.size() - (k + 2));
        size_t seed_at = pick_pos(rng);
        Symbol u = body[seed_at];
        Symbol v = body[seed_at + 1 + k];
        if (!u.is_terminal() && g.rules[static_cast<size_t>(u.nt_id())].is_inner()) continue;
        if (!v.is_terminal() && g.rules[static_cast<size_t>(v.nt_id())].is_inner()) continue;

        // Realizations: u at p, exactly k gap symbols, v after; the gap must
        // not contain an inner reference.
        std::vector<size_t> starts;
        size_t i = 0;
        while (i + k + 2 <= body.size()) {
            bool ok = body[i] == u && body[i + 1 + k] == v;
            for (size_t j = i + 1; ok && j <= i + k; ++j) {
                Symbol s = body[j];
                if (s.is_nonterminal() && g.rules[static_cast<size_t>(s.nt_id())].is_inner())
                    ok = false;
            }
            if (ok) {
                starts.push_back(i);
                i += k + 2;
            } else {
                ++i;
            }
        }
        if (starts.size() < 2) continue;

        int32_t outer = g.n_rules();
        int32_t inner = outer + 1;
        std::vector<SymbolSeq> exps;
        SymbolSeq rebuilt;
        size_t cur = 0;
        for (size_t p : starts) {
            rebuilt.insert(rebuilt.end(), body.begin() + static_cast<std::ptrdiff_t>(cur),
                           body.begin() + static_cast<std::ptrdiff_t>(p));
            rebuilt.push_back(Symbol::nonterminal(outer));
            exps.emplace_back(body.begin() + static_cast<std::ptrdiff_t>(p + 1),
                              body.begin() + static_cast<std::ptrdiff_t>(p + 1 + k));
            cur = p + k + 2;
        }
        rebuilt.insert(rebuilt.end(), body.begin() + static_cast<std::ptrdiff_t>(cur), body.end());
        body = std::move(rebuilt);

        g.rules.push_back(Rule::make_plain({u, Symbol::nonterminal(inner), v}));
        g.rules.push_back(Rule::make_inner(
            std::move(exps), fixed_gap ? std::optional<int32_t>(static_cast<int32_t>(k))
                                       : std::nullopt));
    }
    return g;
}

inline Grammar random_grammar(std::mt19937& rng, bool with_branching, bool fixed_gap = true) {
    Grammar g = random_straightline_grammar(rng);
    if (with_branching) g = add_random_branching(rng, std::move(g), 2, fixed_gap);
    return g;
}

}  // namespace nrg::testing
