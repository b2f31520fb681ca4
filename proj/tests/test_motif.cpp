#include "doctest.h"

#include <random>
#include <set>
#include <tuple>

#include "fixtures.hpp"
#include "nrg/encoder.hpp"
#include "nrg/inference.hpp"
#include "nrg/motif.hpp"
#include "oracles.hpp"

using namespace nrg;
using namespace nrg::testing;

namespace {

SymbolSeq bytes(const std::string& s) {
    SymbolSeq out;
    for (unsigned char c : s) out.push_back(Symbol::terminal(c));
    return out;
}

SymbolSeq words(TokenTable& t, std::initializer_list<const char*> ws) {
    SymbolSeq out;
    for (const char* w : ws) out.push_back(Symbol::terminal(t.intern(w)));
    return out;
}

// Brute-force best fixed-gap motif over a single flat string, mirroring the
// search's tie order (gain, |u|+|v| desc, k asc, lexicographic contexts).
struct OracleMotif {
    SymbolSeq u, v;
    int32_t k = 0;
    int64_t occ = 0;
    int64_t gain = 0;
    bool found = false;
};

OracleMotif oracle_best_motif(const SymbolSeq& s, int32_t max_gap) {
    OracleMotif best;
    const int32_t n = static_cast<int32_t>(s.size());
    std::set<std::tuple<SymbolSeq, int32_t, SymbolSeq>> seen;
    for (int32_t p1 = 0; p1 < n; ++p1)
        for (int32_t l1 = 1; p1 + l1 + 2 <= n; ++l1)
            for (int32_t k = 1; k <= std::min(max_gap, n - p1 - l1 - 1); ++k)
                for (int32_t l2 = 1; p1 + l1 + k + l2 <= n; ++l2) {
                    SymbolSeq u(s.begin() + p1, s.begin() + p1 + l1);
                    SymbolSeq v(s.begin() + p1 + l1 + k, s.begin() + p1 + l1 + k + l2);
                    if (!seen.insert({u, k, v}).second) continue;
                    // leftmost-greedy realizations
                    int64_t occ = 0;
                    int32_t j = 0;
                    const int32_t span = l1 + k + l2;
                    while (j + span <= n) {
                        bool hit = std::equal(u.begin(), u.end(), s.begin() + j) &&
                                   std::equal(v.begin(), v.end(), s.begin() + j + l1 + k);
                        if (hit) {
                            ++occ;
                            j += span;
                        } else {
                            ++j;
                        }
                    }
                    if (occ < 2) continue;
                    int64_t gain = (static_cast<int64_t>(l1 + l2) - 1) * (occ - 1) - 4;
                    bool better = false;
                    if (!best.found || gain > best.gain)
                        better = true;
                    else if (gain == best.gain) {
                        size_t ca = u.size() + v.size(), cb = best.u.size() + best.v.size();
                        if (ca != cb)
                            better = ca > cb;
                        else if (k != best.k)
                            better = k < best.k;
                        else if (u != best.u)
                            better = seq_less(u, best.u);
                        else if (v != best.v)
                            better = seq_less(v, best.v);
                    }
                    if (better) best = {u, v, k, occ, gain, true};
                }
    return best;
}

}  // namespace

TEST_CASE("fixed-gap gain arithmetic matches the encoded-size difference") {
    // Four disjoint realizations of pq . rs with distinct gaps content.
    Sequence s = Sequence::from_bytes("pq1rspq2rspq3rspq4rs");
    Grammar g = Grammar::single_rule(s);
    auto m = make_motif(g, bytes("pq"), bytes("rs"), 1);
    REQUIRE(m.has_value());
    CHECK(m->occ() == 4);
    CHECK(gain_fixed(*m) == 5);

    Grammar after = replace_motif(g, *m);
    REQUIRE(validate(after).empty());
    CHECK(stream_length(g, Encoding::Fixed) - stream_length(after, Encoding::Fixed) == 5);
    CHECK(expand(after) == s.syms);
}

TEST_CASE("a single realization is pure overhead") {
    Sequence s = Sequence::from_bytes("xaybz");
    Grammar g = Grammar::single_rule(s);
    auto m = make_motif(g, bytes("x"), bytes("y"), 1);
    REQUIRE(m.has_value());
    CHECK(m->occ() == 1);
    CHECK(gain_fixed(*m) == -4);
    Grammar after = replace_motif(g, *m);
    CHECK(stream_length(g, Encoding::Fixed) - stream_length(after, Encoding::Fixed) == -4);
}

TEST_CASE("the storybook branching grammar arises from one motif rewrite") {
    Sequence seq = storybook_sequence();
    Grammar flat = Grammar::single_rule(seq);
    TokenTable t = seq.tokens;

    auto m = make_motif(flat, words(t, {"Alice"}), words(t, {"very", "tired"}), 2);
    REQUIRE(m.has_value());
    CHECK(m->occ() == 3);
    CHECK(m->expansions[0] == words(t, {"was", "getting"}));
    CHECK(m->expansions[1] == words(t, {"will", "be"}));
    CHECK(m->expansions[2] == words(t, {"was", "getting"}));

    // Gain is exactly the measured size change: both grammars cost 27.
    CHECK(gain_fixed(*m) == 0);
    CHECK(stream_length(flat, Encoding::Fixed) == 27);
    Grammar g2 = replace_motif(flat, *m);
    REQUIRE(validate(g2).empty());
    CHECK(stream_length(g2, Encoding::Fixed) == 27);
    CHECK(expand(g2) == seq.syms);

    Grammar want = sample_grammar_fixed();
    CHECK(canonicalized(g2).rules.size() == want.rules.size());
    CHECK(expand(canonicalized(g2)) == expand(want));
    CHECK(encode(g2, Encoding::Fixed).symbols == encode(want, Encoding::Fixed).symbols);
}

TEST_CASE("fixed-gap gain equals the encoded-size difference on random instances") {
    std::mt19937 rng(2718);
    int checked = 0;
    for (int round = 0; round < 400; ++round) {
        Grammar g = random_grammar(rng, round % 2 == 1, /*fixed_gap=*/true);
        REQUIRE(validate(g).empty());
        const SymbolSeq& body = g.rules[0].plain();
        if (body.size() < 6) continue;

        std::uniform_int_distribution<size_t> pick(0, body.size() - 1);
        for (int tries = 0; tries < 8; ++tries) {
            size_t p = pick(rng);
            size_t lu = 1 + rng() % 2, k = 1 + rng() % 3, lv = 1 + rng() % 2;
            if (p + lu + k + lv > body.size()) continue;
            SymbolSeq u(body.begin() + static_cast<std::ptrdiff_t>(p),
                        body.begin() + static_cast<std::ptrdiff_t>(p + lu));
            SymbolSeq v(body.begin() + static_cast<std::ptrdiff_t>(p + lu + k),
                        body.begin() + static_cast<std::ptrdiff_t>(p + lu + k + lv));
            bool bad = false;
            for (Symbol sym : u)
                if (sym.is_nonterminal() && g.rules[static_cast<size_t>(sym.nt_id())].is_inner())
                    bad = true;
            for (Symbol sym : v)
                if (sym.is_nonterminal() && g.rules[static_cast<size_t>(sym.nt_id())].is_inner())
                    bad = true;
            if (bad) continue;
            auto m = make_motif(g, u, v, static_cast<int32_t>(k));
            if (!m || m->occ() < 2) continue;

            Grammar after = replace_motif(g, *m);
            REQUIRE(validate(after).empty());
            int64_t diff = stream_length(g, Encoding::Fixed) - stream_length(after, Encoding::Fixed);
            CHECK(gain_fixed(*m) == diff);
            CHECK(expand(after) == expand(g));
            ++checked;
        }
    }
    CHECK(checked > 200);
}

TEST_CASE("variable-gap gain is measured, not assumed") {
    Sequence seq = storybook_sequence();
    Grammar flat = Grammar::single_rule(seq);
    TokenTable t = seq.tokens;

    auto m = make_motif(flat, words(t, {"Alice"}), words(t, {"very", "tired"}), std::nullopt);
    REQUIRE(m.has_value());
    CHECK(m->occ() == 5);
    CHECK(m->expansions[0] == words(t, {"was", "beginning", "to", "get"}));

    Grammar after = replace_motif(flat, *m);
    REQUIRE(validate(after).empty());
    int64_t measured = stream_length(flat, Encoding::Variable) -
                       stream_length(after, Encoding::Variable);
    CHECK(gain_variable(*m, flat) == measured);
    CHECK(measured == 0);  // 27 both ways; the variable rewrite never wins here
    CHECK(stream_length(after, Encoding::Variable) == 27);
    CHECK(expand(after) == seq.syms);

    // Single-realization variable motifs only add overhead.
    Grammar tiny = Grammar::single_rule(Sequence::from_bytes("xaay"));
    auto lone = make_motif(tiny, bytes("x"), bytes("y"), std::nullopt);
    REQUIRE(lone.has_value());
    CHECK(gain_variable(*lone, tiny) < 0);
}

TEST_CASE("best fixed motif agrees with the exhaustive enumeration on short strings") {
    std::mt19937 rng(1618);
    MotifSearchParams params;
    params.exhaustive_limit = 48;
    for (int round = 0; round < 250; ++round) {
        size_t len = 4 + static_cast<size_t>(rng() % 9);
        int alpha = 2 + static_cast<int>(rng() % 2);
        SymbolSeq s = random_symbols(rng, len, alpha);
        Grammar g;
        g.mode = AlphabetMode::Byte;
        g.rules.push_back(Rule::make_plain(s));

        OracleMotif want = oracle_best_motif(s, params.max_gap);
        auto got = best_fixed_motif(g, params, /*include_nonpositive=*/true);
        if (!want.found) {
            CHECK(!got.has_value());
        } else {
            REQUIRE(got.has_value());
            CHECK(got->second == want.gain);
            CHECK(got->first.u == want.u);
            CHECK(got->first.v == want.v);
            CHECK(got->first.gap == want.k);
        }
        // The positive-only entry point filters non-positive winners.
        auto positive = best_fixed_motif(g, params);
        if (want.found && want.gain > 0) {
            REQUIRE(positive.has_value());
            CHECK(positive->second == want.gain);
        } else {
            CHECK(!positive.has_value());
        }
    }
}

TEST_CASE("the tiered search matches the exhaustive one beyond the cutoff") {
    std::mt19937 rng(31415);
    for (int round = 0; round < 60; ++round) {
        size_t len = 50 + static_cast<size_t>(rng() % 30);
        SymbolSeq s = random_symbols(rng, len, 2);
        Grammar g;
        g.mode = AlphabetMode::Byte;
        g.rules.push_back(Rule::make_plain(s));

        MotifSearchParams tiered;
        tiered.exhaustive_limit = 0;  // force the tiered path
        tiered.top_repeats = 64;
        tiered.top_partners = 64;
        MotifSearchParams full;
        full.exhaustive_limit = 1 << 20;

        auto a = best_fixed_motif(g, tiered);
        auto b = best_fixed_motif(g, full);
        if (!b) {
            // The tiered universe is a subset of the full one.
            CHECK(!a.has_value());
        } else if (b->first.u.size() == 1 && b->first.v.size() == 1) {
            // Single-symbol contexts are searched exhaustively by tier A.
            REQUIRE(a.has_value());
            CHECK(a->second == b->second);
        } else {
            REQUIRE(a.has_value());
            CHECK(a->second <= b->second);
            // Whatever the tiered search reports must be really achievable.
            Grammar after = replace_motif(g, a->first);
            CHECK(stream_length(g, Encoding::Fixed) - stream_length(after, Encoding::Fixed) ==
                  a->second);
        }
    }
}

TEST_CASE("storybook search agrees with the exhaustive enumeration") {
    Sequence seq = storybook_sequence();
    Grammar flat = Grammar::single_rule(seq);
    TokenTable t = seq.tokens;
    MotifSearchParams params;
    params.exhaustive_limit = 64;

    // The pattern behind the worked branching grammar scores exactly zero...
    auto fixture = make_motif(flat, words(t, {"Alice"}), words(t, {"very", "tired"}), 2);
    REQUIRE(fixture.has_value());
    CHECK(gain_fixed(*fixture) == 0);

    // ...but the two identical lines admit a line-spanning motif of gain 1,
    // which the search must find (verified against the enumeration).
    OracleMotif want = oracle_best_motif(seq.syms, params.max_gap);
    REQUIRE(want.found);
    CHECK(want.gain == 1);
    auto best = best_fixed_motif(flat, params, /*include_nonpositive=*/true);
    REQUIRE(best.has_value());
    CHECK(best->second == want.gain);
    CHECK(best->first.u == want.u);
    CHECK(best->first.v == want.v);
    CHECK(best->first.gap == want.k);
}

TEST_CASE("strings without shared contexts have no motif") {
    Grammar g = byte_grammar({"abcdef"});
    CHECK(!best_fixed_motif(g, {}, true).has_value());
}

TEST_CASE("stale realizations are rejected") {
    Grammar g = Grammar::single_rule(Sequence::from_bytes("pq1rspq2rspq3rs"));
    auto m = make_motif(g, bytes("pq"), bytes("rs"), 1);
    REQUIRE(m.has_value());
    Grammar changed = Grammar::single_rule(Sequence::from_bytes("zzzzzzzzzzzzzzz"));
    CHECK_THROWS_AS((void)replace_motif(changed, *m), std::invalid_argument);
}

TEST_CASE("realizations never overlap and order follows the derivation") {
    // Two-level nesting: the second motif's gap swallows an outer symbol of
    // the first, so one realization lives inside the spliced rule.
    std::mt19937 rng(5150);
    for (int round = 0; round < 80; ++round) {
        Grammar g = random_grammar(rng, true, true);
        REQUIRE(validate(g).empty());
        auto best = best_fixed_motif(g, {}, true);
        if (!best) continue;
        const MotifCandidate& m = best->first;
        for (size_t i = 1; i < m.realizations.size(); ++i) {
            if (m.realizations[i].rule != m.realizations[i - 1].rule) continue;
            int32_t prev_end = m.realizations[i - 1].offset +
                               static_cast<int32_t>(m.u.size() + m.expansions[i - 1].size() +
                                                    m.v.size());
            CHECK(m.realizations[i].offset >= prev_end);
        }
        Grammar after = replace_motif(g, m);
        REQUIRE(validate(after).empty());
        CHECK(expand(after) == expand(g));
    }
}
