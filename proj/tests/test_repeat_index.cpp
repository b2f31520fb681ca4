#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "nrg/encoder.hpp"
#include "nrg/inference.hpp"
#include "nrg/repeat_index.hpp"
#include "oracles.hpp"

using namespace nrg;
using namespace nrg::testing;

namespace {

SymbolSeq bytes(const std::string& s) {
    SymbolSeq out;
    for (unsigned char c : s) out.push_back(Symbol::terminal(c));
    return out;
}

std::string to_string(const SymbolSeq& s) {
    std::string out;
    for (Symbol x : s) out.push_back(static_cast<char>(x.terminal_value()));
    return out;
}

}  // namespace

TEST_CASE("maximal repeats of the worked strings") {
    auto abab = maximal_repeats(byte_grammar({"abab"}));
    REQUIRE(abab.size() == 1);
    CHECK(to_string(abab[0].word) == "ab");
    CHECK(abab[0].occ == 2);

    // "aaa" occurs twice but its occurrences overlap; only "aa" survives.
    auto aaaa = maximal_repeats(byte_grammar({"aaaa"}));
    REQUIRE(aaaa.size() == 1);
    CHECK(to_string(aaaa[0].word) == "aa");
    CHECK(aaaa[0].occ == 2);
    REQUIRE(aaaa[0].positions.size() == 2);
    CHECK(aaaa[0].positions[0].offset == 0);
    CHECK(aaaa[0].positions[1].offset == 2);
}

TEST_CASE("maximal repeats match the brute-force enumeration") {
    std::mt19937 rng(321);
    for (int round = 0; round < 150; ++round) {
        size_t len = 5 + static_cast<size_t>(rng() % 36);
        int alpha = 2 + static_cast<int>(rng() % 2);
        SymbolSeq s = random_symbols(rng, len, alpha);
        Grammar g;
        g.mode = AlphabetMode::Byte;
        g.rules.push_back(Rule::make_plain(s));

        auto got = maximal_repeats(g);
        auto want = oracle_maximal_repeats(s);
        std::sort(want.begin(), want.end(),
                  [](const auto& a, const auto& b) { return seq_less(a.first, b.first); });
        REQUIRE(got.size() == want.size());
        for (size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].word == want[i].first);
            CHECK(got[i].occ == static_cast<int64_t>(want[i].second));
        }
    }
}

TEST_CASE("non-overlapping occurrence counts, exhaustive over short binary strings") {
    for (size_t len = 1; len <= 12; ++len) {
        for (uint32_t bits = 0; bits < (1u << len); ++bits) {
            SymbolSeq s;
            for (size_t i = 0; i < len; ++i)
                s.push_back(Symbol::terminal((bits >> i) & 1 ? 'b' : 'a'));
            Grammar g;
            g.mode = AlphabetMode::Byte;
            g.rules.push_back(Rule::make_plain(s));
            RepeatIndex idx(g);

            std::set<SymbolSeq> words;
            for (size_t i = 0; i < len; ++i)
                for (size_t l = 1; i + l <= len; ++l)
                    words.insert(SymbolSeq(s.begin() + static_cast<std::ptrdiff_t>(i),
                                           s.begin() + static_cast<std::ptrdiff_t>(i + l)));
            for (const auto& w : words) {
                auto got = idx.occ_nonoverlap(w);
                auto want = oracle_nonoverlap_positions(s, w);
                REQUIRE(got.occ == static_cast<int64_t>(want.size()));
                for (size_t i = 0; i < want.size(); ++i)
                    CHECK(got.positions[i].offset == static_cast<int32_t>(want[i]));
            }
        }
    }
}

TEST_CASE("occurrence counting basics") {
    Grammar g = byte_grammar({"aaaa"});
    auto st = occ_nonoverlap(g, bytes("aa"));
    CHECK(st.occ == 2);
    REQUIRE(st.positions.size() == 2);
    CHECK(st.positions[0].offset == 0);
    CHECK(st.positions[1].offset == 2);

    CHECK(occ_nonoverlap(byte_grammar({"ababa"}), bytes("aba")).occ == 1);

    // Words never match across rule boundaries.
    CHECK(occ_nonoverlap(byte_grammar({"ab", "ba"}), bytes("ab")).occ == 1);
    CHECK(occ_nonoverlap(byte_grammar({"ab", "ba"}), bytes("bb")).occ == 0);
    CHECK(occ_nonoverlap(byte_grammar({"xab", "aby"}), bytes("ab")).occ == 2);
}

TEST_CASE("repeat gain arithmetic") {
    CHECK(repeat_gain(3, 4) == 4);
    CHECK(repeat_gain(5, 1) == -2);
    CHECK(repeat_gain(1, 9) == -2);
}

TEST_CASE("best repeat equals the exhaustive subword maximizer") {
    std::mt19937 rng(777);
    for (int round = 0; round < 250; ++round) {
        size_t len = 6 + static_cast<size_t>(rng() % 28);
        int alpha = 2 + static_cast<int>(rng() % 2);
        SymbolSeq s = random_symbols(rng, len, alpha);
        Grammar g;
        g.mode = AlphabetMode::Byte;
        g.rules.push_back(Rule::make_plain(s));

        // Oracle: best gain over every subword of length >= 2 with the same
        // tie-breaking (longer word, then lexicographically smaller).
        std::set<SymbolSeq> words;
        for (size_t i = 0; i < len; ++i)
            for (size_t l = 2; i + l <= len; ++l)
                words.insert(SymbolSeq(s.begin() + static_cast<std::ptrdiff_t>(i),
                                       s.begin() + static_cast<std::ptrdiff_t>(i + l)));
        int64_t want_gain = 0;
        const SymbolSeq* want_word = nullptr;
        for (const auto& w : words) {
            auto occ = static_cast<int64_t>(oracle_nonoverlap_positions(s, w).size());
            if (occ < 2) continue;
            int64_t gain = repeat_gain(static_cast<int64_t>(w.size()), occ);
            if (gain <= 0) continue;
            if (!want_word || gain > want_gain ||
                (gain == want_gain && (w.size() > want_word->size() ||
                                       (w.size() == want_word->size() && seq_less(w, *want_word))))) {
                want_gain = gain;
                want_word = &w;
            }
        }

        auto got = best_repeat(g);
        if (!want_word) {
            CHECK(!got.has_value());
        } else {
            REQUIRE(got.has_value());
            CHECK(got->second == want_gain);
            // The winning gain and length are canonical; the word itself may
            // be the left-shifted twin of the lexicographic minimum.
            CHECK(got->first.word.size() == want_word->size());
            auto verify = oracle_nonoverlap_positions(s, got->first.word);
            CHECK(repeat_gain(static_cast<int64_t>(got->first.word.size()),
                              static_cast<int64_t>(verify.size())) == want_gain);
        }
    }
}

TEST_CASE("repeat gain equals the encoded-size difference") {
    std::mt19937 rng(4242);
    for (int round = 0; round < 200; ++round) {
        Grammar g = random_grammar(rng, round % 2 == 1);
        REQUIRE(validate(g).empty());
        RepeatIndex idx(g);
        for (const RepeatStats& rep : idx.maximal_repeats()) {
            if (rep.occ < 2) continue;
            Grammar after = replace_repeat(g, rep);
            REQUIRE(validate(after).empty());
            Encoding enc = natural_encoding(g);
            int64_t diff = stream_length(g, enc) - stream_length(after, enc);
            CHECK(repeat_gain(static_cast<int64_t>(rep.word.size()), rep.occ) == diff);
            CHECK(expand(after) == expand(g));
        }
    }
}
