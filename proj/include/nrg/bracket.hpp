#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nrg/grammar.hpp"

namespace nrg {

// A predicted span over one sentence, half-open token offsets.
struct Bracket {
    enum class Kind { Context, Inside, Straightline };
    int32_t sentence = 0;
    int32_t start = 0;
    int32_t end = 0;
    Kind kind = Kind::Straightline;

    friend bool operator==(const Bracket&, const Bracket&) = default;
};

// Gold constituency spans read from bracketed-parse text (one parenthesized
// tree per line). Labels are ignored; only spans count.
struct GoldTreebank {
    struct Sentence {
        std::vector<std::string> tokens;
        std::vector<std::pair<int32_t, int32_t>> brackets;  // well-nested spans
    };
    std::vector<Sentence> sentences;

    // Parses text such as "(S (NP (DT the) (NN cat)) (VP (VBD slept)))".
    // Throws std::invalid_argument on malformed input.
    static GoldTreebank parse(std::string_view text);
};

// Brackets induced by one full derivation of the grammar over a
// sentence-segmented corpus (lengths in tokens, concatenated = expansion of
// g). Each occurrence of a branching pair yields one inside bracket over
// the expansion and one context bracket over prefix+expansion+suffix; each
// plain nonterminal occurrence yields a straightline bracket over its
// yield. Brackets crossing a sentence boundary are dropped. Throws
// std::invalid_argument when the grammar does not derive the corpus.
std::vector<Bracket> extract_brackets(const Grammar& g,
                                      const std::vector<int32_t>& sentence_lengths);

struct KindScore {
    int64_t extracted = 0;  // before filtering
    int64_t filtered = 0;   // dropped as singleton or sentence-wide
    int64_t scored = 0;
    int64_t matched = 0;
    int64_t non_crossing = 0;
    double precision = 0.0;
    double non_crossing_pct = 0.0;
};

struct ScoreReport {
    KindScore context, inside, straightline, overall;
};

// Unlabeled multiset precision and non-crossing percentage per bracket
// kind, after removing singleton and sentence-wide spans. Two spans cross
// when they overlap and neither contains the other. Throws
// std::out_of_range for sentence ids outside the treebank.
ScoreReport score(const std::vector<Bracket>& pred, const GoldTreebank& gold);

// Tab-separated export: sentence, start, end, kind.
std::string brackets_to_tsv(const std::vector<Bracket>& pred);

}  // namespace nrg
