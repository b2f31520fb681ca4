#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nrg/grammar.hpp"

namespace nrg {

// Suffix array over an arbitrary integer alphabet (values may be negative).
std::vector<int32_t> suffix_array(const std::vector<int32_t>& text);

// lcp[i] = longest common prefix of suffixes sa[i-1] and sa[i]; lcp[0] = 0.
std::vector<int32_t> lcp_array(const std::vector<int32_t>& text,
                               const std::vector<int32_t>& sa);

// A position inside a grammar: part == -1 addresses the plain body of
// `rule`, otherwise expansion `part` of an inner rule.
struct Located {
    int32_t rule = 0;
    int32_t part = -1;
    int32_t offset = 0;

    friend bool operator==(const Located&, const Located&) = default;
};

struct RepeatStats {
    SymbolSeq word;
    int64_t occ = 0;                  // maximal non-overlapping occurrence count
    std::vector<Located> positions;   // leftmost-greedy selected occurrences
};

// Suffix-array index over the concatenation of all searchable rule texts:
// every plain body plus the expansions of variable-length inner rules, each
// separated by a unique sentinel so no match spans two texts. Expansions of
// fixed-length inner rules are not indexed: rewriting inside them would
// break the uniform expansion length. The index is immutable; rebuild it
// after any grammar rewrite.
class RepeatIndex {
public:
    explicit RepeatIndex(const Grammar& g);

    // Index restricted to the plain bodies of the given rules.
    RepeatIndex(const Grammar& g, const std::vector<int32_t>& rule_subset);

    // All maximal repeats: length >= 2, occurring at least twice, where
    // neither all left nor all right extensions agree, reported with
    // leftmost-greedy non-overlapping occurrence counts (>= 2 required).
    std::vector<RepeatStats> maximal_repeats() const;

    // Number of maximal repeats only (cheaper than materializing them).
    int64_t maximal_repeat_count() const;

    // Non-overlapping occurrences of one word across all indexed texts.
    RepeatStats occ_nonoverlap(const SymbolSeq& word) const;

    // Every (possibly overlapping) occurrence, as sorted flat text offsets.
    std::vector<int32_t> all_positions(const SymbolSeq& word) const;

    // The repeat maximizing (|u|-1)(occ-1)-2; nullopt when no repeat has
    // positive gain. The maximal gain and the length of the winner match a
    // full subword search; ties at equal gain prefer longer words, then the
    // lexicographically smaller one among the enumerated candidates (words
    // always preceded by one identical symbol are represented by their
    // left-shifted, equal-gain twin).
    std::optional<std::pair<RepeatStats, int64_t>> best_repeat() const;

    // Raw views used by the motif search and by tests.
    const std::vector<int32_t>& text() const { return text_; }
    size_t text_size() const { return text_.size(); }
    bool is_sentinel(size_t pos) const { return text_[pos] < kSentinelBase; }
    Symbol symbol_at(size_t pos) const { return Symbol::from_raw(text_[pos]); }
    Located locate(size_t pos) const;

private:
    static constexpr int32_t kSentinelBase = -1000000000;

    struct Candidate {
        int32_t len;
        int32_t lo;  // shortest word length owned by this interval (>= 2)
        int32_t lb;
        int32_t rb;  // sa interval [lb, rb)
    };

    // Right-maximal, left-diverse lcp intervals of length >= 2.
    std::vector<Candidate> repeat_candidates() const;

    // Leftmost-greedy non-overlap selection among sorted text positions.
    static std::vector<int32_t> select_nonoverlap(std::vector<int32_t> positions, int32_t len);

    RepeatStats stats_for(const Candidate& c) const;
    SymbolSeq word_at(int32_t pos, int32_t len) const;

    std::vector<int32_t> text_;
    std::vector<int32_t> sa_;
    std::vector<int32_t> lcp_;
    std::vector<int32_t> doc_start_;   // sorted start offset per document
    std::vector<Located> doc_where_;   // rule/part of each document
};

// Convenience wrappers matching the per-grammar operations.
std::vector<RepeatStats> maximal_repeats(const Grammar& g);
RepeatStats occ_nonoverlap(const Grammar& g, const SymbolSeq& w);
std::optional<std::pair<RepeatStats, int64_t>> best_repeat(const Grammar& g);

// Exact size reduction of factoring a repeat into a fresh rule.
inline int64_t repeat_gain(int64_t word_len, int64_t occ) {
    return (word_len - 1) * (occ - 1) - 2;
}

}  // namespace nrg
