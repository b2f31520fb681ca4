#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nrg/grammar.hpp"

namespace nrg {

// One matched realization of a motif: u starts at `offset` in the plain
// body of `rule`, followed by the gap and then v.
struct Realization {
    int32_t rule = 0;
    int32_t offset = 0;

    friend bool operator==(const Realization&, const Realization&) = default;
};

// A context pattern u . v with either a fixed gap of k symbols or a
// variable gap (>= 1). Realizations are pairwise non-overlapping, selected
// leftmost-greedy, and stored in derivation order together with their gap
// contents (the future inner-rule expansions, duplicates preserved).
struct MotifCandidate {
    SymbolSeq u;
    SymbolSeq v;
    std::optional<int32_t> gap;  // nullopt = variable-length
    std::vector<Realization> realizations;
    std::vector<SymbolSeq> expansions;

    int64_t occ() const { return static_cast<int64_t>(realizations.size()); }
};

// Exact size reduction of rewriting a fixed-gap motif into an outer/inner
// pair under the fixed-length encoding: (|u|+|v|-1)(occ-1) - 4. The k*occ
// expansion symbols move from the occurrences into the inner rule and
// cancel, so the gap length never appears.
int64_t gain_fixed(const MotifCandidate& m);

// Size difference measured by building the rewritten grammar under the
// variable-length encoding; no closed form is assumed.
int64_t gain_variable(const MotifCandidate& m, const Grammar& g);

struct MotifSearchParams {
    int32_t max_context = 0;       // longest context length; 0 = unrestricted
    int32_t max_gap = 64;          // largest fixed gap searched
    int32_t exhaustive_limit = 48; // full pair scan when the space is this small
    int32_t top_repeats = 24;      // repeat contexts kept in the tiered search
    int32_t top_partners = 24;     // single-symbol partners paired with repeats
};

// Best fixed-gap motif over the searchable space: plain bodies derived
// exactly once (rewriting multiply-derived bodies would replicate
// expansions and break the gain accounting). Contexts are single symbols
// and maximal repeats; small spaces fall back to a full span-pair scan.
// Returns nullopt when the best gain is <= 0 unless include_nonpositive.
// Ties: larger gain, larger |u|+|v|, smaller k, lexicographically smaller
// (u, v).
std::optional<std::pair<MotifCandidate, int64_t>> best_fixed_motif(
    const Grammar& g, const MotifSearchParams& params = {}, bool include_nonpositive = false);

// Realizes (u, gap, v) over the searchable space of g: leftmost-greedy
// non-overlapping matches in derivation order, gaps free of inner symbols.
// For a variable gap each match takes the shortest available gap. Returns
// nullopt when there is no match.
std::optional<MotifCandidate> make_motif(const Grammar& g, const SymbolSeq& u,
                                         const SymbolSeq& v, std::optional<int32_t> gap);

// Rewrites every realization of m into a fresh outer/inner pair
// O -> u I v, I -> expansions. Throws std::invalid_argument when the
// realizations no longer match the grammar (stale candidate).
Grammar replace_motif(const Grammar& g, const MotifCandidate& m);

}  // namespace nrg
