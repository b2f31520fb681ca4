#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nrg/grammar.hpp"
#include "nrg/motif.hpp"
#include "nrg/repeat_index.hpp"

namespace nrg {

struct TraceStep {
    enum class Action { Repeat, Motif };
    int64_t step = 0;
    Action action = Action::Repeat;
    SymbolSeq u;       // repeat word, or motif left context
    SymbolSeq v;       // motif right context (empty for repeats)
    int32_t gap = 0;   // motif gap length
    int64_t gain = 0;
    int64_t size_after = 0;
};

struct RunTrace {
    enum class StopReason { NoPositiveGain, MaxIterations };
    std::vector<TraceStep> steps;
    StopReason stop = StopReason::NoPositiveGain;
};

struct InferenceResult {
    Grammar grammar;
    RunTrace trace;
};

struct PostResult {
    Grammar grammar;
    RunTrace trace;
    int64_t n_ctx = 0;  // branching pairs created
};

// Encoding a grammar naturally carries: fixed once branching rules exist
// (variable only when some inner rule has ragged expansions), plain rules
// being indifferent.
Encoding natural_encoding(const Grammar& g);
int64_t current_size(const Grammar& g);

// Factors the selected occurrences of rep.word into a fresh rule. The
// occurrences must still match the grammar text.
Grammar replace_repeat(const Grammar& g, const RepeatStats& rep);

// Iterated best-repeat replacement from {S -> s}; stops when no repeat has
// positive gain, or after max_iterations replacements.
InferenceResult greedy(const Sequence& s, std::optional<int64_t> max_iterations = {});

// Each round takes the better of the best exact repeat and the best
// fixed-gap motif, the motif winning ties; stops when neither gain is
// positive.
InferenceResult nrgreedy_fix(const Sequence& s, const MotifSearchParams& motif = {});

// Repeated best-motif replacement over a straight-line grammar, highest
// compression first. When the input has no positive-gain repeat left, the
// context search is restricted to single symbols. Throws
// std::invalid_argument when g is not straight-line.
PostResult post_process(const Grammar& g, const MotifSearchParams& motif = {});

}  // namespace nrg
