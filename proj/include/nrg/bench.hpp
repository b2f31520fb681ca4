#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nrg/inference.hpp"

namespace nrg {

struct BenchConfig {
    enum class Corpus { Dna, Canterbury, Custom };
    Corpus corpus = Corpus::Custom;
    std::vector<std::string> files;       // custom corpus paths
    std::vector<std::string> algorithms;  // subset of {greedy, nrgreedy-fix, post}
    std::string cache_dir = "corpus_cache";
    bool records = false;                 // line-delimited records instead of a table
    int32_t jobs = 1;
    std::optional<int64_t> max_iter;      // cap for the greedy stage
    MotifSearchParams motif;
};

struct CorpusFile {
    std::string name;
    int64_t expected_length;  // bytes; 0 = unknown
    std::string url;          // empty when only available via the fetch script
};

const std::vector<CorpusFile>& dna_corpus();
const std::vector<CorpusFile>& canterbury_corpus();

// Local paths for the selected corpus, fetched into cfg.cache_dir when
// missing and a URL is usable. First sight of a file pins its checksum
// beside the cache; later runs verify it. Throws std::runtime_error on a
// cache miss without network and on checksum or length mismatches.
std::vector<std::string> fetch_corpus(const BenchConfig& cfg);

// Per-file statistics and per-algorithm grammar sizes. Every printed size
// was re-verified by stream_length and a full decode round-trip against the
// input bytes. One failing file reports its error and does not abort the
// run. Returns the number of failed files.
int run_bench(const BenchConfig& cfg, std::ostream& out);

// Early-stopping sweep: for each greedy iteration cap, post-process and
// score the induced brackets against a gold treebank. The corpus file holds
// one sentence of whitespace-separated tokens per line.
struct SweepPoint {
    int64_t stop;
    int64_t greedy_size;
    int64_t post_size;
    int64_t n_ctx;
    int64_t context_scored, inside_scored, straightline_scored;
    double context_precision, inside_precision, straightline_precision;
    double context_non_crossing, inside_non_crossing, straightline_non_crossing;
};
std::vector<SweepPoint> run_sweep(const std::string& corpus_path, const std::string& gold_path,
                                  const std::vector<int64_t>& stops,
                                  const MotifSearchParams& motif = {});
void print_sweep(const std::vector<SweepPoint>& points, bool records, std::ostream& out);

// Shared helpers for the command-line tool.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view data);
Sequence load_sequence(const std::string& path, AlphabetMode mode);

// Sanity gate used before any size is reported: the encoded stream length
// matches the arithmetic size and decodes back to the exact input.
bool verify_grammar(const Grammar& g, const SymbolSeq& original);

}  // namespace nrg
