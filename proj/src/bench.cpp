#include "nrg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "nrg/bracket.hpp"
#include "nrg/encoder.hpp"

namespace nrg {

namespace fs = std::filesystem;

const std::vector<CorpusFile>& dna_corpus() {
    static const std::vector<CorpusFile> files = {
        {"chmpxx", 121024, ""},  {"chntxx", 155844, ""},  {"hehcmv", 229354, ""},
        {"humdyst", 38770, ""},  {"humghcs", 66495, ""},  {"humhbb", 73308, ""},
        {"humhdab", 58864, ""},  {"humprtb", 56737, ""},  {"mpomtcg", 186609, ""},
        {"mtpacga", 100314, ""}, {"vaccg", 191737, ""},
    };
    return files;
}

const std::vector<CorpusFile>& canterbury_corpus() {
    static const std::vector<CorpusFile> files = {
        {"alice29.txt", 152089, ""}, {"asyoulik.txt", 125179, ""}, {"cp.html", 24603, ""},
        {"fields.c", 11150, ""},     {"grammar.lsp", 3721, ""},    {"kennedy.xls", 1029744, ""},
        {"lcet10.txt", 426754, ""},  {"plrabn12.txt", 481861, ""}, {"ptt5", 513216, ""},
        {"sum", 38240, ""},          {"xargs.1", 4227, ""},
    };
    return files;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return std::move(ss).str();
}

void write_file(const std::string& path, std::string_view data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

Sequence load_sequence(const std::string& path, AlphabetMode mode) {
    std::string data = read_file(path);
    return mode == AlphabetMode::Byte ? Sequence::from_bytes(data) : Sequence::from_tokens(data);
}

namespace {

uint64_t fnv1a(std::string_view data) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Checksums pinned at first sight, stored beside the cache.
class ChecksumStore {
public:
    explicit ChecksumStore(const fs::path& dir) : path_(dir / "checksums.txt") {
        std::ifstream f(path_);
        std::string name;
        uint64_t size, sum;
        while (f >> name >> size >> sum) entries_[name] = {size, sum};
    }

    void check_or_pin(const std::string& name, std::string_view data) {
        auto it = entries_.find(name);
        if (it == entries_.end()) {
            entries_[name] = {data.size(), fnv1a(data)};
            save();
            return;
        }
        if (it->second.first != data.size() || it->second.second != fnv1a(data))
            throw std::runtime_error("checksum mismatch for cached corpus file: " + name);
    }

private:
    void save() const {
        std::ofstream f(path_, std::ios::trunc);
        for (const auto& [name, v] : entries_) f << name << " " << v.first << " " << v.second << "\n";
    }

    fs::path path_;
    std::map<std::string, std::pair<uint64_t, uint64_t>> entries_;
};

}  // namespace

std::vector<std::string> fetch_corpus(const BenchConfig& cfg) {
    if (cfg.corpus == BenchConfig::Corpus::Custom) {
        std::vector<std::string> out;
        for (const std::string& p : cfg.files) {
            if (!fs::exists(p)) throw std::runtime_error("corpus file does not exist: " + p);
            out.push_back(p);
        }
        return out;
    }

    const auto& manifest =
        cfg.corpus == BenchConfig::Corpus::Dna ? dna_corpus() : canterbury_corpus();
    fs::create_directories(cfg.cache_dir);
    ChecksumStore sums{fs::path(cfg.cache_dir)};

    std::vector<std::string> out;
    std::vector<std::string> missing;
    for (const CorpusFile& cf : manifest) {
        fs::path p = fs::path(cfg.cache_dir) / cf.name;
        if (!fs::exists(p)) {
            missing.push_back(cf.name);
            continue;
        }
        std::string data = read_file(p.string());
        if (cf.expected_length > 0 && static_cast<int64_t>(data.size()) != cf.expected_length)
            throw std::runtime_error("cached " + cf.name + " has " + std::to_string(data.size()) +
                                     " bytes, expected " + std::to_string(cf.expected_length));
        sums.check_or_pin(cf.name, data);
        out.push_back(p.string());
    }
    if (!missing.empty()) {
        std::string list;
        for (const std::string& name : missing) list += " " + name;
        throw std::runtime_error(
            "corpus cache miss (no network fetch available for archived corpora):" + list +
            "\npopulate '" + cfg.cache_dir + "' via scripts/fetch_corpora.sh");
    }
    return out;
}

bool verify_grammar(const Grammar& g, const SymbolSeq& original) {
    Encoding enc = natural_encoding(g);
    EncodedStream s = encode(g, enc);
    if (s.length() != stream_length(g, enc)) return false;
    DecodeResult back = decode(s);
    return back.target == original;
}

namespace {

std::string json_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
            out.push_back(c);
        } else if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out += buf;
        } else {
            out.push_back(c);
        }
    }
    return out;
}

struct AlgoOutcome {
    std::string algo;
    int64_t size = 0;
    int64_t rules = 0;
    int64_t n_ctx = -1;  // post only
    double seconds = 0.0;
    bool verified = false;
};

struct FileOutcome {
    std::string name;
    bool failed = false;
    std::string error;
    int64_t length = 0;
    int64_t sigma = 0;
    double repeats_per_symbol = 0.0;
    std::vector<AlgoOutcome> algos;
};

FileOutcome bench_one(const std::string& path, const BenchConfig& cfg) {
    FileOutcome fo;
    fo.name = fs::path(path).filename().string();
    try {
        Sequence seq = load_sequence(path, AlphabetMode::Byte);
        fo.length = static_cast<int64_t>(seq.syms.size());
        std::set<int32_t> sigma;
        for (Symbol s : seq.syms) sigma.insert(s.terminal_value());
        fo.sigma = static_cast<int64_t>(sigma.size());
        {
            Grammar flat = Grammar::single_rule(seq);
            fo.repeats_per_symbol = fo.length == 0
                                        ? 0.0
                                        : static_cast<double>(
                                              RepeatIndex(flat).maximal_repeat_count()) /
                                              static_cast<double>(fo.length);
        }

        std::optional<InferenceResult> greedy_run;
        auto need = [&](const std::string& a) {
            return std::find(cfg.algorithms.begin(), cfg.algorithms.end(), a) !=
                   cfg.algorithms.end();
        };
        auto clock = [] { return std::chrono::steady_clock::now(); };
        auto secs = [](auto a, auto b) {
            return std::chrono::duration<double>(b - a).count();
        };

        if (need("greedy") || need("post")) {
            auto t0 = clock();
            greedy_run = greedy(seq, cfg.max_iter);
            double dt = secs(t0, clock());
            if (need("greedy")) {
                AlgoOutcome ao;
                ao.algo = "greedy";
                ao.size = current_size(greedy_run->grammar);
                ao.rules = greedy_run->grammar.n_rules();
                ao.seconds = dt;
                ao.verified = verify_grammar(greedy_run->grammar, seq.syms);
                fo.algos.push_back(ao);
            }
        }
        if (need("nrgreedy-fix")) {
            auto t0 = clock();
            auto run = nrgreedy_fix(seq, cfg.motif);
            AlgoOutcome ao;
            ao.algo = "nrgreedy-fix";
            ao.size = current_size(run.grammar);
            ao.rules = run.grammar.n_rules();
            ao.seconds = secs(t0, clock());
            ao.verified = verify_grammar(run.grammar, seq.syms);
            fo.algos.push_back(ao);
        }
        if (need("post")) {
            auto t0 = clock();
            auto run = post_process(greedy_run->grammar, cfg.motif);
            AlgoOutcome ao;
            ao.algo = "post";
            ao.size = current_size(run.grammar);
            ao.rules = run.grammar.n_rules();
            ao.n_ctx = run.n_ctx;
            ao.seconds = secs(t0, clock());
            ao.verified = verify_grammar(run.grammar, seq.syms);
            fo.algos.push_back(ao);
        }
    } catch (const std::exception& e) {
        fo.failed = true;
        fo.error = e.what();
    }
    return fo;
}

void print_outcome(const FileOutcome& fo, bool records, std::ostream& out) {
    if (fo.failed) {
        if (records)
            out << "{\"file\":\"" << json_escape(fo.name) << "\",\"error\":\""
                << json_escape(fo.error) << "\"}\n";
        else
            out << fo.name << "  FAILED: " << fo.error << "\n";
        return;
    }
    if (records) {
        char rps[32];
        std::snprintf(rps, sizeof rps, "%.4f", fo.repeats_per_symbol);
        out << "{\"file\":\"" << json_escape(fo.name) << "\",\"kind\":\"stats\",\"length\":"
            << fo.length << ",\"sigma\":" << fo.sigma << ",\"repeats_per_symbol\":" << rps
            << "}\n";
        for (const AlgoOutcome& ao : fo.algos) {
            out << "{\"file\":\"" << json_escape(fo.name) << "\",\"kind\":\"result\",\"algo\":\""
                << ao.algo << "\",\"size\":" << ao.size << ",\"rules\":" << ao.rules;
            if (ao.n_ctx >= 0) out << ",\"n_ctx\":" << ao.n_ctx;
            char sec[32];
            std::snprintf(sec, sizeof sec, "%.3f", ao.seconds);
            out << ",\"seconds\":" << sec << ",\"verified\":" << (ao.verified ? "true" : "false")
                << "}\n";
        }
        return;
    }
    char rps[32];
    std::snprintf(rps, sizeof rps, "%7.2f", fo.repeats_per_symbol);
    out << fo.name;
    for (size_t i = fo.name.size(); i < 16; ++i) out << ' ';
    out << " len=" << fo.length << " sigma=" << fo.sigma << " rep/len=" << rps;
    for (const AlgoOutcome& ao : fo.algos) {
        out << "  " << ao.algo << "=" << ao.size;
        if (ao.n_ctx >= 0) out << " #ctx=" << ao.n_ctx;
        char sec[32];
        std::snprintf(sec, sizeof sec, "%.1fs", ao.seconds);
        out << " (" << sec << (ao.verified ? ", verified)" : ", VERIFY FAILED)");
    }
    out << "\n";
}

}  // namespace

int run_bench(const BenchConfig& cfg, std::ostream& out) {
    std::vector<std::string> paths = fetch_corpus(cfg);
    std::sort(paths.begin(), paths.end(), [](const std::string& a, const std::string& b) {
        return fs::path(a).filename().string() < fs::path(b).filename().string();
    });

    std::vector<FileOutcome> outcomes(paths.size());
    const int32_t jobs = std::max<int32_t>(1, cfg.jobs);
    if (jobs == 1) {
        for (size_t i = 0; i < paths.size(); ++i) outcomes[i] = bench_one(paths[i], cfg);
    } else {
        std::vector<std::future<std::pair<size_t, FileOutcome>>> futs;
        size_t next = 0;
        while (next < paths.size() || !futs.empty()) {
            while (next < paths.size() && static_cast<int32_t>(futs.size()) < jobs) {
                const size_t i = next++;
                const std::string& p = paths[i];
                futs.push_back(std::async(std::launch::async, [&cfg, p, i] {
                    return std::make_pair(i, bench_one(p, cfg));
                }));
            }
            if (!futs.empty()) {
                auto [i, fo] = futs.front().get();
                futs.erase(futs.begin());
                outcomes[i] = std::move(fo);
            }
        }
    }

    int failures = 0;
    for (const FileOutcome& fo : outcomes) {
        print_outcome(fo, cfg.records, out);
        if (fo.failed) ++failures;
        for (const AlgoOutcome& ao : fo.algos)
            if (!ao.verified) ++failures;
    }
    return failures;
}

std::vector<SweepPoint> run_sweep(const std::string& corpus_path, const std::string& gold_path,
                                  const std::vector<int64_t>& stops,
                                  const MotifSearchParams& motif) {
    std::string corpus_text = read_file(corpus_path);
    Sequence seq = Sequence::from_tokens(corpus_text);
    GoldTreebank gold = GoldTreebank::parse(read_file(gold_path));

    std::vector<int32_t> sentence_lengths;
    {
        size_t at = 0;
        while (at < corpus_text.size()) {
            size_t eol = corpus_text.find('\n', at);
            if (eol == std::string_view::npos) eol = corpus_text.size();
            Sequence line = Sequence::from_tokens(
                std::string_view(corpus_text).substr(at, eol - at));
            if (!line.syms.empty())
                sentence_lengths.push_back(static_cast<int32_t>(line.syms.size()));
            at = eol + 1;
        }
    }

    std::vector<SweepPoint> out;
    for (int64_t stop : stops) {
        auto base = greedy(seq, stop > 0 ? std::optional<int64_t>(stop) : std::nullopt);
        auto post = post_process(base.grammar, motif);
        auto brackets = extract_brackets(post.grammar, sentence_lengths);
        ScoreReport rep = score(brackets, gold);

        SweepPoint p{};
        p.stop = stop;
        p.greedy_size = current_size(base.grammar);
        p.post_size = current_size(post.grammar);
        p.n_ctx = post.n_ctx;
        p.context_scored = rep.context.scored;
        p.inside_scored = rep.inside.scored;
        p.straightline_scored = rep.straightline.scored;
        p.context_precision = rep.context.precision;
        p.inside_precision = rep.inside.precision;
        p.straightline_precision = rep.straightline.precision;
        p.context_non_crossing = rep.context.non_crossing_pct;
        p.inside_non_crossing = rep.inside.non_crossing_pct;
        p.straightline_non_crossing = rep.straightline.non_crossing_pct;
        out.push_back(p);
    }
    return out;
}

void print_sweep(const std::vector<SweepPoint>& points, bool records, std::ostream& out) {
    for (const SweepPoint& p : points) {
        if (records) {
            char buf[512];
            std::snprintf(buf, sizeof buf,
                          "{\"stop\":%lld,\"greedy_size\":%lld,\"post_size\":%lld,"
                          "\"n_ctx\":%lld,\"context\":{\"scored\":%lld,\"precision\":%.4f,"
                          "\"non_crossing\":%.4f},\"inside\":{\"scored\":%lld,\"precision\":%.4f,"
                          "\"non_crossing\":%.4f},\"straightline\":{\"scored\":%lld,"
                          "\"precision\":%.4f,\"non_crossing\":%.4f}}",
                          static_cast<long long>(p.stop), static_cast<long long>(p.greedy_size),
                          static_cast<long long>(p.post_size), static_cast<long long>(p.n_ctx),
                          static_cast<long long>(p.context_scored), p.context_precision,
                          p.context_non_crossing, static_cast<long long>(p.inside_scored),
                          p.inside_precision, p.inside_non_crossing,
                          static_cast<long long>(p.straightline_scored),
                          p.straightline_precision, p.straightline_non_crossing);
            out << buf << "\n";
        } else {
            char buf[512];
            std::snprintf(buf, sizeof buf,
                          "stop=%-8lld post=%-8lld ctx=%-5lld context %.3f/%.3f  inside "
                          "%.3f/%.3f  straightline %.3f/%.3f (precision/non-crossing)",
                          static_cast<long long>(p.stop), static_cast<long long>(p.post_size),
                          static_cast<long long>(p.n_ctx), p.context_precision,
                          p.context_non_crossing, p.inside_precision, p.inside_non_crossing,
                          p.straightline_precision, p.straightline_non_crossing);
            out << buf << "\n";
        }
    }
}

}  // namespace nrg
