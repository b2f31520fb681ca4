#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nrg/bench.hpp"
#include "nrg/bracket.hpp"
#include "nrg/encoder.hpp"
#include "nrg/inference.hpp"
#include "nrg/synth.hpp"
#include "nrg/text_format.hpp"

using namespace nrg;

namespace {

AlphabetMode parse_mode(const std::string& mode) {
    if (mode == "byte") return AlphabetMode::Byte;
    if (mode == "token") return AlphabetMode::Token;
    throw CLI::ValidationError("--mode must be byte or token");
}

std::string render_target(const Grammar& g, const SymbolSeq& target) {
    std::string out;
    if (g.mode == AlphabetMode::Byte) {
        out.reserve(target.size());
        for (Symbol s : target) out.push_back(static_cast<char>(s.terminal_value()));
    } else {
        for (size_t i = 0; i < target.size(); ++i) {
            if (i > 0) out.push_back(' ');
            out += g.tokens.name(target[i].terminal_value());
        }
        out.push_back('\n');
    }
    return out;
}

void write_trace(const std::string& path, const RunTrace& trace) {
    std::string out;
    for (const TraceStep& ts : trace.steps) {
        out += "{\"step\":" + std::to_string(ts.step) + ",\"action\":\"";
        out += ts.action == TraceStep::Action::Repeat ? "repeat" : "motif";
        out += "\",\"gain\":" + std::to_string(ts.gain) +
               ",\"size_after\":" + std::to_string(ts.size_after);
        if (ts.action == TraceStep::Action::Motif) out += ",\"gap\":" + std::to_string(ts.gap);
        out += "}\n";
    }
    write_file(path, out);
}

std::vector<int64_t> parse_stops(const std::string& csv) {
    std::vector<int64_t> out;
    size_t at = 0;
    while (at < csv.size()) {
        size_t comma = csv.find(',', at);
        if (comma == std::string::npos) comma = csv.size();
        out.push_back(std::stoll(csv.substr(at, comma - at)));
        at = comma + 1;
    }
    return out;
}

std::vector<int32_t> sentence_lengths_of(const std::string& corpus_text) {
    std::vector<int32_t> lengths;
    size_t at = 0;
    while (at < corpus_text.size()) {
        size_t eol = corpus_text.find('\n', at);
        if (eol == std::string::npos) eol = corpus_text.size();
        Sequence line =
            Sequence::from_tokens(std::string_view(corpus_text).substr(at, eol - at));
        if (!line.syms.empty()) lengths.push_back(static_cast<int32_t>(line.syms.size()));
        at = eol + 1;
    }
    return lengths;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"non-recursive grammar inference and evaluation"};
    app.require_subcommand(1);

    auto* stats = app.add_subcommand("stats", "sequence statistics (length, alphabet, repeats)");
    std::vector<std::string> stats_files;
    bool stats_records = false;
    stats->add_option("files", stats_files, "input files")->required();
    stats->add_flag("--records", stats_records, "line-delimited records");

    auto* infer = app.add_subcommand("infer", "infer a grammar from a sequence");
    std::string infer_input, infer_algo = "greedy", infer_mode = "byte";
    std::string infer_out, infer_trace;
    std::optional<int64_t> infer_max_iter;
    int32_t infer_max_gap = 64;
    infer->add_option("input", infer_input, "input file")->required();
    infer->add_option("--algo", infer_algo, "greedy or nrgreedy-fix");
    infer->add_option("--mode", infer_mode, "byte or token alphabet");
    infer->add_option("--max-iter", infer_max_iter, "stop the greedy loop early");
    infer->add_option("--max-gap", infer_max_gap, "largest motif gap searched");
    infer->add_option("-o,--out", infer_out, "grammar output path");
    infer->add_option("--trace", infer_trace, "write per-iteration records here");

    auto* post_cmd = app.add_subcommand("post", "generalize a straight-line grammar");
    std::string post_grammar, post_out, post_trace;
    int32_t post_max_gap = 64;
    post_cmd->add_option("--grammar", post_grammar, "grammar text file")->required();
    post_cmd->add_option("-o,--out", post_out, "output grammar path");
    post_cmd->add_option("--max-gap", post_max_gap, "largest motif gap searched");
    post_cmd->add_option("--trace", post_trace, "write per-iteration records here");

    auto* enc_cmd = app.add_subcommand("encode", "serialize a grammar to a symbol stream");
    std::string enc_grammar, enc_out, enc_encoding = "fixed";
    enc_cmd->add_option("--grammar", enc_grammar, "grammar text file")->required();
    enc_cmd->add_option("--encoding", enc_encoding, "fixed or variable");
    enc_cmd->add_option("-o,--out", enc_out, "stream output path")->required();

    auto* dec_cmd = app.add_subcommand("decode", "recover the sequence from a stream");
    std::string dec_input, dec_out;
    dec_cmd->add_option("input", dec_input, "stream file")->required();
    dec_cmd->add_option("-o,--out", dec_out, "decoded output path (stdout when absent)");

    auto* br_cmd = app.add_subcommand("brackets", "score induced brackets against gold trees");
    std::string br_grammar, br_corpus, br_gold, br_pred_out;
    br_cmd->add_option("--grammar", br_grammar, "grammar text file")->required();
    br_cmd->add_option("--corpus", br_corpus, "one sentence per line, tokens")->required();
    br_cmd->add_option("--gold", br_gold, "bracketed-parse text, one tree per line")->required();
    br_cmd->add_option("--pred-out", br_pred_out, "write predicted spans as TSV");

    auto* synth_cmd = app.add_subcommand("synth-table", "generate a fixed-field record table");
    TableSpec spec;
    std::string synth_out;
    synth_cmd->add_option("--rows", spec.rows, "table rows");
    synth_cmd->add_option("--cols", spec.cols, "table columns");
    synth_cmd->add_option("--width", spec.field_width, "digits per filled cell");
    synth_cmd->add_option("--fill", spec.fill_ratio, "fraction of filled cells");
    synth_cmd->add_option("--value-alphabet", spec.value_alphabet,
                          "distinct value symbols per field position");
    synth_cmd->add_option("--seed", spec.seed, "generator seed");
    synth_cmd->add_option("--out", synth_out, "output path")->required();

    auto* bench_cmd = app.add_subcommand("bench", "corpus benchmark harness");
    BenchConfig cfg;
    if (const char* env = std::getenv("NRG_CORPUS_DIR")) cfg.cache_dir = env;
    std::string bench_corpus = "custom", bench_algos = "greedy,post";
    bench_cmd->add_option("--corpus", bench_corpus, "dna, canterbury or custom");
    bench_cmd->add_option("--files", cfg.files, "custom corpus paths");
    bench_cmd->add_option("--algorithms", bench_algos, "comma list: greedy,nrgreedy-fix,post");
    bench_cmd->add_option("--cache", cfg.cache_dir, "corpus cache directory");
    bench_cmd->add_option("--jobs", cfg.jobs, "parallel worker count");
    bench_cmd->add_option("--max-iter", cfg.max_iter, "greedy iteration cap");
    bench_cmd->add_flag("--records", cfg.records, "line-delimited records");

    auto* sweep_cmd = app.add_subcommand("sweep", "early-stopping bracket-quality sweep");
    std::string sweep_corpus, sweep_gold, sweep_stops = "0";
    bool sweep_records = false;
    sweep_cmd->add_option("--corpus", sweep_corpus, "token corpus, one sentence per line")
        ->required();
    sweep_cmd->add_option("--gold", sweep_gold, "gold treebank")->required();
    sweep_cmd->add_option("--stops", sweep_stops, "comma list of greedy iteration caps");
    sweep_cmd->add_flag("--records", sweep_records, "line-delimited records");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*stats) {
            BenchConfig sc;
            sc.corpus = BenchConfig::Corpus::Custom;
            sc.files = stats_files;
            sc.records = stats_records;
            return run_bench(sc, std::cout) == 0 ? 0 : 2;
        }

        if (*infer) {
            Sequence seq = load_sequence(infer_input, parse_mode(infer_mode));
            MotifSearchParams motif;
            motif.max_gap = infer_max_gap;
            InferenceResult res;
            if (infer_algo == "greedy")
                res = greedy(seq, infer_max_iter);
            else if (infer_algo == "nrgreedy-fix")
                res = nrgreedy_fix(seq, motif);
            else
                throw std::runtime_error("unknown --algo: " + infer_algo);
            if (!verify_grammar(res.grammar, seq.syms))
                throw std::runtime_error("internal verification failed");
            std::cout << "size " << current_size(res.grammar) << " rules "
                      << res.grammar.n_rules() << " iterations " << res.trace.steps.size()
                      << "\n";
            if (!infer_out.empty()) write_file(infer_out, export_text(res.grammar));
            if (!infer_trace.empty()) write_trace(infer_trace, res.trace);
            return 0;
        }

        if (*post_cmd) {
            Grammar g = import_text(read_file(post_grammar));
            MotifSearchParams motif;
            motif.max_gap = post_max_gap;
            int64_t before = current_size(g);
            PostResult res = post_process(g, motif);
            if (!verify_grammar(res.grammar, expand(g)))
                throw std::runtime_error("internal verification failed");
            std::cout << "size " << before << " -> " << current_size(res.grammar) << " contexts "
                      << res.n_ctx << "\n";
            if (!post_out.empty()) write_file(post_out, export_text(res.grammar));
            if (!post_trace.empty()) write_trace(post_trace, res.trace);
            return 0;
        }

        if (*enc_cmd) {
            Grammar g = import_text(read_file(enc_grammar));
            Encoding enc;
            if (enc_encoding == "fixed")
                enc = Encoding::Fixed;
            else if (enc_encoding == "variable")
                enc = Encoding::Variable;
            else
                throw std::runtime_error("unknown --encoding: " + enc_encoding);
            EncodedStream s = encode(g, enc);
            write_nrg(enc_out, s);
            std::cout << "symbols " << s.length() << "\n";
            return 0;
        }

        if (*dec_cmd) {
            EncodedStream s = read_nrg(dec_input);
            DecodeResult res = decode(s);
            std::string out = render_target(res.grammar, res.target);
            if (dec_out.empty())
                std::cout << out;
            else
                write_file(dec_out, out);
            return 0;
        }

        if (*br_cmd) {
            Grammar g = import_text(read_file(br_grammar));
            std::vector<int32_t> lengths = sentence_lengths_of(read_file(br_corpus));
            GoldTreebank gold = GoldTreebank::parse(read_file(br_gold));
            auto pred = extract_brackets(g, lengths);
            if (!br_pred_out.empty()) write_file(br_pred_out, brackets_to_tsv(pred));
            ScoreReport rep = score(pred, gold);
            auto row = [](const char* name, const KindScore& ks) {
                std::printf("%-13s scored=%lld matched=%lld precision=%.4f non_crossing=%.4f\n",
                            name, static_cast<long long>(ks.scored),
                            static_cast<long long>(ks.matched), ks.precision,
                            ks.non_crossing_pct);
            };
            row("context", rep.context);
            row("inside", rep.inside);
            row("straightline", rep.straightline);
            row("overall", rep.overall);
            return 0;
        }

        if (*synth_cmd) {
            write_file(synth_out, generate(spec));
            return 0;
        }

        if (*bench_cmd) {
            if (bench_corpus == "dna")
                cfg.corpus = BenchConfig::Corpus::Dna;
            else if (bench_corpus == "canterbury")
                cfg.corpus = BenchConfig::Corpus::Canterbury;
            else if (bench_corpus == "custom")
                cfg.corpus = BenchConfig::Corpus::Custom;
            else
                throw std::runtime_error("unknown --corpus: " + bench_corpus);
            size_t at = 0;
            while (at < bench_algos.size()) {
                size_t comma = bench_algos.find(',', at);
                if (comma == std::string::npos) comma = bench_algos.size();
                if (comma > at) cfg.algorithms.push_back(bench_algos.substr(at, comma - at));
                at = comma + 1;
            }
            return run_bench(cfg, std::cout) == 0 ? 0 : 2;
        }

        if (*sweep_cmd) {
            auto points = run_sweep(sweep_corpus, sweep_gold, parse_stops(sweep_stops));
            print_sweep(points, sweep_records, std::cout);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
