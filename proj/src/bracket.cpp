#include "nrg/bracket.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace nrg {

GoldTreebank GoldTreebank::parse(std::string_view text) {
    GoldTreebank out;
    size_t line_start = 0;
    while (line_start < text.size()) {
        size_t line_end = text.find('\n', line_start);
        if (line_end == std::string_view::npos) line_end = text.size();
        std::string_view line = text.substr(line_start, line_end - line_start);
        line_start = line_end + 1;

        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;

        Sentence sent;
        size_t i = 0;
        const size_t id = out.sentences.size();
        auto skip_ws = [&]() {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        };
        auto fail = [&](const char* why) {
            throw std::invalid_argument("treebank line " + std::to_string(id + 1) + ": " + why);
        };

        // Recursive descent over one parenthesized tree.
        auto parse_node = [&](auto&& self) -> std::pair<int32_t, int32_t> {
            skip_ws();
            if (i >= line.size() || line[i] != '(') fail("expected '('");
            ++i;
            skip_ws();
            // Optional label.
            while (i < line.size() && line[i] != '(' && line[i] != ')' &&
                   !std::isspace(static_cast<unsigned char>(line[i])))
                ++i;
            skip_ws();
            int32_t start = static_cast<int32_t>(sent.tokens.size());
            if (i < line.size() && line[i] == ')') fail("empty node");
            if (line[i] == '(') {
                while (i < line.size() && line[i] == '(') {
                    self(self);
                    skip_ws();
                }
            } else {
                size_t tok_start = i;
                while (i < line.size() && line[i] != ')' &&
                       !std::isspace(static_cast<unsigned char>(line[i])))
                    ++i;
                sent.tokens.emplace_back(line.substr(tok_start, i - tok_start));
                skip_ws();
            }
            if (i >= line.size() || line[i] != ')') fail("expected ')'");
            ++i;
            int32_t end = static_cast<int32_t>(sent.tokens.size());
            if (end > start) sent.brackets.push_back({start, end});
            return {start, end};
        };
        parse_node(parse_node);
        skip_ws();
        if (i != line.size()) fail("trailing characters after tree");
        out.sentences.push_back(std::move(sent));
    }
    return out;
}

std::vector<Bracket> extract_brackets(const Grammar& g,
                                      const std::vector<int32_t>& sentence_lengths) {
    // Sentence boundaries as prefix sums over the concatenated corpus.
    std::vector<int64_t> starts{0};
    for (int32_t len : sentence_lengths) {
        if (len <= 0) throw std::invalid_argument("extract_brackets: empty sentence");
        starts.push_back(starts.back() + len);
    }
    const int64_t corpus_len = starts.back();

    std::vector<Bracket> out;
    auto emit = [&](int64_t from, int64_t to, Bracket::Kind kind) {
        // Locate the sentence containing `from`; drop boundary crossers.
        auto it = std::upper_bound(starts.begin(), starts.end(), from);
        size_t sent = static_cast<size_t>(it - starts.begin()) - 1;
        if (sent + 1 >= starts.size() || to > starts[sent + 1]) return;
        out.push_back({static_cast<int32_t>(sent), static_cast<int32_t>(from - starts[sent]),
                       static_cast<int32_t>(to - starts[sent]), kind});
    };

    // One full derivation with an explicit stack; a bracket is emitted when
    // the frame of its nonterminal occurrence closes.
    struct Frame {
        const SymbolSeq* seq;
        size_t idx;
        int64_t from;
        int32_t nt;     // nonterminal this frame derives; -1 for the root
        bool is_inner;  // frame expands an inner rule
    };
    std::vector<size_t> next_expansion(static_cast<size_t>(g.n_rules()), 0);
    std::vector<Frame> stack;
    int64_t offset = 0;

    auto enter = [&](int32_t id, int32_t origin_nt) {
        const Rule& r = g.rules.at(static_cast<size_t>(id));
        if (r.is_inner()) {
            size_t& c = next_expansion[static_cast<size_t>(id)];
            if (c >= r.inner().expansions.size())
                throw std::invalid_argument("extract_brackets: expansion list exhausted");
            stack.push_back({&r.inner().expansions[c++], 0, offset, origin_nt, true});
        } else {
            stack.push_back({&r.plain(), 0, offset, origin_nt, false});
        }
    };
    enter(0, -1);
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.idx >= f.seq->size()) {
            if (f.nt >= 0) {
                Bracket::Kind kind;
                if (f.is_inner)
                    kind = Bracket::Kind::Inside;
                else if (branching(g, f.nt))
                    kind = Bracket::Kind::Context;
                else
                    kind = Bracket::Kind::Straightline;
                emit(f.from, offset, kind);
            }
            stack.pop_back();
            continue;
        }
        Symbol s = (*f.seq)[f.idx++];
        if (s.is_terminal()) {
            ++offset;
            if (offset > corpus_len)
                throw std::invalid_argument("extract_brackets: grammar yields more tokens than the corpus");
        } else {
            enter(s.nt_id(), s.nt_id());
        }
    }
    if (offset != corpus_len)
        throw std::invalid_argument("extract_brackets: grammar does not derive the corpus");
    return out;
}

namespace {

bool spans_cross(int32_t a1, int32_t a2, int32_t b1, int32_t b2) {
    const bool overlap = a1 < b2 && b1 < a2;
    if (!overlap) return false;
    const bool a_in_b = b1 <= a1 && a2 <= b2;
    const bool b_in_a = a1 <= b1 && b2 <= a2;
    return !a_in_b && !b_in_a;
}

}  // namespace

ScoreReport score(const std::vector<Bracket>& pred, const GoldTreebank& gold) {
    std::vector<std::set<std::pair<int32_t, int32_t>>> gold_sets(gold.sentences.size());
    for (size_t s = 0; s < gold.sentences.size(); ++s)
        for (auto span : gold.sentences[s].brackets) gold_sets[s].insert(span);

    ScoreReport rep;
    auto bucket = [&](Bracket::Kind k) -> KindScore& {
        switch (k) {
            case Bracket::Kind::Context: return rep.context;
            case Bracket::Kind::Inside: return rep.inside;
            default: return rep.straightline;
        }
    };

    for (const Bracket& b : pred) {
        if (b.sentence < 0 || static_cast<size_t>(b.sentence) >= gold.sentences.size())
            throw std::out_of_range("score: sentence id " + std::to_string(b.sentence) +
                                    " outside the treebank");
        const auto& sent = gold.sentences[static_cast<size_t>(b.sentence)];
        const int32_t len = static_cast<int32_t>(sent.tokens.size());
        if (b.start < 0 || b.end > len || b.start >= b.end)
            throw std::out_of_range("score: span outside its sentence");

        KindScore& ks = bucket(b.kind);
        ++ks.extracted;
        ++rep.overall.extracted;
        const bool singleton = b.end - b.start == 1;
        const bool sentence_wide = b.start == 0 && b.end == len;
        if (singleton || sentence_wide) {
            ++ks.filtered;
            ++rep.overall.filtered;
            continue;
        }
        ++ks.scored;
        ++rep.overall.scored;
        const auto& gs = gold_sets[static_cast<size_t>(b.sentence)];
        if (gs.count({b.start, b.end})) {
            ++ks.matched;
            ++rep.overall.matched;
        }
        bool crosses = false;
        for (auto [g1, g2] : gs)
            if (spans_cross(b.start, b.end, g1, g2)) {
                crosses = true;
                break;
            }
        if (!crosses) {
            ++ks.non_crossing;
            ++rep.overall.non_crossing;
        }
    }

    for (KindScore* ks : {&rep.context, &rep.inside, &rep.straightline, &rep.overall}) {
        if (ks->scored > 0) {
            ks->precision = static_cast<double>(ks->matched) / static_cast<double>(ks->scored);
            ks->non_crossing_pct =
                static_cast<double>(ks->non_crossing) / static_cast<double>(ks->scored);
        }
    }
    return rep;
}

std::string brackets_to_tsv(const std::vector<Bracket>& pred) {
    std::string out;
    for (const Bracket& b : pred) {
        const char* kind = b.kind == Bracket::Kind::Context
                               ? "context"
                               : (b.kind == Bracket::Kind::Inside ? "inside" : "straightline");
        out += std::to_string(b.sentence) + "\t" + std::to_string(b.start) + "\t" +
               std::to_string(b.end) + "\t" + kind + "\n";
    }
    return out;
}

}  // namespace nrg
