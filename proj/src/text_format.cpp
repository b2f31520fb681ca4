#include "nrg/text_format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace nrg {

namespace {

bool looks_like_reference(std::string_view tok) {
    if (tok.size() < 2 || tok[0] != 'N') return false;
    return std::all_of(tok.begin() + 1, tok.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

void escape_into(std::string& out, std::string_view raw, bool mask_leading_n) {
    for (size_t i = 0; i < raw.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(raw[i]);
        const bool mask_n = mask_leading_n && i == 0 && c == 'N';
        if (c == '\\') {
            out += "\\\\";
        } else if (c == '|') {
            out += "\\|";
        } else if (c == '#') {
            out += "\\#";
        } else if (mask_n || c <= 0x20 || c >= 0x7f) {
            static const char* hex = "0123456789abcdef";
            out += "\\x";
            out += hex[c >> 4];
            out += hex[c & 0xf];
        } else {
            out += static_cast<char>(c);
        }
    }
}

std::string render_symbol(const Grammar& g, Symbol s) {
    if (s.is_nonterminal()) return "N" + std::to_string(s.nt_id());
    std::string raw;
    if (g.mode == AlphabetMode::Byte)
        raw.push_back(static_cast<char>(s.terminal_value()));
    else
        raw = g.tokens.name(s.terminal_value());
    std::string out;
    escape_into(out, raw, looks_like_reference(raw));
    return out;
}

std::string unescape(std::string_view tok, size_t line_no) {
    std::string out;
    for (size_t i = 0; i < tok.size(); ++i) {
        char c = tok[i];
        if (c != '\\') {
            out.push_back(c);
            continue;
        }
        if (i + 1 >= tok.size()) throw TextFormatError(line_no, "dangling escape");
        char e = tok[++i];
        if (e == '\\' || e == '|' || e == '#') {
            out.push_back(e);
        } else if (e == 'x') {
            if (i + 2 >= tok.size()) throw TextFormatError(line_no, "truncated \\xNN escape");
            unsigned value = 0;
            auto [p, ec] = std::from_chars(tok.data() + i + 1, tok.data() + i + 3, value, 16);
            if (ec != std::errc() || p != tok.data() + i + 3)
                throw TextFormatError(line_no, "bad \\xNN escape");
            out.push_back(static_cast<char>(value));
            i += 2;
        } else {
            throw TextFormatError(line_no, "unknown escape");
        }
    }
    return out;
}

}  // namespace

std::string export_text(const Grammar& g) {
    std::string out = g.mode == AlphabetMode::Byte ? "@mode byte\n" : "@mode token\n";
    for (int32_t id : emission_order(g)) {
        const Rule& r = g.rules[static_cast<size_t>(id)];
        out += "N" + std::to_string(id);
        if (r.is_inner()) {
            const InnerRule& ir = r.inner();
            out += " =>";
            if (ir.fixed_len) out += std::to_string(*ir.fixed_len);
            for (size_t j = 0; j < ir.expansions.size(); ++j) {
                if (j > 0) out += " |";
                for (Symbol s : ir.expansions[j]) out += " " + render_symbol(g, s);
            }
        } else {
            out += " ->";
            for (Symbol s : r.plain()) out += " " + render_symbol(g, s);
        }
        out += "\n";
    }
    return out;
}

Grammar import_text(std::string_view text) {
    Grammar g;
    g.mode = AlphabetMode::Token;

    struct PendingRule {
        size_t line_no;
        bool inner;
        std::optional<int32_t> fixed_len;
        std::vector<std::vector<std::string>> parts;  // raw tokens per expansion (one for plain)
    };
    std::vector<std::optional<PendingRule>> pending;
    std::vector<std::pair<size_t, size_t>> ordering;  // (definition line index, rule id)

    size_t line_no = 0;
    size_t cursor = 0;
    size_t defined = 0;
    bool saw_rule = false;
    while (cursor < text.size()) {
        size_t eol = text.find('\n', cursor);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(cursor, eol - cursor);
        cursor = eol + 1;
        ++line_no;

        std::vector<std::string_view> toks;
        size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
            if (j > i) toks.push_back(line.substr(i, j - i));
            i = j;
        }
        if (toks.empty()) continue;

        if (toks[0] == "@mode") {
            if (saw_rule) throw TextFormatError(line_no, "@mode must precede the rules");
            if (toks.size() != 2 || (toks[1] != "byte" && toks[1] != "token"))
                throw TextFormatError(line_no, "expected '@mode byte' or '@mode token'");
            g.mode = toks[1] == "byte" ? AlphabetMode::Byte : AlphabetMode::Token;
            continue;
        }
        saw_rule = true;

        if (toks.size() < 2 || !looks_like_reference(toks[0]))
            throw TextFormatError(line_no, "expected 'N<id> -> ...' or 'N<id> => ...'");
        int32_t id = 0;
        std::from_chars(toks[0].data() + 1, toks[0].data() + toks[0].size(), id);

        PendingRule rule;
        rule.line_no = line_no;
        std::string_view arrow = toks[1];
        if (arrow == "->") {
            rule.inner = false;
        } else if (arrow.substr(0, 2) == "=>") {
            rule.inner = true;
            if (arrow.size() > 2) {
                int32_t k = 0;
                auto [p, ec] = std::from_chars(arrow.data() + 2, arrow.data() + arrow.size(), k);
                if (ec != std::errc() || p != arrow.data() + arrow.size() || k < 1)
                    throw TextFormatError(line_no, "bad fixed length suffix on '=>'");
                rule.fixed_len = k;
            }
        } else {
            throw TextFormatError(line_no, "expected '->' or '=>'");
        }

        rule.parts.emplace_back();
        for (size_t ti = 2; ti < toks.size(); ++ti) {
            if (toks[ti] == "|") {
                if (!rule.inner)
                    throw TextFormatError(line_no, "choice separator in a plain rule");
                rule.parts.emplace_back();
            } else {
                rule.parts.back().emplace_back(toks[ti]);
            }
        }

        if (static_cast<size_t>(id) >= pending.size()) pending.resize(static_cast<size_t>(id) + 1);
        if (pending[static_cast<size_t>(id)])
            throw TextFormatError(line_no, "duplicate rule N" + std::to_string(id));
        pending[static_cast<size_t>(id)] = std::move(rule);
        ordering.push_back({defined++, static_cast<size_t>(id)});
    }

    if (pending.empty()) throw TextFormatError(line_no, "no rules");
    for (size_t id = 0; id < pending.size(); ++id)
        if (!pending[id])
            throw TextFormatError(line_no, "missing rule N" + std::to_string(id) +
                                               " (ids must be dense)");

    // Definition position per id, for the topological-order check.
    std::vector<size_t> def_pos(pending.size());
    for (auto [pos, id] : ordering) def_pos[id] = pos;

    auto to_symbol = [&](const std::string& raw_tok, size_t at_line) {
        if (looks_like_reference(raw_tok)) {
            int32_t ref = 0;
            std::from_chars(raw_tok.data() + 1, raw_tok.data() + raw_tok.size(), ref);
            if (static_cast<size_t>(ref) >= pending.size())
                throw TextFormatError(at_line, "reference to undefined rule " + raw_tok);
            return Symbol::nonterminal(ref);
        }
        std::string raw = unescape(raw_tok, at_line);
        if (g.mode == AlphabetMode::Byte) {
            if (raw.size() != 1)
                throw TextFormatError(at_line, "byte-mode terminal must be one byte: " + raw_tok);
            return Symbol::terminal(static_cast<unsigned char>(raw[0]));
        }
        return Symbol::terminal(g.tokens.intern(raw));
    };

    g.rules.resize(pending.size());
    for (size_t id = 0; id < pending.size(); ++id) {
        PendingRule& pr = *pending[id];
        auto build_seq = [&](const std::vector<std::string>& raw) {
            SymbolSeq seq;
            for (const std::string& tok : raw) {
                Symbol s = to_symbol(tok, pr.line_no);
                if (s.is_nonterminal() &&
                    def_pos[static_cast<size_t>(s.nt_id())] <= def_pos[id])
                    throw TextFormatError(pr.line_no,
                                          "line order is not topological: N" +
                                              std::to_string(s.nt_id()) +
                                              " is defined at or before its use");
                seq.push_back(s);
            }
            return seq;
        };
        if (pr.inner) {
            std::vector<SymbolSeq> exps;
            for (const auto& part : pr.parts) exps.push_back(build_seq(part));
            g.rules[id] = Rule::make_inner(std::move(exps), pr.fixed_len);
        } else {
            g.rules[id] = Rule::make_plain(build_seq(pr.parts[0]));
        }
    }

    auto violations = validate(g);
    if (!violations.empty())
        throw TextFormatError(pending[0]->line_no,
                              "invalid grammar: " + violation_to_string(violations[0]));
    return g;
}

}  // namespace nrg
