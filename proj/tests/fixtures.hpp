#pragma once

#include <string>

#include "nrg/grammar.hpp"

namespace nrg::testing {

// Five-line storybook sample used throughout the worked examples: four of
// the lines share the frame "Alice ... very tired" with a varying middle.
inline std::string storybook_text() {
    return "Alice was beginning to get very tired\n"
           "Alice was getting very tired\n"
           "Alice is very tired\n"
           "Alice will be very tired\n"
           "Alice was getting very tired\n";
}

inline Sequence storybook_sequence() { return Sequence::from_tokens(storybook_text()); }

namespace detail {

inline SymbolSeq toks(TokenTable& t, std::initializer_list<const char*> words) {
    SymbolSeq s;
    for (const char* w : words) s.push_back(Symbol::terminal(t.intern(w)));
    return s;
}

}  // namespace detail

// Variable-length branching grammar over the storybook alphabet whose
// encoded stream has exactly 28 symbols. The outer rule carries a five
// symbol body (prefix "Alice", suffix "is very tired") and the inner rule
// lists five expansions, one per outer occurrence, duplicates included.
inline Grammar sample_grammar_variable() {
    Sequence seq = storybook_sequence();
    Grammar g;
    g.mode = AlphabetMode::Token;
    g.tokens = seq.tokens;
    auto& t = g.tokens;

    SymbolSeq s_body(5, Symbol::nonterminal(1));
    SymbolSeq o_body = detail::toks(t, {"Alice"});
    o_body.push_back(Symbol::nonterminal(2));
    for (Symbol x : detail::toks(t, {"is", "very", "tired"})) o_body.push_back(x);

    std::vector<SymbolSeq> exps;
    exps.push_back(detail::toks(t, {"was", "beginning", "to", "get"}));
    exps.push_back(detail::toks(t, {"was", "getting"}));
    exps.push_back(detail::toks(t, {"is"}));
    exps.push_back(detail::toks(t, {"will", "be"}));
    exps.push_back(detail::toks(t, {"was", "getting"}));

    g.rules.push_back(Rule::make_plain(std::move(s_body)));
    g.rules.push_back(Rule::make_plain(std::move(o_body)));
    g.rules.push_back(Rule::make_inner(std::move(exps), std::nullopt));
    return g;
}

// Fixed-length branching grammar generating the storybook sample exactly:
// three of the five lines are covered by the branching pair (gap length 2),
// the other two stay literal in the start rule. Encodes to 27 symbols.
inline Grammar sample_grammar_fixed() {
    Sequence seq = storybook_sequence();
    Grammar g;
    g.mode = AlphabetMode::Token;
    g.tokens = seq.tokens;
    auto& t = g.tokens;

    SymbolSeq s_body = detail::toks(t, {"Alice", "was", "beginning", "to", "get", "very", "tired"});
    s_body.push_back(Symbol::nonterminal(1));
    for (Symbol x : detail::toks(t, {"Alice", "is", "very", "tired"})) s_body.push_back(x);
    s_body.push_back(Symbol::nonterminal(1));
    s_body.push_back(Symbol::nonterminal(1));

    SymbolSeq o_body = detail::toks(t, {"Alice"});
    o_body.push_back(Symbol::nonterminal(2));
    for (Symbol x : detail::toks(t, {"very", "tired"})) o_body.push_back(x);

    std::vector<SymbolSeq> exps;
    exps.push_back(detail::toks(t, {"was", "getting"}));
    exps.push_back(detail::toks(t, {"will", "be"}));
    exps.push_back(detail::toks(t, {"was", "getting"}));

    g.rules.push_back(Rule::make_plain(std::move(s_body)));
    g.rules.push_back(Rule::make_plain(std::move(o_body)));
    g.rules.push_back(Rule::make_inner(std::move(exps), 2));
    return g;
}

// Byte-mode straight-line grammar from a plain string, one rule per entry:
// entry 0 is the start body, later entries are referenced as N1, N2, ...
// written as '\x01'-style placeholders is avoided; use explicit builders in
// tests instead.
inline Grammar byte_grammar(std::initializer_list<std::string> bodies) {
    Grammar g;
    g.mode = AlphabetMode::Byte;
    for (const std::string& b : bodies) {
        SymbolSeq s;
        for (unsigned char c : b) s.push_back(Symbol::terminal(c));
        g.rules.push_back(Rule::make_plain(std::move(s)));
    }
    return g;
}

}  // namespace nrg::testing
