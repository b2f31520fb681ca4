#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nrg {

enum class AlphabetMode { Byte, Token };
enum class Encoding { Variable, Fixed };

// A symbol is a terminal token, a nonterminal id, or one of the two
// reserved stream separators. Separators exist only in encoded streams,
// never inside rule bodies.
//
// Packed into one int32: v >= 0 terminal, v == -1 rule separator,
// v == -2 choice separator, v <= -3 nonterminal with id (-3 - v).
class Symbol {
public:
    constexpr Symbol() : v_(0) {}

    static constexpr Symbol terminal(int32_t t) { return Symbol(t); }
    static constexpr Symbol nonterminal(int32_t id) { return Symbol(-3 - id); }
    static constexpr Symbol rule_sep() { return Symbol(-1); }
    static constexpr Symbol choice_sep() { return Symbol(-2); }

    constexpr bool is_terminal() const { return v_ >= 0; }
    constexpr bool is_nonterminal() const { return v_ <= -3; }
    constexpr bool is_rule_sep() const { return v_ == -1; }
    constexpr bool is_choice_sep() const { return v_ == -2; }
    constexpr bool is_separator() const { return v_ == -1 || v_ == -2; }

    constexpr int32_t terminal_value() const { return v_; }
    constexpr int32_t nt_id() const { return -3 - v_; }
    constexpr int32_t raw() const { return v_; }

    static constexpr Symbol from_raw(int32_t v) { return Symbol(v); }

    // Relational order follows the raw encoding and exists for container
    // use; deterministic tie-breaking goes through symbol_less instead.
    friend constexpr auto operator<=>(Symbol a, Symbol b) = default;

private:
    explicit constexpr Symbol(int32_t v) : v_(v) {}
    int32_t v_;
};

using SymbolSeq = std::vector<Symbol>;

// Canonical ordering used for deterministic tie-breaking:
// terminals ascending, then nonterminals ascending by id.
inline bool symbol_less(Symbol a, Symbol b) {
    const bool na = a.is_nonterminal(), nb = b.is_nonterminal();
    if (na != nb) return !na;
    if (na) return a.nt_id() < b.nt_id();
    return a.raw() < b.raw();
}

inline bool seq_less(const SymbolSeq& a, const SymbolSeq& b) {
    const size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        if (a[i] != b[i]) return symbol_less(a[i], b[i]);
    }
    return a.size() < b.size();
}

// Interning table for token-mode alphabets. Byte-mode grammars leave it empty.
class TokenTable {
public:
    int32_t intern(std::string_view tok) {
        auto it = ids_.find(std::string(tok));
        if (it != ids_.end()) return it->second;
        int32_t id = static_cast<int32_t>(names_.size());
        names_.emplace_back(tok);
        ids_.emplace(names_.back(), id);
        return id;
    }

    const std::string& name(int32_t id) const { return names_.at(static_cast<size_t>(id)); }
    int32_t size() const { return static_cast<int32_t>(names_.size()); }
    bool empty() const { return names_.empty(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int32_t> ids_;
};

// An input sequence together with its alphabet interpretation.
struct Sequence {
    AlphabetMode mode = AlphabetMode::Byte;
    SymbolSeq syms;
    TokenTable tokens;  // token mode only

    static Sequence from_bytes(std::string_view data) {
        Sequence s;
        s.mode = AlphabetMode::Byte;
        s.syms.reserve(data.size());
        for (unsigned char c : data) s.syms.push_back(Symbol::terminal(c));
        return s;
    }

    // Whitespace-delimited tokens.
    static Sequence from_tokens(std::string_view text) {
        Sequence s;
        s.mode = AlphabetMode::Token;
        size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
            size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
            if (j > i) s.syms.push_back(Symbol::terminal(s.tokens.intern(text.substr(i, j - i))));
            i = j;
        }
        return s;
    }
};

}  // namespace nrg
