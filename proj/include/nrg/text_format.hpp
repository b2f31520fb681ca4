#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "nrg/grammar.hpp"

namespace nrg {

// Line-oriented grammar interchange format.
//
//   @mode byte|token            (first line; token assumed when absent)
//   N0 -> tok tok N1 tok
//   N1 -> a N2 b                (outer rule of a branching pair)
//   N2 =>2 x y | z w | x y      (inner rule; "=>k" pins the expansion
//                                length, bare "=>" means variable)
//
// Tokens are whitespace-separated. `\xNN` escapes bytes outside printable
// ASCII (and whitespace), `\|`, `\#` and `\\` escape the specials, and a
// leading N of a terminal that would otherwise look like a nonterminal
// reference is hex-escaped. Lines must come in a topological order: every
// reference precedes the line defining it.
std::string export_text(const Grammar& g);

struct TextFormatError : std::runtime_error {
    TextFormatError(size_t line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
    size_t line;
};

// Inverse of export_text. Throws TextFormatError on syntax, ordering or
// grammar-invariant violations.
Grammar import_text(std::string_view text);

}  // namespace nrg
