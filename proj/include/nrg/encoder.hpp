#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "nrg/grammar.hpp"

namespace nrg {

// A grammar serialized to a single symbol stream. The stream is
// self-delimiting given the encoding flag and, for token mode, the token
// table: the decoder recovers both the grammar and its target sequence from
// the symbols alone.
struct EncodedStream {
    SymbolSeq symbols;
    Encoding encoding = Encoding::Variable;
    AlphabetMode mode = AlphabetMode::Byte;
    TokenTable tokens;  // token mode only

    int64_t length() const { return static_cast<int64_t>(symbols.size()); }
};

struct DecodeError : std::runtime_error {
    DecodeError(size_t offset_, const std::string& what_)
        : std::runtime_error("decode error at offset " + std::to_string(offset_) + ": " + what_),
          offset(offset_) {}
    size_t offset;
};

// Serializes the grammar in emission order: ascending depth with each inner
// rule directly after its outer, nonterminals renamed to stream order. Plain
// rules close with a rule separator. Inner rules list expansions separated
// by choice separators under the variable encoding; under the fixed encoding
// only the first expansion is followed by a choice separator and the rest
// are concatenated with no terminator at all.
EncodedStream encode(const Grammar& g, Encoding enc);

// Stream length in symbols without materializing the stream.
int64_t stream_length(const Grammar& g, Encoding enc);

struct DecodeResult {
    Grammar grammar;
    SymbolSeq target;
};

// Inverse of encode. Rule heads are positional (rule i defines nonterminal
// i); a rule whose parse hits a choice separator before a rule separator is
// an inner rule paired with the immediately preceding rule. Expansion counts
// are recovered by counting derivations of the pair's outer over the rules
// already decoded, which topological emission order makes complete.
DecodeResult decode(const EncodedStream& stream);

// Binary container for encoded streams (varint symbol codes plus header).
void write_nrg(const std::string& path, const EncodedStream& s);
EncodedStream read_nrg(const std::string& path);

}  // namespace nrg
