#pragma once

#include <cstdint>
#include <string>

namespace nrg {

// Synthetic spreadsheet-like byte sequence: a rows x cols grid of cells,
// serialized row-major. A filled cell is a fixed frame around a run of
// random value symbols of width field_width; an empty cell is a fixed
// marker. Output is a pure function of the spec (seed included).
//
// value_alphabet picks the value distribution: 10 draws decimal digits,
// anything larger draws uniform bytes over that many values. Low-entropy
// digit fields repeat so much that the exact-repeat stage already grinds
// them down; byte-valued fields stay unique and survive to the
// branching-motif stage the way binary spreadsheet payloads do.
struct TableSpec {
    int32_t rows = 347;
    int32_t cols = 228;
    int32_t field_width = 4;
    double fill_ratio = 0.5;   // fraction of non-empty cells
    int32_t value_alphabet = 10;
    uint64_t seed = 1;
};

std::string generate(const TableSpec& spec);

}  // namespace nrg
