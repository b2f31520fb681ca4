#include "nrg/synth.hpp"

#include <stdexcept>

namespace nrg {

namespace {

// splitmix64: tiny, portable, stable across platforms.
struct Rng {
    uint64_t state;
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

constexpr char kPrefix[] = "[=";
constexpr char kSuffix[] = "];";
constexpr char kEmpty[] = "[_];";

}  // namespace

std::string generate(const TableSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1 || spec.field_width < 1)
        throw std::invalid_argument("generate: rows, cols and field_width must be positive");
    if (spec.fill_ratio < 0.0 || spec.fill_ratio > 1.0)
        throw std::invalid_argument("generate: fill_ratio must lie in [0, 1]");
    if (spec.value_alphabet < 2 || spec.value_alphabet > 256)
        throw std::invalid_argument("generate: value_alphabet must lie in [2, 256]");

    Rng rng{spec.seed * 0x9e3779b97f4a7c15ULL + 0x853c49e6748fea9bULL};
    const bool digits = spec.value_alphabet <= 10;

    // Filled cells are spread evenly over the grid (sparse populated columns
    // rather than an iid sprinkle); values are random, placement is not.
    // This keeps the output a pure function of the spec and gives the empty
    // stretches a constant shape.
    std::string out;
    out.reserve(static_cast<size_t>(spec.rows) * static_cast<size_t>(spec.cols) *
                (static_cast<size_t>(spec.field_width) + 4));
    const int64_t cells = static_cast<int64_t>(spec.rows) * spec.cols;
    int64_t filled_acc = 0;  // Bresenham-style spacing
    for (int64_t cell = 0; cell < cells; ++cell) {
        filled_acc += static_cast<int64_t>(spec.fill_ratio * 65536.0);
        const bool filled = filled_acc >= 65536;
        if (filled) filled_acc -= 65536;
        if (!filled) {
            out += kEmpty;
            continue;
        }
        out += kPrefix;
        for (int32_t i = 0; i < spec.field_width; ++i) {
            uint64_t v = rng.next() % static_cast<uint64_t>(spec.value_alphabet);
            out += digits ? static_cast<char>('0' + v) : static_cast<char>(v);
        }
        out += kSuffix;
    }
    return out;
}

}  // namespace nrg
