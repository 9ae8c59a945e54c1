#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "goldgi/common.hpp"
#include "goldgi/grid.hpp"
#include "goldgi/seqgen.hpp"

namespace goldgi {

enum class PatternFamily { gold, hadamard, random };

std::string family_name(PatternFamily f);
PatternFamily parse_family(const std::string& name);

// Everything needed to rebuild a pattern set bit-for-bit: the generator
// parameters of the full matrix plus any row selection applied afterwards.
struct PatternProvenance {
    std::string family;               // gold | hadamard | random
    int k = 0;                        // matrix order for gold/hadamard; 0 for random
    std::uint32_t K = 0;              // full row count before any selection
    std::uint32_t m = 0;              // reshape geometry, m*n = column count
    std::uint32_t n = 0;
    std::string poly_x, seed_x;       // gold: first LFSR (coeff string, register string)
    std::string poly_y, seed_y;       // gold: second LFSR
    std::uint64_t rng_seed = 0;       // random: generator seed
    std::string mode;                 // random: binary | negexp
    std::string order = "natural";    // natural | perm:<seed>
    std::uint32_t rows_selected = 0;  // 0 = full set
};

// K×N measurement matrix. Binary sets are stored as packed rows (bit c of
// row r sits in word c/64 at bit c%64, tail bits zero), which is what the
// Gram and reconstruction fast paths operate on. The negexp random family
// stores plain doubles instead and is flagged non-binary.
class PatternMatrix {
public:
    PatternMatrix(std::uint32_t rows, std::uint32_t m, std::uint32_t n, PatternFamily family,
                  std::vector<std::uint64_t> packed, PatternProvenance prov);
    PatternMatrix(std::uint32_t rows, std::uint32_t m, std::uint32_t n, PatternFamily family,
                  std::vector<double> values, PatternProvenance prov);

    std::uint32_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }
    std::uint32_t geom_m() const { return m_; }
    std::uint32_t geom_n() const { return n_; }
    PatternFamily family() const { return family_; }
    const PatternProvenance& provenance() const { return prov_; }
    bool is_binary() const { return binary_; }

    std::size_t words_per_row() const { return (cols_ + 63) / 64; }
    const std::uint64_t* row_bits(std::uint32_t r) const;

    int bit(std::uint32_t r, std::uint32_t c) const {
        return static_cast<int>((packed_[static_cast<std::size_t>(r) * words_per_row() +
                                         (c >> 6)] >>
                                 (c & 63)) &
                                1u);
    }
    // Entry value in either storage mode.
    double value(std::uint32_t r, std::uint32_t c) const {
        return binary_ ? static_cast<double>(bit(r, c))
                       : values_[static_cast<std::size_t>(r) * cols_ + c];
    }

    const std::vector<std::uint64_t>& packed() const { return packed_; }
    const std::vector<double>& continuous() const { return values_; }

    bool same_content(const PatternMatrix& other) const;

private:
    std::uint32_t rows_, cols_, m_, n_;
    PatternFamily family_;
    bool binary_;
    std::vector<std::uint64_t> packed_;
    std::vector<double> values_;
    PatternProvenance prov_;
};

// The 2^k × 2^k Gold matrix: row i (i = 0..2^k-2) is a 1 followed by
// X(j) xor Y((j-i) mod 2^k-1) for j = 0..2^k-2; the final row is [1 | X].
// X and Y must share the order k. Geometry (m, n) defaults to the square
// 2^(k/2) fold; odd k requires an explicit m*n = 2^k. Building from a single
// polynomial warns on stderr (orthogonality survives, pseudo-randomness
// does not) but proceeds.
PatternMatrix build_gold_matrix(const MSequence& X, const MSequence& Y, std::uint32_t m = 0,
                                std::uint32_t n = 0);

// Sylvester-ordered Hadamard matrix mapped to {0,1}: entry (i,j) is 1 when
// popcount(i & j) is even. Same geometry rules as the Gold builder.
PatternMatrix build_hadamard_matrix(int k, std::uint32_t m = 0, std::uint32_t n = 0);

enum class RandomMode { binary, negexp };

std::string random_mode_name(RandomMode mode);
RandomMode parse_random_mode(const std::string& name);

// K×(m*n) random patterns: Bernoulli(1/2) bits (binary) or unit-mean
// exponential intensities (negexp), drawn row-major from SeededRng(seed).
PatternMatrix build_random_patterns(std::uint32_t K, std::uint32_t m, std::uint32_t n,
                                    std::uint64_t rng_seed, RandomMode mode);

// Row s (1-based, matching the s column of persisted bucket CSVs) folded
// row-major into the matrix geometry.
ImageGrid reshape_row(const PatternMatrix& p, std::uint32_t s);

struct RowOrder {
    bool permuted = false;
    std::uint64_t seed = 0;
};

RowOrder parse_order(const std::string& text);  // "natural" | "perm:<seed>"
std::string order_to_string(const RowOrder& o);

// The full row visit order: identity for natural, a seeded Fisher-Yates
// permutation otherwise.
std::vector<std::uint32_t> selection_order(const RowOrder& o, std::uint32_t K);

// First `count` rows of the full matrix under the given order. Provenance
// records the order and count, so a selected set regenerates exactly.
PatternMatrix select_rows(const PatternMatrix& p, const RowOrder& order, std::uint32_t count);

// Max absolute deviation of G·Gᵀ from N·I where G is the ±1-mapped matrix
// (1 → +1, 0 → -1). Exact integer arithmetic via packed XOR/popcount; zero
// means the rows are exactly orthogonal with norm² N.
std::int64_t max_gram_deviation_pm1(const PatternMatrix& p);

// Per-column sums of the ±1-mapped matrix (2·ones - K per column).
std::vector<std::int64_t> pm1_column_sums(const PatternMatrix& p);

// Rebuild a pattern set from recorded provenance; bit-identical to the
// original by construction.
PatternMatrix regenerate_patterns(const PatternProvenance& prov);

// Persisted form: a raw payload (bit-packed rows, MSB-first within each
// byte, each row padded to a byte boundary; negexp sets use little-endian
// float64 instead) plus a JSON sidecar describing geometry and provenance.
void save_patterns(const PatternMatrix& p, const std::string& payload_path,
                   const std::string& sidecar_path);
PatternMatrix load_patterns(const std::string& sidecar_path);

}  // namespace goldgi
