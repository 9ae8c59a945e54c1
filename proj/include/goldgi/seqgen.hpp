#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "goldgi/common.hpp"

namespace goldgi {

// A polynomial over GF(2) whose fed-back LFSR fails the balance check.
class NotPrimitiveError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Degree-k feedback polynomial f(x) = c_0 + c_1 x + ... + c_k x^k over GF(2)
// with c_k = c_0 = 1. Construction validates shape only; whether the
// polynomial is actually primitive is decided by is_primitive().
//
// Serialized forms: coefficients high-to-low as a binary string ("1011" for
// x^3+x+1) or as hex of the same value ("0xb").
class PrimitivePolynomial {
public:
    static constexpr int kMinDegree = 2;
    static constexpr int kMaxDegree = 16;

    PrimitivePolynomial(int degree, std::uint32_t coeffs);

    // Accepts "1011" style binary or "0xB" style hex.
    static PrimitivePolynomial parse(const std::string& text);

    int degree() const { return degree_; }
    std::uint32_t coeffs() const { return coeffs_; }  // bit i holds c_i
    bool coeff(int i) const { return (coeffs_ >> i) & 1u; }
    std::uint32_t period() const { return (1u << degree_) - 1; }

    // bit j holds c_{k-j} for j = 0..k-1; the feedback bit of register state
    // (a_0..a_{k-1}) is parity(state & feedback_mask()).
    std::uint32_t feedback_mask() const { return feedback_mask_; }

    std::string to_binary_string() const;     // "1011"
    std::string to_hex_string() const;        // "0xb"
    std::string to_algebraic_string() const;  // "x^3+x+1"

    friend bool operator==(const PrimitivePolynomial& a, const PrimitivePolynomial& b) {
        return a.degree_ == b.degree_ && a.coeffs_ == b.coeffs_;
    }

private:
    int degree_;
    std::uint32_t coeffs_;
    std::uint32_t feedback_mask_;
};

// Shift-register contents (a_0, ..., a_{k-1}) plus the clock count. Bit i of
// `reg` holds a_i. Values are immutable; lfsr_step returns a fresh state.
struct LfsrState {
    std::uint32_t reg = 0;
    std::uint64_t clock = 0;
};

struct LfsrStep {
    LfsrState state;
    int output = 0;  // a_0 of the pre-step register
};

// Canonical seed register (1, 0, ..., 0).
LfsrState make_seed_state(const PrimitivePolynomial& poly);

// Validates that `reg` is nonzero and fits in poly.degree() bits.
LfsrState make_state(const PrimitivePolynomial& poly, std::uint32_t reg);

// Register seeds serialize as the bit string "a_0 a_1 ... a_{k-1}", e.g.
// "100" for the canonical degree-3 seed.
std::uint32_t parse_register(const std::string& text, int degree);
std::string register_to_string(std::uint32_t reg, int degree);

// One clock turn: emits a_0, shifts the register down and feeds
// c_1 a_{k-1} + c_2 a_{k-2} + ... + c_k a_0 (mod 2) into the top cell.
// Rejects the all-zero register, which the recurrence can never leave.
LfsrStep lfsr_step(const LfsrState& state, const PrimitivePolynomial& poly);

// One full period (2^k - 1 bits) of LFSR output.
class MSequence {
public:
    MSequence(std::vector<std::uint8_t> bits, int order, std::string source_poly,
              std::string source_seed);

    std::size_t size() const { return bits_.size(); }
    int order() const { return order_; }
    int bit(std::size_t i) const { return bits_[i]; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::size_t ones() const;
    const std::string& source_poly() const { return source_poly_; }
    const std::string& source_seed() const { return source_seed_; }

private:
    std::vector<std::uint8_t> bits_;
    int order_;
    std::string source_poly_;
    std::string source_seed_;
};

// Runs the register for 2^k - 1 clocks and collects the outputs. Throws
// ValidationError on a zero seed and NotPrimitiveError when the output fails
// the balance property (2^{k-1} ones), the cheap post-hoc witness that the
// polynomial was not primitive.
MSequence generate_m_sequence(const PrimitivePolynomial& poly, std::uint32_t seed_reg);
MSequence generate_m_sequence(const PrimitivePolynomial& poly);  // canonical seed

// True iff the state orbit from the canonical seed has period exactly
// 2^k - 1. The raw-coefficient overload returns false for malformed
// candidates (degree out of range, c_k or c_0 missing) instead of throwing.
bool is_primitive(int degree, std::uint32_t coeffs);
bool is_primitive(const PrimitivePolynomial& poly);

// Exhaustive ascending scan over coefficient values; returns up to `limit`
// primitive polynomials of the given degree (fewer when the degree has
// fewer).
std::vector<PrimitivePolynomial> find_primitive_polynomials(int degree, std::size_t limit);

// Built-in defaults: the two lowest-coefficient primitive polynomials per
// degree (degree 2 has a single one).
std::vector<PrimitivePolynomial> polynomial_table(int degree);

// Periodic autocorrelation of the +/-1-mapped sequence (bit b -> 1 - 2b) at
// every lag 0..L-1; lag 0 equals L. Computed by packed XOR/popcount, which
// evaluates sum_i s_i s_{i+lag} directly.
std::vector<std::int64_t> autocorrelation_pm1(const MSequence& seq);

}  // namespace goldgi
