#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "goldgi/seqgen.hpp"

using namespace goldgi;

namespace {

std::vector<std::uint8_t> seq_bits(const MSequence& s) { return s.bits(); }

// Hand-clocked reference sequences, register (1,0,0), one full period.
const std::vector<std::uint8_t> kX3 = {1, 0, 0, 1, 1, 1, 0};  // x^3+x+1
const std::vector<std::uint8_t> kY3 = {1, 0, 0, 1, 0, 1, 1};  // x^3+x^2+1

}  // namespace

TEST_CASE("polynomial parsing and rendering") {
    const PrimitivePolynomial p = PrimitivePolynomial::parse("1011");
    CHECK(p.degree() == 3);
    CHECK(p.coeffs() == 0xbu);
    CHECK(p.coeff(0));
    CHECK(p.coeff(1));
    CHECK_FALSE(p.coeff(2));
    CHECK(p.coeff(3));
    CHECK(p.period() == 7);
    CHECK(p.to_binary_string() == "1011");
    CHECK(p.to_hex_string() == "0xb");
    CHECK(p.to_algebraic_string() == "x^3+x+1");

    CHECK(PrimitivePolynomial::parse("0xB") == p);
    CHECK(PrimitivePolynomial::parse("0xb") == p);
    CHECK(PrimitivePolynomial::parse("0x11d").degree() == 8);

    CHECK_THROWS_AS(PrimitivePolynomial::parse("1010"), ValidationError);   // c_0 = 0
    CHECK_THROWS_AS(PrimitivePolynomial::parse("11"), ValidationError);     // degree 1
    CHECK_THROWS_AS(PrimitivePolynomial::parse("0x20001"), ValidationError);  // degree 17
    CHECK_THROWS_AS(PrimitivePolynomial::parse(""), ValidationError);
    CHECK_THROWS_AS(PrimitivePolynomial::parse("10x1"), ValidationError);
    CHECK_THROWS_AS(PrimitivePolynomial(3, 0x3), ValidationError);  // c_3 = 0
}

TEST_CASE("register serialization") {
    CHECK(parse_register("100", 3) == 1u);
    CHECK(parse_register("001", 3) == 4u);
    CHECK(register_to_string(1, 3) == "100");
    CHECK(register_to_string(4, 3) == "001");
    CHECK(parse_register(register_to_string(0x15, 5), 5) == 0x15u);
    CHECK_THROWS_AS(parse_register("000", 3), ValidationError);
    CHECK_THROWS_AS(parse_register("10", 3), ValidationError);
    CHECK_THROWS_AS(parse_register("102", 3), ValidationError);
}

TEST_CASE("single LFSR step") {
    const PrimitivePolynomial p = PrimitivePolynomial::parse("1011");
    const LfsrStep step = lfsr_step(make_state(p, parse_register("100", 3)), p);
    CHECK(step.output == 1);
    CHECK(step.state.reg == parse_register("001", 3));
    CHECK(step.state.clock == 1);

    CHECK_THROWS_AS(make_state(p, 0), ValidationError);
    CHECK_THROWS_AS(make_state(p, 8), ValidationError);  // needs 4 bits
    CHECK(make_seed_state(p).reg == 1u);
}

TEST_CASE("hand-clocked degree-3 sequences") {
    const MSequence X = generate_m_sequence(PrimitivePolynomial::parse("1011"), 1);
    const MSequence Y = generate_m_sequence(PrimitivePolynomial::parse("1101"), 1);
    CHECK(seq_bits(X) == kX3);
    CHECK(seq_bits(Y) == kY3);
    CHECK(X.size() == 7);
    CHECK(X.ones() == 4);
    CHECK(X.order() == 3);
    CHECK(X.source_poly() == "1011");
    CHECK(X.source_seed() == "100");

    const MSequence canonical = generate_m_sequence(PrimitivePolynomial::parse("1011"));
    CHECK(seq_bits(canonical) == kX3);
}

TEST_CASE("degree-2 sequence") {
    const MSequence s = generate_m_sequence(PrimitivePolynomial::parse("111"), 1);
    CHECK(seq_bits(s) == std::vector<std::uint8_t>{1, 0, 1});
}

TEST_CASE("seed choice shifts the sequence cyclically") {
    const PrimitivePolynomial p = PrimitivePolynomial::parse("1011");
    const MSequence base = generate_m_sequence(p, 1);
    for (std::uint32_t reg = 2; reg < 8; ++reg) {
        const MSequence shifted = generate_m_sequence(p, reg);
        bool matched = false;
        for (std::size_t off = 0; off < base.size() && !matched; ++off) {
            bool same = true;
            for (std::size_t i = 0; i < base.size(); ++i)
                if (shifted.bit(i) != base.bit((i + off) % base.size())) {
                    same = false;
                    break;
                }
            matched = same;
        }
        CHECK(matched);
    }
    CHECK_THROWS_AS(generate_m_sequence(p, 0), ValidationError);
}

TEST_CASE("non-primitive polynomials are rejected") {
    // x^4 + x^2 + 1 = (x^2+x+1)^2 is reducible; the LFSR output is unbalanced.
    CHECK_FALSE(is_primitive(4, 0x15));
    CHECK_THROWS_AS(generate_m_sequence(PrimitivePolynomial(4, 0x15), 1), NotPrimitiveError);
    CHECK(is_primitive(PrimitivePolynomial::parse("1011")));
    CHECK(is_primitive(4, 0x13));
    // Malformed raw candidates return false instead of throwing.
    CHECK_FALSE(is_primitive(1, 0x3));
    CHECK_FALSE(is_primitive(3, 0xa));  // c_0 = 0
    CHECK_FALSE(is_primitive(17, 0x2aaab));
}

TEST_CASE("primitive polynomial scan") {
    const std::vector<PrimitivePolynomial> found = find_primitive_polynomials(4, 10);
    REQUIRE(found.size() >= 2);
    CHECK(found[0].coeffs() == 0x13u);
    CHECK(found[1].coeffs() == 0x19u);
    for (std::size_t i = 1; i < found.size(); ++i)
        CHECK(found[i - 1].coeffs() < found[i].coeffs());

    CHECK(find_primitive_polynomials(2, 10).size() == 1);  // x^2+x+1 only
}

TEST_CASE("built-in table matches an independent ascending scan") {
    for (int k = 2; k <= 16; ++k) {
        const std::vector<PrimitivePolynomial> table = polynomial_table(k);
        const std::size_t expected = k == 2 ? 1 : 2;
        REQUIRE(table.size() == expected);
        const std::vector<PrimitivePolynomial> scan = find_primitive_polynomials(k, expected);
        REQUIRE(scan.size() == expected);
        for (std::size_t i = 0; i < expected; ++i) {
            CHECK(table[i] == scan[i]);
            CHECK(table[i].degree() == k);
            CHECK(is_primitive(table[i]));
        }
    }
    CHECK_THROWS_AS(polynomial_table(1), ValidationError);
    CHECK_THROWS_AS(polynomial_table(17), ValidationError);
}

TEST_CASE("balance and two-valued autocorrelation") {
    for (int k : {2, 3, 4, 5, 8}) {
        for (const PrimitivePolynomial& p : polynomial_table(k)) {
            const MSequence s = generate_m_sequence(p, 1);
            const std::size_t L = s.size();
            CHECK(L == (1u << k) - 1);
            CHECK(s.ones() == (1u << (k - 1)));

            const std::vector<std::int64_t> r = autocorrelation_pm1(s);
            REQUIRE(r.size() == L);
            CHECK(r[0] == static_cast<std::int64_t>(L));
            for (std::size_t lag = 1; lag < L; ++lag) CHECK(r[lag] == -1);
        }
    }
}

TEST_CASE("autocorrelation matches a direct product sum") {
    const MSequence s = generate_m_sequence(PrimitivePolynomial::parse("1011"), 1);
    const std::vector<std::int64_t> fast = autocorrelation_pm1(s);
    for (std::size_t lag = 0; lag < s.size(); ++lag) {
        std::int64_t direct = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const int a = 1 - 2 * s.bit(i);
            const int b = 1 - 2 * s.bit((i + lag) % s.size());
            direct += a * b;
        }
        CHECK(fast[lag] == direct);
    }
}
