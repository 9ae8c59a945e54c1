#include "goldgi/seqgen.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

namespace goldgi {

namespace {

std::uint32_t compute_feedback_mask(int degree, std::uint32_t coeffs) {
    std::uint32_t mask = 0;
    for (int j = 0; j < degree; ++j) {
        if ((coeffs >> (degree - j)) & 1u) mask |= (1u << j);
    }
    return mask;
}

bool well_formed(int degree, std::uint32_t coeffs) {
    if (degree < PrimitivePolynomial::kMinDegree || degree > PrimitivePolynomial::kMaxDegree)
        return false;
    if ((coeffs & 1u) == 0) return false;              // c_0 = 1
    if ((coeffs >> degree) != 1u) return false;        // c_k = 1, nothing above
    return true;
}

}  // namespace

PrimitivePolynomial::PrimitivePolynomial(int degree, std::uint32_t coeffs)
    : degree_(degree), coeffs_(coeffs), feedback_mask_(0) {
    if (degree < kMinDegree || degree > kMaxDegree)
        throw ValidationError("polynomial degree must be in 2..16, got " + std::to_string(degree));
    if ((coeffs & 1u) == 0)
        throw ValidationError("polynomial constant term c_0 must be 1");
    if ((coeffs >> degree) != 1u)
        throw ValidationError("polynomial leading term c_k must be 1 and nothing may exceed degree");
    feedback_mask_ = compute_feedback_mask(degree, coeffs);
}

PrimitivePolynomial PrimitivePolynomial::parse(const std::string& text) {
    if (text.empty()) throw ValidationError("empty polynomial string");
    std::uint32_t value = 0;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        for (std::size_t i = 2; i < text.size(); ++i) {
            const char c = text[i];
            int digit;
            if (c >= '0' && c <= '9') digit = c - '0';
            else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') digit = c - 'A' + 10;
            else throw ValidationError("bad hex digit in polynomial: " + text);
            if (value > 0x0FFFFFFFu) throw ValidationError("polynomial value out of range: " + text);
            value = value * 16 + static_cast<std::uint32_t>(digit);
        }
        if (value == 0) throw ValidationError("zero polynomial: " + text);
        const int degree = std::bit_width(value) - 1;
        return PrimitivePolynomial(degree, value);
    }
    for (const char c : text) {
        if (c != '0' && c != '1') throw ValidationError("bad binary digit in polynomial: " + text);
        value = (value << 1) | static_cast<std::uint32_t>(c - '0');
    }
    if (text[0] != '1') throw ValidationError("binary polynomial must start with 1: " + text);
    const int degree = static_cast<int>(text.size()) - 1;
    return PrimitivePolynomial(degree, value);
}

std::string PrimitivePolynomial::to_binary_string() const {
    std::string s;
    for (int i = degree_; i >= 0; --i) s += coeff(i) ? '1' : '0';
    return s;
}

std::string PrimitivePolynomial::to_hex_string() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    std::uint32_t v = coeffs_;
    while (v != 0) {
        s.insert(s.begin(), digits[v & 0xF]);
        v >>= 4;
    }
    return "0x" + s;
}

std::string PrimitivePolynomial::to_algebraic_string() const {
    std::string s;
    for (int i = degree_; i >= 0; --i) {
        if (!coeff(i)) continue;
        if (!s.empty()) s += '+';
        if (i == 0) s += '1';
        else if (i == 1) s += 'x';
        else s += "x^" + std::to_string(i);
    }
    return s;
}

LfsrState make_seed_state(const PrimitivePolynomial&) { return LfsrState{1u, 0}; }

LfsrState make_state(const PrimitivePolynomial& poly, std::uint32_t reg) {
    if (reg == 0) throw ValidationError("LFSR register must not be all-zero");
    if (reg >> poly.degree() != 0)
        throw ValidationError("LFSR register wider than polynomial degree");
    return LfsrState{reg, 0};
}

std::uint32_t parse_register(const std::string& text, int degree) {
    if (static_cast<int>(text.size()) != degree)
        throw ValidationError("register string length must equal polynomial degree");
    std::uint32_t reg = 0;
    for (int i = 0; i < degree; ++i) {
        if (text[i] == '1') reg |= (1u << i);
        else if (text[i] != '0') throw ValidationError("bad register bit: " + text);
    }
    if (reg == 0) throw ValidationError("the all-zero register is not a valid seed");
    return reg;
}

std::string register_to_string(std::uint32_t reg, int degree) {
    std::string s;
    for (int i = 0; i < degree; ++i) s += ((reg >> i) & 1u) ? '1' : '0';
    return s;
}

LfsrStep lfsr_step(const LfsrState& state, const PrimitivePolynomial& poly) {
    if (state.reg == 0) throw ValidationError("cannot step an all-zero LFSR register");
    if (state.reg >> poly.degree() != 0)
        throw ValidationError("register length does not match polynomial degree");
    const int out = static_cast<int>(state.reg & 1u);
    const std::uint32_t fb =
        static_cast<std::uint32_t>(std::popcount(state.reg & poly.feedback_mask()) & 1);
    const std::uint32_t next = (state.reg >> 1) | (fb << (poly.degree() - 1));
    return LfsrStep{LfsrState{next, state.clock + 1}, out};
}

MSequence::MSequence(std::vector<std::uint8_t> bits, int order, std::string source_poly,
                     std::string source_seed)
    : bits_(std::move(bits)),
      order_(order),
      source_poly_(std::move(source_poly)),
      source_seed_(std::move(source_seed)) {
    if (bits_.size() != (std::size_t{1} << order_) - 1)
        throw ValidationError("m-sequence length must be 2^k - 1");
}

std::size_t MSequence::ones() const {
    std::size_t n = 0;
    for (const auto b : bits_) n += b;
    return n;
}

MSequence generate_m_sequence(const PrimitivePolynomial& poly, std::uint32_t seed_reg) {
    LfsrState state = make_state(poly, seed_reg);
    const std::size_t length = poly.period();
    std::vector<std::uint8_t> bits(length);
    std::size_t ones = 0;
    for (std::size_t i = 0; i < length; ++i) {
        const LfsrStep step = lfsr_step(state, poly);
        bits[i] = static_cast<std::uint8_t>(step.output);
        ones += static_cast<std::size_t>(step.output);
        state = step.state;
    }
    if (ones != (std::size_t{1} << (poly.degree() - 1)))
        throw NotPrimitiveError("polynomial " + poly.to_binary_string() +
                                " is not primitive: output sequence is unbalanced");
    return MSequence(std::move(bits), poly.degree(), poly.to_binary_string(),
                     register_to_string(seed_reg, poly.degree()));
}

MSequence generate_m_sequence(const PrimitivePolynomial& poly) {
    return generate_m_sequence(poly, make_seed_state(poly).reg);
}

bool is_primitive(int degree, std::uint32_t coeffs) {
    if (!well_formed(degree, coeffs)) return false;
    const std::uint32_t feedback_mask = compute_feedback_mask(degree, coeffs);
    const std::uint32_t target = (1u << degree) - 1;
    std::uint32_t reg = 1u;
    for (std::uint32_t step = 1; step <= target; ++step) {
        const std::uint32_t fb =
            static_cast<std::uint32_t>(std::popcount(reg & feedback_mask) & 1);
        reg = (reg >> 1) | (fb << (degree - 1));
        if (reg == 1u) return step == target;
    }
    return false;
}

bool is_primitive(const PrimitivePolynomial& poly) {
    return is_primitive(poly.degree(), poly.coeffs());
}

std::vector<PrimitivePolynomial> find_primitive_polynomials(int degree, std::size_t limit) {
    if (degree < PrimitivePolynomial::kMinDegree || degree > PrimitivePolynomial::kMaxDegree)
        throw ValidationError("degree must be in 2..16");
    if (limit == 0) throw ValidationError("limit must be at least 1");
    std::vector<PrimitivePolynomial> found;
    const std::uint32_t lo = (1u << degree) | 1u;
    const std::uint32_t hi = (1u << (degree + 1)) - 1;
    for (std::uint32_t coeffs = lo; coeffs <= hi && found.size() < limit; coeffs += 2) {
        if (is_primitive(degree, coeffs)) found.emplace_back(degree, coeffs);
    }
    return found;
}

std::vector<PrimitivePolynomial> polynomial_table(int degree) {
    // First two primitive polynomials per degree, ascending by coefficient
    // value. The unit tests re-derive every entry with the exhaustive scan.
    static constexpr std::uint32_t kTable[17][2] = {
        {0, 0}, {0, 0},
        {0x7, 0},         // k = 2 (only one exists)
        {0xb, 0xd},       // k = 3
        {0x13, 0x19},     // k = 4
        {0x25, 0x29},     // k = 5
        {0x43, 0x5b},     // k = 6
        {0x83, 0x89},     // k = 7
        {0x11d, 0x12b},   // k = 8
        {0x211, 0x21b},   // k = 9
        {0x409, 0x41b},   // k = 10
        {0x805, 0x817},   // k = 11
        {0x1053, 0x1069}, // k = 12
        {0x201b, 0x2027}, // k = 13
        {0x402b, 0x4039}, // k = 14
        {0x8003, 0x8011}, // k = 15
        {0x1002d, 0x10039}, // k = 16
    };
    if (degree < PrimitivePolynomial::kMinDegree || degree > PrimitivePolynomial::kMaxDegree)
        throw ValidationError("degree must be in 2..16");
    std::vector<PrimitivePolynomial> out;
    out.emplace_back(degree, kTable[degree][0]);
    if (kTable[degree][1] != 0) out.emplace_back(degree, kTable[degree][1]);
    return out;
}

std::vector<std::int64_t> autocorrelation_pm1(const MSequence& seq) {
    const std::size_t length = seq.size();
    const std::size_t words = (length + 63) / 64;

    // The sequence twice over, so any lag window is a contiguous bit range.
    std::vector<std::uint64_t> doubled((2 * length + 63) / 64 + 1, 0);
    for (std::size_t i = 0; i < length; ++i) {
        if (!seq.bit(i)) continue;
        doubled[i >> 6] |= (std::uint64_t{1} << (i & 63));
        const std::size_t j = i + length;
        doubled[j >> 6] |= (std::uint64_t{1} << (j & 63));
    }
    const std::vector<std::uint64_t> base(doubled.begin(), doubled.begin() + words);
    const std::uint64_t tail_mask =
        (length % 64 == 0) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (length % 64)) - 1);

    std::vector<std::int64_t> corr(length);
    corr[0] = static_cast<std::int64_t>(length);
    for (std::size_t lag = 1; lag < length; ++lag) {
        const std::size_t q = lag >> 6;
        const unsigned r = static_cast<unsigned>(lag & 63);
        std::int64_t mismatches = 0;
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t window = doubled[q + w] >> r;
            if (r != 0) window |= doubled[q + w + 1] << (64 - r);
            std::uint64_t diff = window ^ base[w];
            if (w == words - 1) diff &= tail_mask;
            mismatches += std::popcount(diff);
        }
        // With entries in {+1,-1}, each agreeing position contributes +1 and
        // each mismatch -1.
        corr[lag] = static_cast<std::int64_t>(length) - 2 * mismatches;
    }
    return corr;
}

}  // namespace goldgi
