#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace goldgi {

// Deterministic randomness source. The engine is mt19937_64, whose output
// sequence is pinned by the ISO standard, so a recorded 64-bit seed
// regenerates every draw bit-for-bit on any conforming implementation. The
// mappings from raw words to bits, uniforms, Gaussians and exponentials are
// defined here rather than taken from <random> distributions, which are not
// portable across standard libraries.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    static constexpr const char* algorithm() { return "mt19937_64"; }

    std::uint64_t next_word() { return engine_(); }

    // One bit per call, LSB-first out of dedicated buffer words.
    bool next_bit() {
        if (bits_left_ == 0) {
            bit_buffer_ = next_word();
            bits_left_ = 64;
        }
        const bool b = (bit_buffer_ & 1u) != 0;
        bit_buffer_ >>= 1;
        --bits_left_;
        return b;
    }

    // Uniform on [0, 1) with 53 significant bits.
    double next_unit() { return static_cast<double>(next_word() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log argument.
    double next_unit_positive() {
        return static_cast<double>((next_word() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes exactly two words per draw.
    double next_gaussian() {
        const double u1 = next_unit_positive();
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Unit-mean exponential.
    double next_exponential() { return -std::log(next_unit_positive()); }

    // Fisher-Yates permutation of 0..n-1. The modulo draw has negligible bias
    // and keeps the algorithm a one-liner per step; this is a reproducibility
    // device, not a statistical one.
    std::vector<std::uint32_t> permutation(std::uint32_t n) {
        std::vector<std::uint32_t> p(n);
        for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
        for (std::uint32_t i = n; i > 1; --i) {
            const std::uint32_t j = static_cast<std::uint32_t>(next_word() % i);
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t bit_buffer_ = 0;
    int bits_left_ = 0;
};

}  // namespace goldgi
