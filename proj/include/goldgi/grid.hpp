#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "goldgi/common.hpp"

namespace goldgi {

// Row-major 2-D array of doubles. m counts rows, n counts columns; pixel
// (r, c) lives at values[r*n + c].
struct ImageGrid {
    std::uint32_t m = 0;
    std::uint32_t n = 0;
    std::vector<double> values;

    double at(std::uint32_t r, std::uint32_t c) const {
        return values[static_cast<std::size_t>(r) * n + c];
    }
    double& at(std::uint32_t r, std::uint32_t c) {
        return values[static_cast<std::size_t>(r) * n + c];
    }
    std::size_t pixel_count() const { return values.size(); }
    bool same_geometry(const ImageGrid& other) const { return m == other.m && n == other.n; }
};

inline ImageGrid make_grid(std::uint32_t m, std::uint32_t n, double fill = 0.0) {
    if (m == 0 || n == 0) throw ValidationError("grid dimensions must be positive");
    return ImageGrid{m, n, std::vector<double>(static_cast<std::size_t>(m) * n, fill)};
}

inline void check_grid(const ImageGrid& g) {
    if (g.m == 0 || g.n == 0) throw ValidationError("grid dimensions must be positive");
    if (g.values.size() != static_cast<std::size_t>(g.m) * g.n)
        throw ValidationError("grid value count does not match geometry");
}

}  // namespace goldgi
