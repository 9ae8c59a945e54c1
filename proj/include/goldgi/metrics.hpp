#pragma once

#include <cstddef>

#include "goldgi/grid.hpp"

namespace goldgi {

struct QualityReport {
    double mse = 0.0;
    double psnr = 0.0;  // +infinity exactly when mse == 0
    double max_val = 1.0;
    std::size_t pixel_count = 0;
};

// (1/(m·n))·sum of squared differences. Geometries must match.
double mse(const ImageGrid& a, const ImageGrid& b);

// 10·log10(max_val²/mse); +infinity when the images coincide. The infinite
// case is the IEEE infinity, never a sentinel magnitude, and CSV writers
// render it as the literal `inf`.
double psnr(const ImageGrid& a, const ImageGrid& b, double max_val = 1.0);

bool psnr_is_infinite(double value);

QualityReport quality_report(const ImageGrid& a, const ImageGrid& b, double max_val = 1.0);

}  // namespace goldgi
