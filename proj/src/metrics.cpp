#include "goldgi/metrics.hpp"

#include <cmath>
#include <limits>

namespace goldgi {

double mse(const ImageGrid& a, const ImageGrid& b) {
    check_grid(a);
    check_grid(b);
    if (!a.same_geometry(b)) throw ValidationError("mse requires identical image geometry");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double diff = a.values[i] - b.values[i];
        acc += diff * diff;
    }
    return acc / static_cast<double>(a.values.size());
}

double psnr(const ImageGrid& a, const ImageGrid& b, double max_val) {
    if (!(max_val > 0.0)) throw ValidationError("psnr max_val must be positive");
    const double m = mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(max_val * max_val / m);
}

bool psnr_is_infinite(double value) { return std::isinf(value); }

QualityReport quality_report(const ImageGrid& a, const ImageGrid& b, double max_val) {
    QualityReport r;
    r.mse = mse(a, b);
    r.psnr = psnr(a, b, max_val);
    r.max_val = max_val;
    r.pixel_count = a.values.size();
    return r;
}

}  // namespace goldgi
