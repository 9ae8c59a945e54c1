#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "goldgi/common.hpp"
#include "goldgi/grid.hpp"
#include "goldgi/patterns.hpp"

namespace goldgi {

// Target reflectivity map; every value must be finite and inside [0,1].
class ObjectImage {
public:
    explicit ObjectImage(ImageGrid grid);

    const ImageGrid& grid() const { return grid_; }
    std::uint32_t m() const { return grid_.m; }
    std::uint32_t n() const { return grid_.n; }

private:
    ImageGrid grid_;
};

// Detector-side noise: per-measurement additive Gaussian with sigma =
// eta·mean(D), a constant offset beta·mean(D), and an optional burst that
// adds alpha·mean(D) to round(p·K) measurements — the first ones when
// placement is contiguous, a seeded random subset otherwise.
struct BurstSpec {
    double p = 0.1;
    double alpha = 0.5;
    bool random_placement = false;
};

struct NoiseModel {
    double eta = 0.1;
    double beta = 0.0;
    std::optional<BurstSpec> burst = BurstSpec{};
};

void validate_noise_model(const NoiseModel& nm);

struct NoiseRecord {
    NoiseModel model;
    std::uint64_t seed = 0;
};

// K detector readings. A clean series carries no noise record; apply_noise
// attaches one so a series can only be corrupted once.
class BucketSeries {
public:
    explicit BucketSeries(std::vector<double> values,
                          std::optional<NoiseRecord> noise = std::nullopt);

    std::size_t size() const { return values_.size(); }
    double value(std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    bool clean() const { return !noise_.has_value(); }
    const std::optional<NoiseRecord>& noise() const { return noise_; }

private:
    std::vector<double> values_;
    std::optional<NoiseRecord> noise_;
};

enum class NormalizationKind { none, minmax };

struct NormalizationRecord {
    NormalizationKind kind = NormalizationKind::none;
    bool degenerate = false;  // constant input collapsed to all zeros
};

struct Reconstruction {
    ImageGrid grid;
    NormalizationRecord norm;
    std::string source;  // free-form provenance: pattern family, K, noise state
};

struct CharacteristicMatrix {
    std::uint32_t n = 0;  // side length N
    std::vector<double> values;
    bool normalized = false;

    double at(std::uint32_t i, std::uint32_t j) const {
        return values[static_cast<std::size_t>(i) * n + j];
    }
    double& at(std::uint32_t i, std::uint32_t j) {
        return values[static_cast<std::size_t>(i) * n + j];
    }
};

// D^(s) = sum over pixels of pattern s times object: the matrix-vector
// product M·vec(O).
BucketSeries bucket_acquire(const PatternMatrix& p, const ObjectImage& o);

// D' = D + beta·mean(D) + Gaussian(0, eta·mean(D)), then the burst addition.
// One SeededRng(seed) drives everything: K Gaussian draws first (taken only
// when eta > 0), then the placement permutation for a random-placement
// burst. Rejects series that already carry a noise record.
BucketSeries apply_noise(const BucketSeries& d, const NoiseModel& nm, std::uint64_t seed);

// O_GI(x,y) = (1/K)·sum_s (D_s - <D>)(I_s(x,y) - <I(x,y)>), accumulated
// pixel-by-pixel exactly as written.
Reconstruction reconstruct_naive(const PatternMatrix& p, const BucketSeries& d);

// Matrix form of the same estimator: (1/K)·(M - 1<M>)ᵀ(D - 1<D>), built as a
// measurement-outer accumulation over the packed pattern rows. Agrees with
// reconstruct_naive to within summation rounding.
Reconstruction reconstruct_matrix(const PatternMatrix& p, const BucketSeries& d);

// M_C = (M - 1<M>)ᵀ(M - 1<M>), the centered Gram matrix over pixels.
CharacteristicMatrix characteristic_matrix(const PatternMatrix& p);

// Divides every entry by the Euclidean norm of the row holding the global
// maximum (ties: lowest row, then lowest column). Rejects already-normalized
// and all-zero input.
CharacteristicMatrix normalize_characteristic(CharacteristicMatrix c);

// Affine map onto [0,1]; constant input maps to all zeros and sets the
// degenerate flag.
ImageGrid minmax_normalize_grid(const ImageGrid& g, bool* degenerate = nullptr);
Reconstruction minmax_normalize(const Reconstruction& r);

}  // namespace goldgi
