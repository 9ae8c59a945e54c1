#include "goldgi/gi_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "goldgi/rng.hpp"

namespace goldgi {

namespace {

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (const double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

// Per-column (per-pixel) means over the K rows actually present.
std::vector<double> column_means(const PatternMatrix& p) {
    const std::uint32_t K = p.rows();
    const std::uint32_t N = p.cols();
    std::vector<double> means(N, 0.0);
    if (p.is_binary()) {
        std::vector<std::int64_t> ones(N, 0);
        for (std::uint32_t r = 0; r < K; ++r) {
            const std::uint64_t* row = p.row_bits(r);
            for (std::uint32_t w = 0; w < p.words_per_row(); ++w) {
                std::uint64_t word = row[w];
                while (word) {
                    ++ones[(w << 6) + static_cast<std::uint32_t>(std::countr_zero(word))];
                    word &= word - 1;
                }
            }
        }
        for (std::uint32_t c = 0; c < N; ++c)
            means[c] = static_cast<double>(ones[c]) / static_cast<double>(K);
    } else {
        for (std::uint32_t c = 0; c < N; ++c) {
            double acc = 0.0;
            for (std::uint32_t r = 0; r < K; ++r) acc += p.value(r, c);
            means[c] = acc / static_cast<double>(K);
        }
    }
    return means;
}

void check_lengths(const PatternMatrix& p, const BucketSeries& d) {
    if (d.size() == 0) throw ValidationError("bucket series is empty");
    if (d.size() != p.rows())
        throw ValidationError("bucket series length does not match pattern row count");
}

std::string recon_source(const PatternMatrix& p, const BucketSeries& d) {
    std::string s = family_name(p.family()) + " K=" + std::to_string(p.rows());
    if (d.clean()) return s + " clean";
    return s + " noisy(seed=" + std::to_string(d.noise()->seed) + ")";
}

}  // namespace

ObjectImage::ObjectImage(ImageGrid grid) : grid_(std::move(grid)) {
    check_grid(grid_);
    for (const double v : grid_.values) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw ValidationError("object values must be finite and within [0,1]");
    }
}

BucketSeries::BucketSeries(std::vector<double> values, std::optional<NoiseRecord> noise)
    : values_(std::move(values)), noise_(std::move(noise)) {
    for (const double v : values_) {
        if (!std::isfinite(v)) throw ValidationError("bucket values must be finite");
    }
}

void validate_noise_model(const NoiseModel& nm) {
    if (!std::isfinite(nm.eta) || nm.eta < 0.0)
        throw ValidationError("noise eta must be finite and non-negative");
    if (!std::isfinite(nm.beta) || nm.beta < 0.0)
        throw ValidationError("noise beta must be finite and non-negative");
    if (nm.burst) {
        if (!std::isfinite(nm.burst->p) || nm.burst->p <= 0.0 || nm.burst->p > 1.0)
            throw ValidationError("burst fraction p must be in (0,1]");
        if (!std::isfinite(nm.burst->alpha) || nm.burst->alpha < 0.0)
            throw ValidationError("burst amplitude must be finite and non-negative");
    }
}

BucketSeries bucket_acquire(const PatternMatrix& p, const ObjectImage& o) {
    if (p.geom_m() != o.m() || p.geom_n() != o.n())
        throw ValidationError("pattern geometry does not match object geometry");
    const std::uint32_t K = p.rows();
    const double* obj = o.grid().values.data();
    std::vector<double> d(K, 0.0);

    parallel_for(K, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            double acc = 0.0;
            if (p.is_binary()) {
                const std::uint64_t* row = p.row_bits(static_cast<std::uint32_t>(s));
                for (std::size_t w = 0; w < p.words_per_row(); ++w) {
                    std::uint64_t word = row[w];
                    while (word) {
                        acc += obj[(w << 6) + static_cast<std::size_t>(std::countr_zero(word))];
                        word &= word - 1;
                    }
                }
            } else {
                for (std::uint32_t c = 0; c < p.cols(); ++c)
                    acc += p.value(static_cast<std::uint32_t>(s), c) * obj[c];
            }
            d[s] = acc;
        }
    });
    return BucketSeries(std::move(d));
}

BucketSeries apply_noise(const BucketSeries& d, const NoiseModel& nm, std::uint64_t seed) {
    if (!d.clean()) throw ValidationError("bucket series already carries a noise record");
    validate_noise_model(nm);
    if (d.size() == 0) throw ValidationError("bucket series is empty");

    const std::size_t K = d.size();
    const double mean = mean_of(d.values());
    SeededRng rng(seed);

    std::vector<double> out(K);
    const double sigma = nm.eta * mean;
    for (std::size_t i = 0; i < K; ++i) {
        const double g = nm.eta > 0.0 ? sigma * rng.next_gaussian() : 0.0;
        out[i] = d.value(i) + nm.beta * mean + g;
    }
    if (nm.burst) {
        std::size_t count = static_cast<std::size_t>(
            std::llround(nm.burst->p * static_cast<double>(K)));
        count = std::min(count, K);
        const double bump = nm.burst->alpha * mean;
        if (nm.burst->random_placement) {
            const std::vector<std::uint32_t> perm =
                rng.permutation(static_cast<std::uint32_t>(K));
            for (std::size_t i = 0; i < count; ++i) out[perm[i]] += bump;
        } else {
            for (std::size_t i = 0; i < count; ++i) out[i] += bump;
        }
    }
    return BucketSeries(std::move(out), NoiseRecord{nm, seed});
}

Reconstruction reconstruct_naive(const PatternMatrix& p, const BucketSeries& d) {
    check_lengths(p, d);
    const std::uint32_t K = p.rows();
    const std::uint32_t N = p.cols();
    const double dbar = mean_of(d.values());

    ImageGrid grid = make_grid(p.geom_m(), p.geom_n());
    parallel_for(N, [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            double msum = 0.0;
            for (std::uint32_t s = 0; s < K; ++s)
                msum += p.value(s, static_cast<std::uint32_t>(c));
            const double mc = msum / static_cast<double>(K);
            double acc = 0.0;
            for (std::uint32_t s = 0; s < K; ++s)
                acc += (d.value(s) - dbar) * (p.value(s, static_cast<std::uint32_t>(c)) - mc);
            grid.values[c] = acc / static_cast<double>(K);
        }
    });
    return Reconstruction{std::move(grid), NormalizationRecord{}, recon_source(p, d)};
}

Reconstruction reconstruct_matrix(const PatternMatrix& p, const BucketSeries& d) {
    check_lengths(p, d);
    const std::uint32_t K = p.rows();
    const std::uint32_t N = p.cols();
    const double dbar = mean_of(d.values());
    const std::vector<double> means = column_means(p);

    ImageGrid grid = make_grid(p.geom_m(), p.geom_n());
    double* out = grid.values.data();
    // Measurement-outer accumulation of (D_s - <D>)·(row_s - <M>); pixels are
    // chunked across workers, each pixel summing measurements in order.
    parallel_for(N, [&](std::size_t begin, std::size_t end) {
        for (std::uint32_t s = 0; s < K; ++s) {
            const double coeff = d.value(s) - dbar;
            if (p.is_binary()) {
                const std::uint64_t* row = p.row_bits(s);
                for (std::size_t c = begin; c < end; ++c) {
                    const double bitval =
                        static_cast<double>((row[c >> 6] >> (c & 63)) & 1u);
                    out[c] += coeff * (bitval - means[c]);
                }
            } else {
                for (std::size_t c = begin; c < end; ++c)
                    out[c] += coeff * (p.value(s, static_cast<std::uint32_t>(c)) - means[c]);
            }
        }
        for (std::size_t c = begin; c < end; ++c) out[c] /= static_cast<double>(K);
    });
    return Reconstruction{std::move(grid), NormalizationRecord{}, recon_source(p, d)};
}

CharacteristicMatrix characteristic_matrix(const PatternMatrix& p) {
    const std::uint32_t K = p.rows();
    const std::uint32_t N = p.cols();
    CharacteristicMatrix mc;
    mc.n = N;
    mc.values.assign(static_cast<std::size_t>(N) * N, 0.0);

    if (p.is_binary()) {
        // M_C(c1,c2) = sum_s M(s,c1)M(s,c2) - K·a_c1·a_c2; the first term is a
        // popcount over packed column bit-vectors.
        const std::size_t colwords = (K + 63) / 64;
        std::vector<std::uint64_t> cols(static_cast<std::size_t>(N) * colwords, 0);
        std::vector<std::int64_t> ones(N, 0);
        for (std::uint32_t r = 0; r < K; ++r) {
            const std::uint64_t* row = p.row_bits(r);
            for (std::uint32_t w = 0; w < p.words_per_row(); ++w) {
                std::uint64_t word = row[w];
                while (word) {
                    const std::uint32_t c =
                        (w << 6) + static_cast<std::uint32_t>(std::countr_zero(word));
                    cols[static_cast<std::size_t>(c) * colwords + (r >> 6)] |=
                        std::uint64_t{1} << (r & 63);
                    ++ones[c];
                    word &= word - 1;
                }
            }
        }
        parallel_for(N, [&](std::size_t begin, std::size_t end) {
            for (std::size_t c1 = begin; c1 < end; ++c1) {
                const std::uint64_t* col1 = cols.data() + c1 * colwords;
                for (std::size_t c2 = c1; c2 < N; ++c2) {
                    const std::uint64_t* col2 = cols.data() + c2 * colwords;
                    std::int64_t dot = 0;
                    for (std::size_t w = 0; w < colwords; ++w)
                        dot += std::popcount(col1[w] & col2[w]);
                    const double val =
                        static_cast<double>(dot) -
                        static_cast<double>(ones[c1]) * static_cast<double>(ones[c2]) /
                            static_cast<double>(K);
                    mc.values[c1 * N + c2] = val;
                    mc.values[c2 * N + c1] = val;
                }
            }
        });
        return mc;
    }

    const std::vector<double> means = column_means(p);
    parallel_for(N, [&](std::size_t begin, std::size_t end) {
        for (std::size_t c1 = begin; c1 < end; ++c1) {
            for (std::size_t c2 = c1; c2 < N; ++c2) {
                double acc = 0.0;
                for (std::uint32_t s = 0; s < K; ++s)
                    acc += (p.value(s, static_cast<std::uint32_t>(c1)) - means[c1]) *
                           (p.value(s, static_cast<std::uint32_t>(c2)) - means[c2]);
                mc.values[c1 * N + c2] = acc;
                mc.values[c2 * N + c1] = acc;
            }
        }
    });
    return mc;
}

CharacteristicMatrix normalize_characteristic(CharacteristicMatrix c) {
    if (c.normalized) throw ValidationError("characteristic matrix is already normalized");
    if (c.n == 0 || c.values.empty()) throw ValidationError("empty characteristic matrix");

    // Row-major scan with strict > keeps the first occurrence: lowest row,
    // then lowest column.
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.values.size(); ++i)
        if (c.values[i] > c.values[best]) best = i;
    const std::size_t max_row = best / c.n;

    double norm_sq = 0.0;
    for (std::uint32_t j = 0; j < c.n; ++j) {
        const double v = c.at(static_cast<std::uint32_t>(max_row), j);
        norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm == 0.0)
        throw ValidationError("cannot normalize an all-zero characteristic matrix");
    for (double& v : c.values) v /= norm;
    c.normalized = true;
    return c;
}

ImageGrid minmax_normalize_grid(const ImageGrid& g, bool* degenerate) {
    check_grid(g);
    const auto [mn_it, mx_it] = std::minmax_element(g.values.begin(), g.values.end());
    const double lo = *mn_it;
    const double hi = *mx_it;
    ImageGrid out = g;
    if (hi == lo) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        if (degenerate) *degenerate = true;
        return out;
    }
    const double span = hi - lo;
    for (double& v : out.values) v = (v - lo) / span;
    if (degenerate) *degenerate = false;
    return out;
}

Reconstruction minmax_normalize(const Reconstruction& r) {
    bool degenerate = false;
    ImageGrid grid = minmax_normalize_grid(r.grid, &degenerate);
    return Reconstruction{std::move(grid),
                          NormalizationRecord{NormalizationKind::minmax, degenerate}, r.source};
}

}  // namespace goldgi
