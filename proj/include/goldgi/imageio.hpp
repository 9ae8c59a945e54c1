#pragma once

#include <cstdint>
#include <string>

#include "goldgi/gi_core.hpp"
#include "goldgi/grid.hpp"
#include "json.hpp"

namespace goldgi {

// Binary PGM (P5), 8-bit when maxval fits a byte, otherwise 16-bit with
// big-endian samples. Loaded values are scaled by 1/maxval into [0,1].
ImageGrid load_pgm(const std::string& path);

// Quantizes [0,1] by round-half-up (floor(v·max + 0.5), clamped).
void save_pgm8(const ImageGrid& g, const std::string& path);
void save_pgm16(const ImageGrid& g, const std::string& path);

// Full-precision row-major CSV; round-trips doubles exactly.
ImageGrid load_csv_float(const std::string& path);
void save_csv_float(const ImageGrid& g, const std::string& path);

// Procedural 64×64 stand-in objects; both hold their minimum value 0 at
// pixel (0,0), which the centered correlation estimator cannot recover.
//   shapes   — binary scene: rectangle, ring, disk and stripes on black
//   gradient — grayscale corner-to-corner ramp
ImageGrid builtin_object(const std::string& name);

// Loads "builtin:<name>" or a .pgm/.csv file, nearest-neighbor resamples to
// the target geometry when needed (source pixel r·src/dst, which keeps pixel
// (0,0) in place), then optionally thresholds at 0.5.
ObjectImage load_object(const std::string& source, std::uint32_t target_m,
                        std::uint32_t target_n, bool binarize);

// Bucket CSV: header `s,D`, 1-based measurement index, full-precision
// values, LF line endings. The sidecar records the noise model and seed, or
// null for a clean series.
void save_buckets(const BucketSeries& d, const std::string& csv_path,
                  const std::string& sidecar_path);
BucketSeries load_buckets(const std::string& csv_path, const std::string& sidecar_path);

nlohmann::json noise_model_to_json(const NoiseModel& nm);
NoiseModel noise_model_from_json(const nlohmann::json& j);

}  // namespace goldgi
