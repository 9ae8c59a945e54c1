#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "goldgi/gi_core.hpp"
#include "json.hpp"

namespace goldgi {

// One experiment, fully determined: every artifact the commands write is a
// pure function of this struct. Round-trips losslessly through JSON.
struct ExperimentConfig {
    std::string family = "gold";
    int k = 12;                    // matrix order for gold/hadamard; random too unless K,m,n set
    std::uint32_t K = 0;           // random family: explicit row count (0 = derive 2^k)
    std::uint32_t m = 0;           // explicit reshape geometry (0 = square from k)
    std::uint32_t n = 0;
    std::string poly_x, poly_y;    // gold: coefficient strings ("" = table defaults)
    std::string seed_x, seed_y;    // gold: register strings ("" = canonical seed)
    std::string random_mode = "binary";
    std::uint64_t rng_seed = 1;    // random family: pattern generator seed
    std::string object = "builtin:shapes";
    bool binarize = false;
    bool has_noise = true;         // JSON noise: null clears this
    NoiseModel noise;              // defaults: eta 0.1, beta 0, burst {0.1, 0.5, contiguous}
    std::uint64_t noise_seed = 1;
    std::string order = "natural";
    std::uint32_t measurements = 0;       // reconstruct: rows to use (0 = all)
    std::vector<std::uint32_t> schedule;  // sweep K values (empty = 256-step default)
    std::string out = "out";
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

// Pipeline stages. Each reads the artifacts of the previous stage from
// cfg.out and writes its own there; all validate before touching the disk.
void cmd_gen(const ExperimentConfig& cfg);
void cmd_simulate(const ExperimentConfig& cfg);
void cmd_reconstruct(const ExperimentConfig& cfg, std::uint32_t measurements);
void cmd_analyze_mc(const ExperimentConfig& cfg);
void cmd_sweep(const ExperimentConfig& cfg);

// Full command-line entry point. Returns the process exit code: 0 success,
// 1 validation failure, 2 I/O failure.
int run_cli(int argc, const char* const* argv);

}  // namespace goldgi
