#include "goldgi/harness.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "CLI11.hpp"
#include "goldgi/imageio.hpp"
#include "goldgi/metrics.hpp"
#include "goldgi/patterns.hpp"
#include "goldgi/seqgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace goldgi {

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    try {
        cfg.family = j.value("family", cfg.family);
        cfg.k = j.value("k", cfg.k);
        cfg.K = j.value("K", cfg.K);
        cfg.m = j.value("m", cfg.m);
        cfg.n = j.value("n", cfg.n);
        cfg.poly_x = j.value("poly_x", cfg.poly_x);
        cfg.poly_y = j.value("poly_y", cfg.poly_y);
        cfg.seed_x = j.value("seed_x", cfg.seed_x);
        cfg.seed_y = j.value("seed_y", cfg.seed_y);
        cfg.random_mode = j.value("random_mode", cfg.random_mode);
        cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
        cfg.object = j.value("object", cfg.object);
        cfg.binarize = j.value("binarize", cfg.binarize);
        if (j.contains("noise")) {
            if (j.at("noise").is_null()) {
                cfg.has_noise = false;
            } else {
                cfg.has_noise = true;
                cfg.noise = noise_model_from_json(j.at("noise"));
            }
        }
        cfg.noise_seed = j.value("noise_seed", cfg.noise_seed);
        cfg.order = j.value("order", cfg.order);
        cfg.measurements = j.value("measurements", cfg.measurements);
        if (j.contains("schedule"))
            cfg.schedule = j.at("schedule").get<std::vector<std::uint32_t>>();
        cfg.out = j.value("out", cfg.out);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad config field: ") + e.what());
    }
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json j{{"family", cfg.family},
           {"k", cfg.k},
           {"K", cfg.K},
           {"m", cfg.m},
           {"n", cfg.n},
           {"poly_x", cfg.poly_x},
           {"poly_y", cfg.poly_y},
           {"seed_x", cfg.seed_x},
           {"seed_y", cfg.seed_y},
           {"random_mode", cfg.random_mode},
           {"rng_seed", cfg.rng_seed},
           {"object", cfg.object},
           {"binarize", cfg.binarize},
           {"noise_seed", cfg.noise_seed},
           {"order", cfg.order},
           {"measurements", cfg.measurements},
           {"schedule", cfg.schedule},
           {"out", cfg.out}};
    j["noise"] = cfg.has_noise ? noise_model_to_json(cfg.noise) : json(nullptr);
    return j;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("config is not valid JSON (" + path + "): " + e.what());
    }
    return config_from_json(j);
}

namespace {

void ensure_out_dir(const ExperimentConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out + ": " + ec.message());
}

std::string pattern_stem(const ExperimentConfig& cfg) {
    return cfg.out + "/patterns_" + cfg.family;
}

std::string buckets_stem(const ExperimentConfig& cfg, const std::string& env) {
    return cfg.out + "/buckets_" + cfg.family + "_" + env;
}

// Square geometry from k unless the config pins one explicitly.
void resolve_config_geometry(const ExperimentConfig& cfg, std::uint32_t& m, std::uint32_t& n) {
    m = cfg.m;
    n = cfg.n;
    if (m != 0 || n != 0) {
        if (m == 0 || n == 0)
            throw ValidationError("config must set both m and n (or neither)");
        return;
    }
    if (cfg.k < 2 || cfg.k > 16)
        throw ValidationError("k must be in 2..16, got " + std::to_string(cfg.k));
    if (cfg.k % 2 != 0)
        throw ValidationError("odd k " + std::to_string(cfg.k) +
                              " has no square reshape; set m and n with m*n = 2^k");
    m = n = 1u << (cfg.k / 2);
}

PatternMatrix build_patterns_from_config(const ExperimentConfig& cfg) {
    const PatternFamily fam = parse_family(cfg.family);
    if (fam == PatternFamily::random) {
        std::uint32_t m, n;
        resolve_config_geometry(cfg, m, n);
        const std::uint32_t K = cfg.K != 0 ? cfg.K : m * n;
        return build_random_patterns(K, m, n, cfg.rng_seed, parse_random_mode(cfg.random_mode));
    }
    if (fam == PatternFamily::hadamard) return build_hadamard_matrix(cfg.k, cfg.m, cfg.n);

    const std::vector<PrimitivePolynomial> table = polynomial_table(cfg.k);
    const PrimitivePolynomial px =
        cfg.poly_x.empty() ? table[0] : PrimitivePolynomial::parse(cfg.poly_x);
    const PrimitivePolynomial py =
        cfg.poly_y.empty() ? table[table.size() > 1 ? 1 : 0]
                           : PrimitivePolynomial::parse(cfg.poly_y);
    const std::uint32_t sx =
        cfg.seed_x.empty() ? make_seed_state(px).reg : parse_register(cfg.seed_x, px.degree());
    const std::uint32_t sy =
        cfg.seed_y.empty() ? make_seed_state(py).reg : parse_register(cfg.seed_y, py.degree());
    const MSequence X = generate_m_sequence(px, sx);
    const MSequence Y = generate_m_sequence(py, sy);
    return build_gold_matrix(X, Y, cfg.m, cfg.n);
}

PatternMatrix load_pattern_set(const ExperimentConfig& cfg) {
    const std::string sidecar = pattern_stem(cfg) + ".json";
    if (!fs::exists(sidecar))
        throw IoError("pattern set not found (" + sidecar + "); run the gen command first");
    return load_patterns(sidecar);
}

BucketSeries select_bucket_rows(const BucketSeries& d, const std::vector<std::uint32_t>& idx,
                                std::uint32_t count) {
    std::vector<double> values(count);
    for (std::uint32_t i = 0; i < count; ++i) values[i] = d.value(idx[i]);
    return BucketSeries(std::move(values), d.noise());
}

void append_metrics_row(const std::string& path, std::uint32_t K, const QualityReport& rep) {
    const bool fresh = !fs::exists(path);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open metrics CSV for writing: " + path);
    if (fresh) out << "K,mse,psnr\n";
    out << K << ',' << format_double(rep.mse) << ',' << format_double(rep.psnr) << '\n';
    if (!out) throw IoError("failed writing metrics CSV: " + path);
}

std::vector<std::uint32_t> sweep_schedule(const ExperimentConfig& cfg, std::uint32_t K_full) {
    std::vector<std::uint32_t> schedule = cfg.schedule;
    if (schedule.empty()) {
        for (std::uint32_t K = 256; K < K_full; K += 256) schedule.push_back(K);
        schedule.push_back(K_full);
    }
    std::uint32_t prev = 0;
    for (const std::uint32_t K : schedule) {
        if (K == 0) throw ValidationError("schedule values must be positive");
        if (K <= prev) throw ValidationError("schedule values must be strictly ascending");
        if (K > K_full)
            throw ValidationError("schedule value " + std::to_string(K) +
                                  " exceeds available measurements " + std::to_string(K_full));
        prev = K;
    }
    return schedule;
}

struct EnvSeries {
    std::string name;  // clean | noisy
    BucketSeries buckets;
};

std::vector<EnvSeries> load_env_series(const ExperimentConfig& cfg,
                                       const PatternMatrix& patterns) {
    std::vector<EnvSeries> envs;
    for (const std::string env : {"clean", "noisy"}) {
        if (env == "noisy" && !cfg.has_noise) continue;
        const std::string stem = buckets_stem(cfg, env);
        if (!fs::exists(stem + ".csv"))
            throw IoError("bucket series not found (" + stem +
                          ".csv); run the simulate command first");
        BucketSeries d = load_buckets(stem + ".csv", stem + ".json");
        if (d.size() != patterns.rows())
            throw ValidationError("bucket series length " + std::to_string(d.size()) +
                                  " does not match pattern row count " +
                                  std::to_string(patterns.rows()));
        envs.push_back(EnvSeries{env, std::move(d)});
    }
    return envs;
}

}  // namespace

void cmd_gen(const ExperimentConfig& cfg) {
    PatternMatrix p = build_patterns_from_config(cfg);
    ensure_out_dir(cfg);
    const std::string stem = pattern_stem(cfg);
    const std::string payload = stem + (p.is_binary() ? ".bits" : ".f64");
    save_patterns(p, payload, stem + ".json");

    ImageGrid preview = reshape_row(p, 1);
    if (!p.is_binary()) preview = minmax_normalize_grid(preview);
    save_pgm8(preview, stem + "_row1.pgm");

    if (p.family() == PatternFamily::gold) {
        const PrimitivePolynomial px = PrimitivePolynomial::parse(p.provenance().poly_x);
        const PrimitivePolynomial py = PrimitivePolynomial::parse(p.provenance().poly_y);
        std::printf("gold LFSRs: X %s (%s, %s) seed %s; Y %s (%s, %s) seed %s\n",
                    px.to_binary_string().c_str(), px.to_hex_string().c_str(),
                    px.to_algebraic_string().c_str(), p.provenance().seed_x.c_str(),
                    py.to_binary_string().c_str(), py.to_hex_string().c_str(),
                    py.to_algebraic_string().c_str(), p.provenance().seed_y.c_str());
    }
    std::printf("wrote %u x %u %s pattern set: %s\n", p.rows(), p.cols(), cfg.family.c_str(),
                payload.c_str());
}

void cmd_simulate(const ExperimentConfig& cfg) {
    const PatternMatrix p = load_pattern_set(cfg);
    const ObjectImage obj = load_object(cfg.object, p.geom_m(), p.geom_n(), cfg.binarize);
    ensure_out_dir(cfg);

    const BucketSeries clean = bucket_acquire(p, obj);
    const std::string clean_stem = buckets_stem(cfg, "clean");
    save_buckets(clean, clean_stem + ".csv", clean_stem + ".json");
    std::printf("wrote %zu clean bucket values: %s.csv\n", clean.size(), clean_stem.c_str());

    if (cfg.has_noise) {
        const BucketSeries noisy = apply_noise(clean, cfg.noise, cfg.noise_seed);
        const std::string noisy_stem = buckets_stem(cfg, "noisy");
        save_buckets(noisy, noisy_stem + ".csv", noisy_stem + ".json");
        std::printf("wrote %zu noisy bucket values (seed %llu): %s.csv\n", noisy.size(),
                    static_cast<unsigned long long>(cfg.noise_seed), noisy_stem.c_str());
    }
}

void cmd_reconstruct(const ExperimentConfig& cfg, std::uint32_t measurements) {
    const PatternMatrix p = load_pattern_set(cfg);
    const ObjectImage obj = load_object(cfg.object, p.geom_m(), p.geom_n(), cfg.binarize);
    const std::uint32_t K = measurements != 0 ? measurements : p.rows();
    if (K > p.rows())
        throw ValidationError("requested " + std::to_string(K) + " measurements but only " +
                              std::to_string(p.rows()) + " are available");
    const RowOrder order = parse_order(cfg.order);
    const std::vector<std::uint32_t> idx = selection_order(order, p.rows());
    const ImageGrid object_norm = minmax_normalize_grid(obj.grid());
    ensure_out_dir(cfg);

    const PatternMatrix psel = select_rows(p, order, K);
    for (const EnvSeries& env : load_env_series(cfg, p)) {
        const BucketSeries dsel = select_bucket_rows(env.buckets, idx, K);
        const Reconstruction rec = minmax_normalize(reconstruct_matrix(psel, dsel));
        const QualityReport rep = quality_report(rec.grid, object_norm, 1.0);

        const std::string stem =
            cfg.out + "/recon_" + cfg.family + "_" + env.name + "_K" + std::to_string(K);
        save_pgm16(rec.grid, stem + ".pgm");
        save_csv_float(rec.grid, stem + ".csv");
        append_metrics_row(cfg.out + "/sweep_" + cfg.family + "_" + env.name + ".csv", K, rep);
        std::printf("%s %s K=%u: mse=%s psnr=%s -> %s.pgm\n", cfg.family.c_str(),
                    env.name.c_str(), K, format_double(rep.mse).c_str(),
                    format_double(rep.psnr).c_str(), stem.c_str());
    }
}

void cmd_analyze_mc(const ExperimentConfig& cfg) {
    const PatternMatrix p = load_pattern_set(cfg);
    if (p.cols() > 4096)
        throw ValidationError("pixel count " + std::to_string(p.cols()) +
                              " too large for dense characteristic analysis (limit 4096)");
    CharacteristicMatrix mc = normalize_characteristic(characteristic_matrix(p));
    ensure_out_dir(cfg);

    ImageGrid grid;
    grid.m = mc.n;
    grid.n = mc.n;
    grid.values = std::move(mc.values);
    const std::string stem = cfg.out + "/mc_" + cfg.family;
    save_csv_float(grid, stem + ".csv");
    save_pgm8(minmax_normalize_grid(grid), stem + ".pgm");
    std::printf("wrote normalized %u x %u characteristic matrix: %s.csv\n", grid.m, grid.n,
                stem.c_str());
}

void cmd_sweep(const ExperimentConfig& cfg) {
    const PatternMatrix p = load_pattern_set(cfg);
    const ObjectImage obj = load_object(cfg.object, p.geom_m(), p.geom_n(), cfg.binarize);
    const std::vector<std::uint32_t> schedule = sweep_schedule(cfg, p.rows());
    const RowOrder order = parse_order(cfg.order);
    const std::vector<std::uint32_t> idx = selection_order(order, p.rows());
    const ImageGrid object_norm = minmax_normalize_grid(obj.grid());
    ensure_out_dir(cfg);

    for (const EnvSeries& env : load_env_series(cfg, p)) {
        std::vector<std::string> rows;
        for (const std::uint32_t K : schedule) {
            const PatternMatrix psel = select_rows(p, order, K);
            const BucketSeries dsel = select_bucket_rows(env.buckets, idx, K);
            const Reconstruction rec = minmax_normalize(reconstruct_matrix(psel, dsel));
            const QualityReport rep = quality_report(rec.grid, object_norm, 1.0);
            save_pgm16(rec.grid, cfg.out + "/sweep_" + cfg.family + "_" + env.name + "_K" +
                                     std::to_string(K) + ".pgm");
            rows.push_back(std::to_string(K) + "," + format_double(rep.mse) + "," +
                           format_double(rep.psnr));
        }
        const std::string csv_path = cfg.out + "/sweep_" + cfg.family + "_" + env.name + ".csv";
        std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open sweep CSV for writing: " + csv_path);
        out << "K,mse,psnr\n";
        for (const std::string& row : rows) out << row << '\n';
        if (!out) throw IoError("failed writing sweep CSV: " + csv_path);
        std::printf("wrote %zu-point %s sweep: %s\n", schedule.size(), env.name.c_str(),
                    csv_path.c_str());
    }
}

namespace {

std::optional<BurstSpec> parse_burst_flag(const std::string& text) {
    if (text == "none") return std::nullopt;
    const std::size_t c1 = text.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : text.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ValidationError("burst flag expects p,alpha,mode or none: " + text);
    BurstSpec burst;
    char* end = nullptr;
    const std::string p_str = text.substr(0, c1);
    burst.p = std::strtod(p_str.c_str(), &end);
    if (end == p_str.c_str() || *end != '\0')
        throw ValidationError("bad burst fraction: " + p_str);
    const std::string a_str = text.substr(c1 + 1, c2 - c1 - 1);
    burst.alpha = std::strtod(a_str.c_str(), &end);
    if (end == a_str.c_str() || *end != '\0')
        throw ValidationError("bad burst amplitude: " + a_str);
    const std::string mode = text.substr(c2 + 1);
    if (mode == "contiguous") {
        burst.random_placement = false;
    } else if (mode == "random") {
        burst.random_placement = true;
    } else {
        throw ValidationError("burst mode must be contiguous or random: " + mode);
    }
    return burst;
}

std::vector<std::uint32_t> parse_schedule_flag(const std::string& text) {
    std::vector<std::uint32_t> schedule;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        const std::string cell = text.substr(pos, next - pos);
        if (cell.empty() || cell.find_first_not_of("0123456789") != std::string::npos)
            throw ValidationError("bad schedule entry: '" + cell + "'");
        schedule.push_back(static_cast<std::uint32_t>(std::stoul(cell)));
        if (next == text.size()) break;
        pos = next + 1;
    }
    if (schedule.empty()) throw ValidationError("empty schedule");
    return schedule;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Ghost-imaging simulation with Gold, Hadamard and random pattern families"};
    app.require_subcommand(1);

    std::string config_path, family, object, order, burst, schedule, out_dir, random_mode;
    std::string poly_x, poly_y, seed_x, seed_y;
    int k = 0;
    double eta = 0.0, beta = 0.0;
    bool binarize = false;
    std::uint64_t rng_seed = 0;
    std::uint32_t measurements = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON experiment config");
        sub->add_option("--family", family, "gold | hadamard | random");
        sub->add_option("--k", k, "matrix order (K = N = 2^k)");
        sub->add_option("--object", object, "object image path or builtin:<name>");
        sub->add_flag("--binarize", binarize, "threshold the object at 0.5");
        sub->add_option("--noise-eta", eta, "Gaussian noise level (sigma = eta*mean(D))");
        sub->add_option("--noise-beta", beta, "constant offset level (beta*mean(D))");
        sub->add_option("--burst", burst, "burst noise p,alpha,mode (mode: contiguous|random) or none");
        sub->add_option("--order", order, "row order: natural | perm:<seed>");
        sub->add_option("--measurements", measurements, "measurement count for reconstruction");
        sub->add_option("--schedule", schedule, "comma-separated sweep K values");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--rng-seed", rng_seed, "seed for random patterns and noise");
        sub->add_option("--poly-x", poly_x, "first LFSR polynomial (binary, hex or algebraic)");
        sub->add_option("--poly-y", poly_y, "second LFSR polynomial (binary, hex or algebraic)");
        sub->add_option("--seed-x", seed_x, "first LFSR register bits a_0..a_{k-1}");
        sub->add_option("--seed-y", seed_y, "second LFSR register bits a_0..a_{k-1}");
        sub->add_option("--random-mode", random_mode, "random family mode: binary | negexp");
        return sub;
    };
    CLI::App* gen = add_common(app.add_subcommand("gen", "generate a pattern set"));
    CLI::App* simulate =
        add_common(app.add_subcommand("simulate", "acquire clean and noisy bucket series"));
    CLI::App* reconstruct =
        add_common(app.add_subcommand("reconstruct", "correlate buckets back into an image"));
    CLI::App* analyze =
        add_common(app.add_subcommand("analyze-mc", "export the normalized characteristic matrix"));
    CLI::App* sweep =
        add_common(app.add_subcommand("sweep", "measurement-count sweep with MSE/PSNR curves"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        ExperimentConfig cfg;
        if (sub->count("--config")) cfg = load_config(config_path);
        if (sub->count("--family")) cfg.family = family;
        if (sub->count("--k")) cfg.k = k;
        if (sub->count("--object")) cfg.object = object;
        if (sub->count("--binarize")) cfg.binarize = binarize;
        if (sub->count("--noise-eta")) {
            cfg.noise.eta = eta;
            cfg.has_noise = true;
        }
        if (sub->count("--noise-beta")) {
            cfg.noise.beta = beta;
            cfg.has_noise = true;
        }
        if (sub->count("--burst")) {
            cfg.noise.burst = parse_burst_flag(burst);
            cfg.has_noise = true;
        }
        if (sub->count("--order")) cfg.order = order;
        if (sub->count("--measurements")) cfg.measurements = measurements;
        if (sub->count("--schedule")) cfg.schedule = parse_schedule_flag(schedule);
        if (sub->count("--out")) cfg.out = out_dir;
        if (sub->count("--rng-seed")) {
            cfg.rng_seed = rng_seed;
            cfg.noise_seed = rng_seed;
        }
        if (sub->count("--poly-x")) cfg.poly_x = poly_x;
        if (sub->count("--poly-y")) cfg.poly_y = poly_y;
        if (sub->count("--seed-x")) cfg.seed_x = seed_x;
        if (sub->count("--seed-y")) cfg.seed_y = seed_y;
        if (sub->count("--random-mode")) cfg.random_mode = random_mode;

        if (sub == gen) cmd_gen(cfg);
        if (sub == simulate) cmd_simulate(cfg);
        if (sub == reconstruct) cmd_reconstruct(cfg, cfg.measurements);
        if (sub == analyze) cmd_analyze_mc(cfg);
        if (sub == sweep) cmd_sweep(cfg);
        return 0;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 2;
    }
}

}  // namespace goldgi
