#include "goldgi/patterns.hpp"

#include <bit>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <mutex>

#include "goldgi/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace goldgi {

namespace {

// Square-by-default geometry: m = n = 2^(k/2) for even k, explicit otherwise.
void resolve_geometry(int k, std::uint32_t& m, std::uint32_t& n) {
    const std::uint32_t N = 1u << k;
    if (m == 0 && n == 0) {
        if (k % 2 != 0)
            throw ValidationError(
                "odd order " + std::to_string(k) +
                " has no square reshape; pass an explicit geometry with m*n = 2^k");
        m = n = 1u << (k / 2);
        return;
    }
    if (m == 0 || n == 0) throw ValidationError("geometry must set both m and n (or neither)");
    if (static_cast<std::uint64_t>(m) * n != N)
        throw ValidationError("geometry m*n must equal 2^k");
}

void check_order_range(int k) {
    if (k < PrimitivePolynomial::kMinDegree || k > PrimitivePolynomial::kMaxDegree)
        throw ValidationError("matrix order must be in 2..16, got " + std::to_string(k));
}

}  // namespace

std::string family_name(PatternFamily f) {
    switch (f) {
        case PatternFamily::gold: return "gold";
        case PatternFamily::hadamard: return "hadamard";
        case PatternFamily::random: return "random";
    }
    throw ValidationError("unknown pattern family");
}

PatternFamily parse_family(const std::string& name) {
    if (name == "gold") return PatternFamily::gold;
    if (name == "hadamard") return PatternFamily::hadamard;
    if (name == "random") return PatternFamily::random;
    throw ValidationError("unknown pattern family: " + name);
}

std::string random_mode_name(RandomMode mode) {
    return mode == RandomMode::binary ? "binary" : "negexp";
}

RandomMode parse_random_mode(const std::string& name) {
    if (name == "binary") return RandomMode::binary;
    if (name == "negexp") return RandomMode::negexp;
    throw ValidationError("unknown random pattern mode: " + name);
}

PatternMatrix::PatternMatrix(std::uint32_t rows, std::uint32_t m, std::uint32_t n,
                             PatternFamily family, std::vector<std::uint64_t> packed,
                             PatternProvenance prov)
    : rows_(rows),
      cols_(m * n),
      m_(m),
      n_(n),
      family_(family),
      binary_(true),
      packed_(std::move(packed)),
      prov_(std::move(prov)) {
    if (rows_ == 0 || m_ == 0 || n_ == 0)
        throw ValidationError("pattern matrix dimensions must be positive");
    if (packed_.size() != static_cast<std::size_t>(rows_) * words_per_row())
        throw ValidationError("packed pattern storage does not match geometry");
}

PatternMatrix::PatternMatrix(std::uint32_t rows, std::uint32_t m, std::uint32_t n,
                             PatternFamily family, std::vector<double> values,
                             PatternProvenance prov)
    : rows_(rows),
      cols_(m * n),
      m_(m),
      n_(n),
      family_(family),
      binary_(false),
      values_(std::move(values)),
      prov_(std::move(prov)) {
    if (rows_ == 0 || m_ == 0 || n_ == 0)
        throw ValidationError("pattern matrix dimensions must be positive");
    if (values_.size() != static_cast<std::size_t>(rows_) * cols_)
        throw ValidationError("continuous pattern storage does not match geometry");
}

const std::uint64_t* PatternMatrix::row_bits(std::uint32_t r) const {
    if (!binary_) throw ValidationError("pattern matrix is not binary");
    return packed_.data() + static_cast<std::size_t>(r) * words_per_row();
}

bool PatternMatrix::same_content(const PatternMatrix& other) const {
    return binary_ == other.binary_ && rows_ == other.rows_ && cols_ == other.cols_ &&
           m_ == other.m_ && n_ == other.n_ && packed_ == other.packed_ &&
           values_ == other.values_;
}

PatternMatrix build_gold_matrix(const MSequence& X, const MSequence& Y, std::uint32_t m,
                                std::uint32_t n) {
    if (X.order() != Y.order())
        throw ValidationError("gold matrix needs two m-sequences of the same order");
    const int k = X.order();
    check_order_range(k);
    resolve_geometry(k, m, n);
    if (X.source_poly() == Y.source_poly())
        std::fprintf(stderr,
                     "warning: gold matrix built from a single polynomial (%s); rows stay "
                     "orthogonal but lose their pseudo-random structure\n",
                     X.source_poly().c_str());

    const std::uint32_t L = (1u << k) - 1;
    const std::uint32_t N = L + 1;
    const std::size_t wpr = (N + 63) / 64;
    std::vector<std::uint64_t> packed(static_cast<std::size_t>(N) * wpr, 0);
    auto set_bit = [&](std::size_t r, std::size_t c) {
        packed[r * wpr + (c >> 6)] |= std::uint64_t{1} << (c & 63);
    };

    // Rows 0..L-1: shift-i XOR rows, each prefixed with a 1. Row L: [1 | X].
    for (std::uint32_t r = 0; r < L; ++r) {
        set_bit(r, 0);
        std::uint32_t yidx = (L - r) % L;  // (0 - r) mod L
        for (std::uint32_t j = 0; j < L; ++j) {
            if (X.bit(j) ^ Y.bit(yidx)) set_bit(r, j + 1);
            if (++yidx == L) yidx = 0;
        }
    }
    set_bit(L, 0);
    for (std::uint32_t j = 0; j < L; ++j)
        if (X.bit(j)) set_bit(L, j + 1);

    PatternProvenance prov;
    prov.family = "gold";
    prov.k = k;
    prov.K = N;
    prov.m = m;
    prov.n = n;
    prov.poly_x = X.source_poly();
    prov.seed_x = X.source_seed();
    prov.poly_y = Y.source_poly();
    prov.seed_y = Y.source_seed();
    return PatternMatrix(N, m, n, PatternFamily::gold, std::move(packed), std::move(prov));
}

PatternMatrix build_hadamard_matrix(int k, std::uint32_t m, std::uint32_t n) {
    check_order_range(k);
    resolve_geometry(k, m, n);
    const std::uint32_t N = 1u << k;
    const std::size_t wpr = (N + 63) / 64;
    std::vector<std::uint64_t> packed(static_cast<std::size_t>(N) * wpr, 0);
    // Sylvester entry (i,j) in ±1 form is (-1)^popcount(i&j); +1 maps to 1.
    for (std::uint32_t i = 0; i < N; ++i) {
        std::uint64_t* row = packed.data() + static_cast<std::size_t>(i) * wpr;
        for (std::uint32_t j = 0; j < N; ++j) {
            if ((std::popcount(i & j) & 1) == 0) row[j >> 6] |= std::uint64_t{1} << (j & 63);
        }
    }
    PatternProvenance prov;
    prov.family = "hadamard";
    prov.k = k;
    prov.K = N;
    prov.m = m;
    prov.n = n;
    return PatternMatrix(N, m, n, PatternFamily::hadamard, std::move(packed), std::move(prov));
}

PatternMatrix build_random_patterns(std::uint32_t K, std::uint32_t m, std::uint32_t n,
                                    std::uint64_t rng_seed, RandomMode mode) {
    if (K == 0 || m == 0 || n == 0)
        throw ValidationError("random pattern dimensions must be positive");
    const std::uint32_t N = m * n;
    SeededRng rng(rng_seed);
    PatternProvenance prov;
    prov.family = "random";
    prov.K = K;
    prov.m = m;
    prov.n = n;
    prov.rng_seed = rng_seed;
    prov.mode = random_mode_name(mode);

    if (mode == RandomMode::binary) {
        const std::size_t wpr = (N + 63) / 64;
        std::vector<std::uint64_t> packed(static_cast<std::size_t>(K) * wpr, 0);
        for (std::uint32_t r = 0; r < K; ++r) {
            std::uint64_t* row = packed.data() + static_cast<std::size_t>(r) * wpr;
            for (std::uint32_t c = 0; c < N; ++c)
                if (rng.next_bit()) row[c >> 6] |= std::uint64_t{1} << (c & 63);
        }
        return PatternMatrix(K, m, n, PatternFamily::random, std::move(packed), std::move(prov));
    }
    std::vector<double> values(static_cast<std::size_t>(K) * N);
    for (auto& v : values) v = rng.next_exponential();
    return PatternMatrix(K, m, n, PatternFamily::random, std::move(values), std::move(prov));
}

ImageGrid reshape_row(const PatternMatrix& p, std::uint32_t s) {
    if (s < 1 || s > p.rows())
        throw ValidationError("pattern index s must be in 1.." + std::to_string(p.rows()));
    ImageGrid g = make_grid(p.geom_m(), p.geom_n());
    const std::uint32_t r = s - 1;
    for (std::uint32_t c = 0; c < p.cols(); ++c) g.values[c] = p.value(r, c);
    return g;
}

RowOrder parse_order(const std::string& text) {
    if (text == "natural") return RowOrder{};
    if (text.rfind("perm:", 0) == 0) {
        const std::string num = text.substr(5);
        if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos)
            throw ValidationError("bad permutation seed in order: " + text);
        errno = 0;
        char* end = nullptr;
        const unsigned long long seed = std::strtoull(num.c_str(), &end, 10);
        if (errno != 0 || *end != '\0')
            throw ValidationError("bad permutation seed in order: " + text);
        return RowOrder{true, static_cast<std::uint64_t>(seed)};
    }
    throw ValidationError("unknown row order (expected natural or perm:<seed>): " + text);
}

std::string order_to_string(const RowOrder& o) {
    return o.permuted ? "perm:" + std::to_string(o.seed) : "natural";
}

std::vector<std::uint32_t> selection_order(const RowOrder& o, std::uint32_t K) {
    if (!o.permuted) {
        std::vector<std::uint32_t> idx(K);
        for (std::uint32_t i = 0; i < K; ++i) idx[i] = i;
        return idx;
    }
    return SeededRng(o.seed).permutation(K);
}

PatternMatrix select_rows(const PatternMatrix& p, const RowOrder& order, std::uint32_t count) {
    if (count < 1 || count > p.rows())
        throw ValidationError("selection count must be in 1.." + std::to_string(p.rows()));
    if (p.provenance().rows_selected != 0)
        throw ValidationError("pattern set is already a selected subset");
    const std::vector<std::uint32_t> idx = selection_order(order, p.rows());

    PatternProvenance prov = p.provenance();
    prov.order = order_to_string(order);
    prov.rows_selected = count;

    if (p.is_binary()) {
        const std::size_t wpr = p.words_per_row();
        std::vector<std::uint64_t> packed(static_cast<std::size_t>(count) * wpr);
        for (std::uint32_t r = 0; r < count; ++r)
            std::memcpy(packed.data() + static_cast<std::size_t>(r) * wpr, p.row_bits(idx[r]),
                        wpr * sizeof(std::uint64_t));
        return PatternMatrix(count, p.geom_m(), p.geom_n(), p.family(), std::move(packed),
                             std::move(prov));
    }
    const std::uint32_t N = p.cols();
    std::vector<double> values(static_cast<std::size_t>(count) * N);
    for (std::uint32_t r = 0; r < count; ++r)
        std::memcpy(values.data() + static_cast<std::size_t>(r) * N,
                    p.continuous().data() + static_cast<std::size_t>(idx[r]) * N,
                    N * sizeof(double));
    return PatternMatrix(count, p.geom_m(), p.geom_n(), p.family(), std::move(values),
                         std::move(prov));
}

std::int64_t max_gram_deviation_pm1(const PatternMatrix& p) {
    if (!p.is_binary()) throw ValidationError("gram deviation check requires a binary matrix");
    const std::uint32_t K = p.rows();
    const std::int64_t N = p.cols();
    const std::size_t wpr = p.words_per_row();

    // In ±1 form, row_i · row_j = N - 2·popcount(row_i XOR row_j); the
    // diagonal is exactly N by construction, so only off-diagonal entries
    // can deviate from N·I.
    std::int64_t global_max = 0;
    std::mutex merge;
    parallel_for(K, [&](std::size_t begin, std::size_t end) {
        std::int64_t local = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const std::uint64_t* ri = p.row_bits(static_cast<std::uint32_t>(i));
            for (std::size_t j = i + 1; j < K; ++j) {
                const std::uint64_t* rj = p.row_bits(static_cast<std::uint32_t>(j));
                std::int64_t mismatches = 0;
                for (std::size_t w = 0; w < wpr; ++w)
                    mismatches += std::popcount(ri[w] ^ rj[w]);
                const std::int64_t dot = N - 2 * mismatches;
                const std::int64_t dev = dot < 0 ? -dot : dot;
                if (dev > local) local = dev;
            }
        }
        std::lock_guard<std::mutex> lock(merge);
        if (local > global_max) global_max = local;
    });
    return global_max;
}

std::vector<std::int64_t> pm1_column_sums(const PatternMatrix& p) {
    if (!p.is_binary()) throw ValidationError("column sums in ±1 form require a binary matrix");
    const std::uint32_t K = p.rows();
    const std::uint32_t N = p.cols();
    std::vector<std::int64_t> ones(N, 0);
    for (std::uint32_t r = 0; r < K; ++r) {
        const std::uint64_t* row = p.row_bits(r);
        for (std::uint32_t w = 0; w < p.words_per_row(); ++w) {
            std::uint64_t word = row[w];
            while (word) {
                const int b = std::countr_zero(word);
                ++ones[(w << 6) + static_cast<std::uint32_t>(b)];
                word &= word - 1;
            }
        }
    }
    std::vector<std::int64_t> sums(N);
    for (std::uint32_t c = 0; c < N; ++c) sums[c] = 2 * ones[c] - static_cast<std::int64_t>(K);
    return sums;
}

PatternMatrix regenerate_patterns(const PatternProvenance& prov) {
    PatternMatrix full = [&]() {
        if (prov.family == "gold") {
            const PrimitivePolynomial px = PrimitivePolynomial::parse(prov.poly_x);
            const PrimitivePolynomial py = PrimitivePolynomial::parse(prov.poly_y);
            const MSequence X = generate_m_sequence(px, parse_register(prov.seed_x, px.degree()));
            const MSequence Y = generate_m_sequence(py, parse_register(prov.seed_y, py.degree()));
            return build_gold_matrix(X, Y, prov.m, prov.n);
        }
        if (prov.family == "hadamard") return build_hadamard_matrix(prov.k, prov.m, prov.n);
        if (prov.family == "random")
            return build_random_patterns(prov.K, prov.m, prov.n, prov.rng_seed,
                                         parse_random_mode(prov.mode));
        throw ValidationError("cannot regenerate unknown family: " + prov.family);
    }();
    if (prov.rows_selected == 0) return full;
    return select_rows(full, parse_order(prov.order), prov.rows_selected);
}

namespace {

json provenance_to_json(const PatternProvenance& p) {
    return json{{"family", p.family},
                {"k", p.k},
                {"K", p.K},
                {"m", p.m},
                {"n", p.n},
                {"poly_x", p.poly_x},
                {"seed_x", p.seed_x},
                {"poly_y", p.poly_y},
                {"seed_y", p.seed_y},
                {"rng_seed", p.rng_seed},
                {"mode", p.mode},
                {"order", p.order},
                {"rows_selected", p.rows_selected}};
}

PatternProvenance provenance_from_json(const json& j) {
    PatternProvenance p;
    p.family = j.at("family").get<std::string>();
    p.k = j.at("k").get<int>();
    p.K = j.at("K").get<std::uint32_t>();
    p.m = j.at("m").get<std::uint32_t>();
    p.n = j.at("n").get<std::uint32_t>();
    p.poly_x = j.at("poly_x").get<std::string>();
    p.seed_x = j.at("seed_x").get<std::string>();
    p.poly_y = j.at("poly_y").get<std::string>();
    p.seed_y = j.at("seed_y").get<std::string>();
    p.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    p.mode = j.at("mode").get<std::string>();
    p.order = j.at("order").get<std::string>();
    p.rows_selected = j.at("rows_selected").get<std::uint32_t>();
    return p;
}

constexpr const char* kBitsFormat = "bits-rowpad-msb";
constexpr const char* kF64Format = "f64-le";

}  // namespace

void save_patterns(const PatternMatrix& p, const std::string& payload_path,
                   const std::string& sidecar_path) {
    std::vector<unsigned char> payload;
    if (p.is_binary()) {
        const std::size_t bpr = (p.cols() + 7) / 8;
        payload.assign(static_cast<std::size_t>(p.rows()) * bpr, 0);
        for (std::uint32_t r = 0; r < p.rows(); ++r) {
            unsigned char* out = payload.data() + static_cast<std::size_t>(r) * bpr;
            for (std::uint32_t c = 0; c < p.cols(); ++c)
                if (p.bit(r, c)) out[c >> 3] |= static_cast<unsigned char>(1u << (7 - (c & 7)));
        }
    } else {
        payload.resize(p.continuous().size() * sizeof(double));
        std::memcpy(payload.data(), p.continuous().data(), payload.size());
    }

    std::ofstream pf(payload_path, std::ios::binary | std::ios::trunc);
    if (!pf) throw IoError("cannot open pattern payload for writing: " + payload_path);
    pf.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size()));
    if (!pf) throw IoError("failed writing pattern payload: " + payload_path);
    pf.close();

    json sidecar{{"format", "gold-gi-patterns-v1"},
                 {"family", family_name(p.family())},
                 {"k", p.provenance().k},
                 {"K", p.rows()},
                 {"N", p.cols()},
                 {"m", p.geom_m()},
                 {"n", p.geom_n()},
                 {"payload", fs::path(payload_path).filename().string()},
                 {"payload_format", p.is_binary() ? kBitsFormat : kF64Format},
                 {"provenance", provenance_to_json(p.provenance())}};
    std::ofstream sf(sidecar_path, std::ios::binary | std::ios::trunc);
    if (!sf) throw IoError("cannot open pattern sidecar for writing: " + sidecar_path);
    sf << sidecar.dump(2) << "\n";
    if (!sf) throw IoError("failed writing pattern sidecar: " + sidecar_path);
}

PatternMatrix load_patterns(const std::string& sidecar_path) {
    std::ifstream sf(sidecar_path, std::ios::binary);
    if (!sf) throw IoError("cannot open pattern sidecar: " + sidecar_path);
    json sidecar;
    try {
        sf >> sidecar;
    } catch (const json::exception& e) {
        throw IoError("corrupt pattern sidecar " + sidecar_path + ": " + e.what());
    }

    try {
        const PatternFamily family = parse_family(sidecar.at("family").get<std::string>());
        const std::uint32_t K = sidecar.at("K").get<std::uint32_t>();
        const std::uint32_t m = sidecar.at("m").get<std::uint32_t>();
        const std::uint32_t n = sidecar.at("n").get<std::uint32_t>();
        const std::uint32_t N = sidecar.at("N").get<std::uint32_t>();
        if (N != m * n) throw IoError("pattern sidecar geometry mismatch: " + sidecar_path);
        const std::string payload_format = sidecar.at("payload_format").get<std::string>();
        const PatternProvenance prov = provenance_from_json(sidecar.at("provenance"));

        const fs::path payload_path =
            fs::path(sidecar_path).parent_path() / sidecar.at("payload").get<std::string>();
        std::ifstream pf(payload_path, std::ios::binary);
        if (!pf) throw IoError("cannot open pattern payload: " + payload_path.string());
        std::vector<unsigned char> payload((std::istreambuf_iterator<char>(pf)),
                                           std::istreambuf_iterator<char>());

        if (payload_format == kBitsFormat) {
            const std::size_t bpr = (N + 7) / 8;
            if (payload.size() != static_cast<std::size_t>(K) * bpr)
                throw IoError("pattern payload size mismatch: " + payload_path.string());
            const std::size_t wpr = (N + 63) / 64;
            std::vector<std::uint64_t> packed(static_cast<std::size_t>(K) * wpr, 0);
            for (std::uint32_t r = 0; r < K; ++r) {
                const unsigned char* in = payload.data() + static_cast<std::size_t>(r) * bpr;
                std::uint64_t* row = packed.data() + static_cast<std::size_t>(r) * wpr;
                for (std::uint32_t c = 0; c < N; ++c)
                    if ((in[c >> 3] >> (7 - (c & 7))) & 1u)
                        row[c >> 6] |= std::uint64_t{1} << (c & 63);
            }
            return PatternMatrix(K, m, n, family, std::move(packed), prov);
        }
        if (payload_format == kF64Format) {
            if (payload.size() != static_cast<std::size_t>(K) * N * sizeof(double))
                throw IoError("pattern payload size mismatch: " + payload_path.string());
            std::vector<double> values(static_cast<std::size_t>(K) * N);
            std::memcpy(values.data(), payload.data(), payload.size());
            return PatternMatrix(K, m, n, family, std::move(values), prov);
        }
        throw IoError("unknown pattern payload format: " + payload_format);
    } catch (const json::exception& e) {
        throw IoError("corrupt pattern sidecar " + sidecar_path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw IoError("corrupt pattern sidecar " + sidecar_path + ": " + e.what());
    }
}

}  // namespace goldgi
