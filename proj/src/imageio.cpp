#include "goldgi/imageio.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <vector>

using nlohmann::json;

namespace goldgi {

namespace {

// PNM header token: skips whitespace and # comments, then reads an integer.
long read_pnm_int(std::istream& in, const std::string& path) {
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (std::isspace(ch)) {
            ch = in.get();
        } else {
            break;
        }
    }
    if (ch == EOF || !std::isdigit(ch)) throw IoError("malformed PGM header: " + path);
    long v = 0;
    while (ch != EOF && std::isdigit(ch)) {
        v = v * 10 + (ch - '0');
        if (v > 1000000000L) throw IoError("PGM header value out of range: " + path);
        ch = in.get();
    }
    if (ch != EOF) in.unget();
    return v;
}

void write_file(const std::string& path, const std::string& header,
                const std::vector<unsigned char>& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << header;
    out.write(reinterpret_cast<const char*>(body.data()),
              static_cast<std::streamsize>(body.size()));
    if (!out) throw IoError("failed writing file: " + path);
}

unsigned quantize(double v, unsigned max) {
    const double scaled = std::floor(v * static_cast<double>(max) + 0.5);
    if (scaled <= 0.0) return 0;
    if (scaled >= static_cast<double>(max)) return max;
    return static_cast<unsigned>(scaled);
}

}  // namespace

ImageGrid load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image: " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') throw IoError("not a binary PGM (P5) file: " + path);
    const long width = read_pnm_int(in, path);
    const long height = read_pnm_int(in, path);
    const long maxval = read_pnm_int(in, path);
    if (width < 1 || height < 1 || width > 65535 || height > 65535)
        throw IoError("unsupported PGM dimensions: " + path);
    if (maxval < 1 || maxval > 65535) throw IoError("unsupported PGM maxval: " + path);
    const int ws = in.get();
    if (ws == EOF || !std::isspace(ws)) throw IoError("malformed PGM header: " + path);

    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    const std::size_t stride = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(pixels * stride);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw IoError("truncated PGM raster: " + path);

    ImageGrid g = make_grid(static_cast<std::uint32_t>(height), static_cast<std::uint32_t>(width));
    for (std::size_t i = 0; i < pixels; ++i) {
        const unsigned sample = stride == 1
                                    ? raw[i]
                                    : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
        g.values[i] = static_cast<double>(sample) / static_cast<double>(maxval);
    }
    return g;
}

void save_pgm8(const ImageGrid& g, const std::string& path) {
    check_grid(g);
    std::vector<unsigned char> body(g.pixel_count());
    for (std::size_t i = 0; i < g.values.size(); ++i)
        body[i] = static_cast<unsigned char>(quantize(g.values[i], 255));
    write_file(path, "P5\n" + std::to_string(g.n) + " " + std::to_string(g.m) + "\n255\n", body);
}

void save_pgm16(const ImageGrid& g, const std::string& path) {
    check_grid(g);
    std::vector<unsigned char> body(g.pixel_count() * 2);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        const unsigned sample = quantize(g.values[i], 65535);
        body[2 * i] = static_cast<unsigned char>(sample >> 8);
        body[2 * i + 1] = static_cast<unsigned char>(sample & 0xFF);
    }
    write_file(path, "P5\n" + std::to_string(g.n) + " " + std::to_string(g.m) + "\n65535\n",
               body);
}

ImageGrid load_csv_float(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open CSV image: " + path);
    std::vector<double> values;
    std::string line;
    std::size_t rows = 0, cols = 0;
    while (std::getline(in, line)) {
        if (line.empty() && in.peek() == EOF) break;
        std::size_t line_cols = 0;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t next = line.find(',', pos);
            if (next == std::string::npos) next = line.size();
            const std::string cell = line.substr(pos, next - pos);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
                throw IoError("bad CSV image cell '" + cell + "' in " + path);
            values.push_back(v);
            ++line_cols;
            if (next == line.size()) break;
            pos = next + 1;
        }
        if (rows == 0) {
            cols = line_cols;
        } else if (line_cols != cols) {
            throw IoError("ragged CSV image rows in " + path);
        }
        ++rows;
    }
    if (rows == 0 || cols == 0) throw IoError("empty CSV image: " + path);
    if (rows > 65535 || cols > 65535) throw IoError("CSV image too large: " + path);
    ImageGrid g;
    g.m = static_cast<std::uint32_t>(rows);
    g.n = static_cast<std::uint32_t>(cols);
    g.values = std::move(values);
    check_grid(g);
    return g;
}

void save_csv_float(const ImageGrid& g, const std::string& path) {
    check_grid(g);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open CSV image for writing: " + path);
    for (std::uint32_t r = 0; r < g.m; ++r) {
        for (std::uint32_t c = 0; c < g.n; ++c) {
            if (c) out << ',';
            out << format_double(g.at(r, c));
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing CSV image: " + path);
}

ImageGrid builtin_object(const std::string& name) {
    const std::uint32_t side = 64;
    ImageGrid g = make_grid(side, side);
    if (name == "gradient") {
        for (std::uint32_t r = 0; r < side; ++r)
            for (std::uint32_t c = 0; c < side; ++c)
                g.at(r, c) = static_cast<double>(r + c) / 126.0;
        return g;
    }
    if (name == "shapes") {
        // All features stay inside [8, 55] so the black margin — and the
        // zero at pixel (0,0) — survives any integer downsampling.
        for (std::uint32_t r = 10; r <= 26; ++r)
            for (std::uint32_t c = 10; c <= 30; ++c) g.at(r, c) = 1.0;
        for (std::uint32_t r = 36; r <= 54; ++r) {
            for (std::uint32_t c = 10; c <= 28; ++c) {
                const bool inner = r >= 39 && r <= 51 && c >= 13 && c <= 25;
                if (!inner) g.at(r, c) = 1.0;
            }
        }
        for (std::uint32_t r = 10; r <= 26; ++r) {
            for (std::uint32_t c = 37; c <= 53; ++c) {
                const long dr = static_cast<long>(r) - 18;
                const long dc = static_cast<long>(c) - 45;
                if (dr * dr + dc * dc <= 64) g.at(r, c) = 1.0;
            }
        }
        for (std::uint32_t r = 36; r <= 54; ++r)
            for (std::uint32_t c = 34; c <= 54; ++c)
                if ((r + c) % 6 < 3) g.at(r, c) = 1.0;
        return g;
    }
    throw ValidationError("unknown builtin object: " + name +
                          " (available: shapes, gradient)");
}

ObjectImage load_object(const std::string& source, std::uint32_t target_m,
                        std::uint32_t target_n, bool binarize) {
    if (target_m == 0 || target_n == 0)
        throw ValidationError("object target geometry must be positive");

    ImageGrid g;
    if (source.rfind("builtin:", 0) == 0) {
        g = builtin_object(source.substr(8));
    } else {
        const std::size_t dot = source.find_last_of('.');
        const std::string ext = dot == std::string::npos ? "" : source.substr(dot);
        if (ext == ".pgm") {
            g = load_pgm(source);
        } else if (ext == ".csv") {
            g = load_csv_float(source);
        } else {
            throw ValidationError("unsupported object format (expected .pgm or .csv): " +
                                  source);
        }
    }

    if (g.m != target_m || g.n != target_n) {
        ImageGrid scaled = make_grid(target_m, target_n);
        for (std::uint32_t r = 0; r < target_m; ++r) {
            const std::size_t sr = static_cast<std::size_t>(r) * g.m / target_m;
            for (std::uint32_t c = 0; c < target_n; ++c) {
                const std::size_t sc = static_cast<std::size_t>(c) * g.n / target_n;
                scaled.at(r, c) = g.at(static_cast<std::uint32_t>(sr),
                                       static_cast<std::uint32_t>(sc));
            }
        }
        g = std::move(scaled);
    }
    if (binarize) {
        for (double& v : g.values) v = v >= 0.5 ? 1.0 : 0.0;
    }
    return ObjectImage(std::move(g));
}

json noise_model_to_json(const NoiseModel& nm) {
    json j{{"eta", nm.eta}, {"beta", nm.beta}};
    if (nm.burst) {
        j["burst"] = json{{"p", nm.burst->p},
                          {"alpha", nm.burst->alpha},
                          {"placement", nm.burst->random_placement ? "random" : "contiguous"}};
    } else {
        j["burst"] = nullptr;
    }
    return j;
}

NoiseModel noise_model_from_json(const json& j) {
    NoiseModel nm;
    nm.eta = j.at("eta").get<double>();
    nm.beta = j.at("beta").get<double>();
    if (j.contains("burst") && !j.at("burst").is_null()) {
        const json& b = j.at("burst");
        BurstSpec burst;
        burst.p = b.at("p").get<double>();
        burst.alpha = b.at("alpha").get<double>();
        const std::string placement = b.at("placement").get<std::string>();
        if (placement == "random") {
            burst.random_placement = true;
        } else if (placement == "contiguous") {
            burst.random_placement = false;
        } else {
            throw ValidationError("unknown burst placement: " + placement);
        }
        nm.burst = burst;
    } else {
        nm.burst = std::nullopt;
    }
    validate_noise_model(nm);
    return nm;
}

void save_buckets(const BucketSeries& d, const std::string& csv_path,
                  const std::string& sidecar_path) {
    std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open bucket CSV for writing: " + csv_path);
    out << "s,D\n";
    for (std::size_t i = 0; i < d.size(); ++i)
        out << (i + 1) << ',' << format_double(d.value(i)) << '\n';
    if (!out) throw IoError("failed writing bucket CSV: " + csv_path);
    out.close();

    json sidecar;
    if (d.clean()) {
        sidecar["noise"] = nullptr;
    } else {
        json rec = noise_model_to_json(d.noise()->model);
        rec["seed"] = d.noise()->seed;
        sidecar["noise"] = rec;
    }
    std::ofstream sf(sidecar_path, std::ios::binary | std::ios::trunc);
    if (!sf) throw IoError("cannot open bucket sidecar for writing: " + sidecar_path);
    sf << sidecar.dump(2) << "\n";
    if (!sf) throw IoError("failed writing bucket sidecar: " + sidecar_path);
}

BucketSeries load_buckets(const std::string& csv_path, const std::string& sidecar_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw IoError("cannot open bucket CSV: " + csv_path);
    std::string line;
    if (!std::getline(in, line) || line != "s,D")
        throw IoError("bucket CSV missing s,D header: " + csv_path);
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw IoError("bad bucket CSV row: " + csv_path);
        char* end = nullptr;
        const unsigned long long s = std::strtoull(line.c_str(), &end, 10);
        if (end != line.c_str() + comma || s != values.size() + 1)
            throw IoError("bucket CSV rows out of order: " + csv_path);
        const std::string cell = line.substr(comma + 1);
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
            throw IoError("bad bucket value '" + cell + "' in " + csv_path);
        values.push_back(v);
    }
    if (values.empty()) throw IoError("bucket CSV holds no measurements: " + csv_path);

    std::ifstream sf(sidecar_path, std::ios::binary);
    if (!sf) throw IoError("cannot open bucket sidecar: " + sidecar_path);
    json sidecar;
    try {
        sf >> sidecar;
        if (sidecar.at("noise").is_null()) return BucketSeries(std::move(values));
        const json& rec = sidecar.at("noise");
        NoiseRecord record;
        record.model = noise_model_from_json(rec);
        record.seed = rec.at("seed").get<std::uint64_t>();
        return BucketSeries(std::move(values), record);
    } catch (const json::exception& e) {
        throw IoError("corrupt bucket sidecar " + sidecar_path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw IoError("corrupt bucket sidecar " + sidecar_path + ": " + e.what());
    }
}

}  // namespace goldgi
