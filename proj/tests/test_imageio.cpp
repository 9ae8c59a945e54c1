#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "goldgi/imageio.hpp"
#include "goldgi/patterns.hpp"

using namespace goldgi;
namespace fs = std::filesystem;

namespace {

fs::path io_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / "goldgi_tests" / leaf;
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spit(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    REQUIRE(out.good());
}

}  // namespace

TEST_CASE("16-bit PGM layout is big-endian with round-half-up quantization") {
    const fs::path dir = io_dir("pgm16");
    ImageGrid g = make_grid(2, 2);
    g.values = {0.0, 0.5, 1.0, 0.25};
    save_pgm16(g, (dir / "q.pgm").string());

    const std::string raw = slurp(dir / "q.pgm");
    const std::string header = "P5\n2 2\n65535\n";
    REQUIRE(raw.size() == header.size() + 8);
    CHECK(raw.substr(0, header.size()) == header);
    const unsigned char* px = reinterpret_cast<const unsigned char*>(raw.data() + header.size());
    auto sample = [&](int i) { return (px[2 * i] << 8) | px[2 * i + 1]; };
    CHECK(sample(0) == 0);
    CHECK(sample(1) == 32768);  // 0.5*65535 + 0.5 rounds up
    CHECK(sample(2) == 65535);
    CHECK(sample(3) == 16384);

    const ImageGrid back = load_pgm((dir / "q.pgm").string());
    REQUIRE(back.m == 2);
    REQUIRE(back.n == 2);
    CHECK(back.values[1] == doctest::Approx(32768.0 / 65535.0).epsilon(1e-15));
    CHECK(back.values[2] == 1.0);
}

TEST_CASE("8-bit PGM round trip") {
    const fs::path dir = io_dir("pgm8");
    ImageGrid g = make_grid(1, 3);
    g.values = {0.0, 0.25, 1.0};
    save_pgm8(g, (dir / "q.pgm").string());
    const std::string raw = slurp(dir / "q.pgm");
    CHECK(raw.substr(0, 10) == "P5\n3 1\n255");
    const ImageGrid back = load_pgm((dir / "q.pgm").string());
    for (std::size_t i = 0; i < 3; ++i) {
        const double q = std::floor(g.values[i] * 255.0 + 0.5) / 255.0;
        CHECK(back.values[i] == doctest::Approx(q).epsilon(1e-15));
    }
}

TEST_CASE("PGM header parsing accepts comments and rejects junk") {
    const fs::path dir = io_dir("pgm_parse");
    spit(dir / "ok.pgm", std::string("P5\n# a comment\n2 1\n# more\n255\n") + "\x10\x20");
    const ImageGrid g = load_pgm((dir / "ok.pgm").string());
    REQUIRE(g.m == 1);
    REQUIRE(g.n == 2);
    CHECK(g.values[0] == doctest::Approx(16.0 / 255.0));
    CHECK(g.values[1] == doctest::Approx(32.0 / 255.0));

    spit(dir / "p2.pgm", "P2\n2 1\n255\n1 2\n");
    CHECK_THROWS_AS(load_pgm((dir / "p2.pgm").string()), IoError);
    spit(dir / "short.pgm", std::string("P5\n2 1\n255\n") + "\x10");
    CHECK_THROWS_AS(load_pgm((dir / "short.pgm").string()), IoError);
    CHECK_THROWS_AS(load_pgm((dir / "missing.pgm").string()), IoError);
}

TEST_CASE("float CSV round-trips doubles exactly") {
    const fs::path dir = io_dir("csvf");
    ImageGrid g = make_grid(2, 3);
    g.values = {1.0 / 3.0, 0.1, 1e-17, 123456.789, 0.0, 1.0};
    save_csv_float(g, (dir / "g.csv").string());
    const ImageGrid back = load_csv_float((dir / "g.csv").string());
    REQUIRE(back.m == 2);
    REQUIRE(back.n == 3);
    for (std::size_t i = 0; i < g.values.size(); ++i) CHECK(back.values[i] == g.values[i]);

    spit(dir / "ragged.csv", "1,2\n3\n");
    CHECK_THROWS_AS(load_csv_float((dir / "ragged.csv").string()), IoError);
    spit(dir / "words.csv", "1,two\n");
    CHECK_THROWS_AS(load_csv_float((dir / "words.csv").string()), IoError);
}

TEST_CASE("builtin objects keep their zero at the origin") {
    for (const std::string name : {"shapes", "gradient"}) {
        const ImageGrid g = builtin_object(name);
        REQUIRE(g.m == 64);
        REQUIRE(g.n == 64);
        CHECK(g.at(0, 0) == 0.0);
        double lo = 1e300, hi = -1e300;
        for (double v : g.values) {
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(lo == 0.0);
        CHECK(hi == 1.0);
    }
    const ImageGrid shapes = builtin_object("shapes");
    for (double v : shapes.values) CHECK((v == 0.0 || v == 1.0));
    const ImageGrid grad = builtin_object("gradient");
    CHECK(grad.at(63, 63) == 1.0);
    CHECK(grad.at(0, 1) == doctest::Approx(1.0 / 126.0));
    CHECK_THROWS_AS(builtin_object("checker"), ValidationError);
}

TEST_CASE("object loading resamples and binarizes") {
    const ObjectImage obj = load_object("builtin:gradient", 16, 16, false);
    CHECK(obj.m() == 16);
    CHECK(obj.grid().at(0, 0) == 0.0);
    // Corner-anchored nearest neighbor: target (r,c) samples source (4r,4c).
    const ImageGrid full = builtin_object("gradient");
    CHECK(obj.grid().at(3, 5) == full.at(12, 20));

    const ObjectImage bin = load_object("builtin:gradient", 16, 16, true);
    for (double v : bin.grid().values) CHECK((v == 0.0 || v == 1.0));
    CHECK(bin.grid().at(15, 15) == 1.0);

    const fs::path dir = io_dir("objload");
    ImageGrid g = make_grid(2, 2);
    g.values = {0.0, 0.25, 0.5, 1.0};
    save_csv_float(g, (dir / "o.csv").string());
    const ObjectImage from_csv = load_object((dir / "o.csv").string(), 2, 2, false);
    CHECK(from_csv.grid().at(1, 0) == 0.5);
    save_pgm8(g, (dir / "o.pgm").string());
    CHECK(load_object((dir / "o.pgm").string(), 2, 2, false).grid().at(1, 1) == 1.0);

    CHECK_THROWS_AS(load_object("builtin:nope", 8, 8, false), ValidationError);
    CHECK_THROWS_AS(load_object((dir / "o.txt").string(), 8, 8, false), ValidationError);
    spit(dir / "big.csv", "0.5,2.5\n");
    CHECK_THROWS_AS(load_object((dir / "big.csv").string(), 1, 2, false), ValidationError);
}

TEST_CASE("bucket CSV format is frozen") {
    const fs::path dir = io_dir("buckets");
    const BucketSeries d(std::vector<double>{1.5, 2.25, 3.0});
    save_buckets(d, (dir / "d.csv").string(), (dir / "d.json").string());
    CHECK(slurp(dir / "d.csv") == "s,D\n1,1.5\n2,2.25\n3,3\n");
    CHECK(slurp(dir / "d.json").find("\"noise\": null") != std::string::npos);

    const BucketSeries back = load_buckets((dir / "d.csv").string(), (dir / "d.json").string());
    REQUIRE(back.size() == 3);
    CHECK(back.clean());
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.value(i) == d.value(i));
}

TEST_CASE("noisy bucket series round-trips its noise record") {
    const fs::path dir = io_dir("buckets_noisy");
    NoiseModel nm;
    nm.eta = 0.2;
    nm.beta = 0.05;
    nm.burst = BurstSpec{0.5, 1.5, true};
    const BucketSeries noisy =
        apply_noise(BucketSeries(std::vector<double>{1.0, 2.0, 3.0, 4.0}), nm, 77);
    save_buckets(noisy, (dir / "n.csv").string(), (dir / "n.json").string());
    const BucketSeries back = load_buckets((dir / "n.csv").string(), (dir / "n.json").string());
    REQUIRE(back.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(back.value(i) == noisy.value(i));
    REQUIRE_FALSE(back.clean());
    CHECK(back.noise()->seed == 77);
    CHECK(back.noise()->model.eta == 0.2);
    CHECK(back.noise()->model.beta == 0.05);
    REQUIRE(back.noise()->model.burst.has_value());
    CHECK(back.noise()->model.burst->p == 0.5);
    CHECK(back.noise()->model.burst->alpha == 1.5);
    CHECK(back.noise()->model.burst->random_placement);

    // No-burst models come back with the burst absent, not defaulted.
    NoiseModel plain;
    plain.burst.reset();
    const BucketSeries noisy2 =
        apply_noise(BucketSeries(std::vector<double>{1.0, 2.0}), plain, 5);
    save_buckets(noisy2, (dir / "p.csv").string(), (dir / "p.json").string());
    const BucketSeries back2 =
        load_buckets((dir / "p.csv").string(), (dir / "p.json").string());
    CHECK_FALSE(back2.noise()->model.burst.has_value());
}

TEST_CASE("bucket loading rejects corrupt artifacts") {
    const fs::path dir = io_dir("buckets_bad");
    CHECK_THROWS_AS(load_buckets((dir / "nope.csv").string(), (dir / "nope.json").string()),
                    IoError);
    spit(dir / "h.csv", "t,D\n1,1\n");
    spit(dir / "h.json", "{\"noise\": null}\n");
    CHECK_THROWS_AS(load_buckets((dir / "h.csv").string(), (dir / "h.json").string()), IoError);
    spit(dir / "o.csv", "s,D\n2,1\n");
    CHECK_THROWS_AS(load_buckets((dir / "o.csv").string(), (dir / "h.json").string()), IoError);
    spit(dir / "j.csv", "s,D\n1,1\n");
    spit(dir / "j.json", "{\"noise\":");
    CHECK_THROWS_AS(load_buckets((dir / "j.csv").string(), (dir / "j.json").string()), IoError);
}

TEST_CASE("noise model JSON round trip") {
    NoiseModel nm;
    nm.eta = 0.3;
    nm.beta = 0.1;
    nm.burst = BurstSpec{0.2, 0.75, true};
    const NoiseModel back = noise_model_from_json(noise_model_to_json(nm));
    CHECK(back.eta == 0.3);
    CHECK(back.beta == 0.1);
    REQUIRE(back.burst.has_value());
    CHECK(back.burst->p == 0.2);
    CHECK(back.burst->alpha == 0.75);
    CHECK(back.burst->random_placement);

    nm.burst.reset();
    CHECK_FALSE(noise_model_from_json(noise_model_to_json(nm)).burst.has_value());
}
