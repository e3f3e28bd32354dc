#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "choquard/io.hpp"

using namespace choquard;

namespace {
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("choquard_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};
}  // namespace

TEST_CASE("seventeen significant digits round-trip doubles exactly") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int t = 0; t < 5000; ++t) {
        const double x = std::ldexp(mant(rng), expo(rng));
        const double back = std::strtod(num17(x).c_str(), nullptr);
        REQUIRE(back == x);
    }
    for (double x : {0.0, 1.0 / 3.0, 0.1, 1e-300, 1e300, 4.9406564584124654e-324}) {
        REQUIRE(std::strtod(num17(x).c_str(), nullptr) == x);
    }
}

TEST_CASE("profile JSON descriptor round-trips bit-exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uv(0.0, 2.0);
    auto g = make_grid_ptr(1e-4, 1e2, 128, 3);
    for (int t = 0; t < 5; ++t) {
        RadialFunction f = RadialFunction::zero(g);
        for (int i = 0; i < g->n; ++i) f.values[i] = uv(rng) * std::pow(g->r(i), -uv(rng));
        f.origin_model = {uv(rng), -uv(rng)};
        f.tail_model = (t % 3 == 0) ? TailModel::power_law(uv(rng), 3.0 + uv(rng))
                                    : (t % 3 == 1 ? TailModel::exponential_like()
                                                  : TailModel::zero());
        const RadialFunction back = profile_from_json(profile_json(f));
        REQUIRE(back.grid->n == f.grid->n);
        REQUIRE(back.grid->r_min == f.grid->r_min);
        REQUIRE(back.grid->r_max == f.grid->r_max);
        for (int i = 0; i < g->n; ++i) REQUIRE(back[i] == f[i]);
        REQUIRE(back.origin_model.coefficient == f.origin_model.coefficient);
        REQUIRE(back.origin_model.exponent == f.origin_model.exponent);
        REQUIRE(back.tail_model.kind == f.tail_model.kind);
        REQUIRE(back.tail_model.coefficient == f.tail_model.coefficient);
        REQUIRE(back.tail_model.exponent == f.tail_model.exponent);
    }
}

TEST_CASE("profile files on disk") {
    TempDir tmp;
    auto g = make_grid_ptr(1e-2, 1e1, 64, 3);
    auto f = RadialFunction::sample(
        g, [](double r) { return std::exp(-r); }, {1.0, 0.0}, TailModel::exponential_like());

    SECTION("csv layout") {
        const auto csv = (tmp.path / "profile.csv").string();
        write_csv(f, csv);
        std::ifstream in(csv);
        std::string header;
        std::getline(in, header);
        REQUIRE(header == "r,value");
        std::string line;
        int rows = 0;
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            REQUIRE(comma != std::string::npos);
            const double r = std::strtod(line.substr(0, comma).c_str(), nullptr);
            const double v = std::strtod(line.substr(comma + 1).c_str(), nullptr);
            REQUIRE(r == g->r(rows));
            REQUIRE(v == f[rows]);
            ++rows;
        }
        REQUIRE(rows == g->n);
    }
    SECTION("json file round-trip") {
        const auto path = (tmp.path / "profile.json").string();
        write_profile_json(f, path);
        const RadialFunction back = read_profile_json(path);
        for (int i = 0; i < g->n; ++i) REQUIRE(back[i] == f[i]);
    }
}

TEST_CASE("kernel cache stores bit-identical tables") {
    TempDir tmp;
    auto g = make_grid_ptr(1e-2, 1e2, 96, 3);
    const AngularKernel K = build_kernel(3, 1.0, g);
    save_kernel(K, tmp.path.string());

    const auto loaded = load_kernel(3, 1.0, g, tmp.path.string());
    REQUIRE(loaded.has_value());
    REQUIRE(loaded->k_minus.size() == K.k_minus.size());
    for (size_t i = 1; i < K.k_minus.size(); ++i) { // [0] is inf for alpha <= 1
        REQUIRE(loaded->k_minus[i] == K.k_minus[i]);
        REQUIRE(loaded->k_plus[i] == K.k_plus[i]);
    }
    REQUIRE(std::isinf(loaded->k_minus[0]));
    for (size_t i = 0; i < K.lo_rho.size(); ++i) {
        REQUIRE(loaded->lo_rho[i] == K.lo_rho[i]);
        REQUIRE(loaded->lo_kappa[i] == K.lo_kappa[i]);
        REQUIRE(loaded->lo_w[i] == K.lo_w[i]);
        REQUIRE(loaded->hi_kappa[i] == K.hi_kappa[i]);
    }
    REQUIRE(loaded->extension == K.extension);
    REQUIRE(loaded->grid_hash == K.grid_hash);

    SECTION("sidecar metadata exists") {
        const auto side =
            tmp.path / (kernel_cache_basename(3, 1.0, K.grid_hash) + ".json");
        REQUIRE(std::filesystem::exists(side));
        std::ifstream in(side);
        Json j;
        in >> j;
        CHECK(j.at("dimension").get<int>() == 3);
        CHECK(j.at("n").get<int>() == 96);
    }
    SECTION("mismatched grid misses the cache") {
        auto g2 = make_grid_ptr(1e-2, 1e2, 97, 3);
        CHECK_FALSE(load_kernel(3, 1.0, g2, tmp.path.string()).has_value());
    }
    SECTION("load_or_build uses the cache and applies identically") {
        const AngularKernel K2 = load_or_build_kernel(3, 1.0, g, tmp.path.string());
        auto f = RadialFunction::sample(
            g, [](double r) { return std::exp(-r * r); }, {1.0, 0.0},
            TailModel::exponential_like());
        const RadialFunction a = riesz_apply(f, K);
        const RadialFunction b = riesz_apply(f, K2);
        for (int i = 0; i < g->n; ++i) REQUIRE(a[i] == b[i]);
    }
}

TEST_CASE("cache directory resolution honors the environment") {
    // explicit request wins
    CHECK(resolve_cache_dir("/x/y") == "/x/y");
    // environment fallback
    setenv("CHOQUARD_CACHE_DIR", "/from/env", 1);
    CHECK(resolve_cache_dir("") == "/from/env");
    unsetenv("CHOQUARD_CACHE_DIR");
    CHECK(resolve_cache_dir("") == "");
}

TEST_CASE("report json uses decimal strings and fixed key order") {
    const ProblemParams pp{3, 2.0, 2.0, 0.5, 0.125};
    const Json j = params_json(pp);
    CHECK(j.at("k").is_string());
    CHECK(j.at("k").get<std::string>() == "0.125");
    const std::string dumped = j.dump();
    CHECK(dumped.find("\"N\"") < dumped.find("\"alpha\""));
    CHECK(dumped.find("\"alpha\"") < dumped.find("\"p\""));
}
