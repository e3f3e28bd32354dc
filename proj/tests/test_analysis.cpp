#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "choquard/analysis.hpp"
#include "choquard/io.hpp"

using namespace choquard;

TEST_CASE("origin verification on the exact dirac profile") {
    auto g = make_grid_ptr(1e-4, 1e2, 1024, 3);
    const FundamentalSolution fs = fundamental_solution(3, g);
    const ProblemParams pp{3, 2.0, 2.0, 0.5, 1.0};

    const OriginFit of = verify_origin(dirac_profile(1.0, fs), pp, fs.c_N);
    CHECK(std::abs(of.rel_error) < 5e-3);
    CHECK(of.exponent == Catch::Approx(-1.0).margin(0.02));
    CHECK(of.target == Catch::Approx(fs.c_N));

    SECTION("bounded perturbations do not move the coefficient") {
        RadialFunction u = dirac_profile(1.0, fs);
        for (int i = 0; i < g->n; ++i) u.values[i] += 0.05 * std::exp(-g->r(i));
        const OriginFit of2 = verify_origin(u, pp, fs.c_N);
        CHECK(std::abs(of2.rel_error) < 1e-2);
    }
    SECTION("k = 0 reports boundedness instead") {
        ProblemParams p0 = pp;
        p0.k = 0.0;
        auto u = RadialFunction::sample(
            g, [](double r) { return std::exp(-r); }, {1.0, 0.0},
            TailModel::exponential_like());
        const OriginFit of0 = verify_origin(u, p0, fs.c_N);
        CHECK(of0.k_zero_mode);
        CHECK(of0.bounded_ok);
        // a genuinely singular profile fails the boundedness reading
        const OriginFit ofs = verify_origin(dirac_profile(1.0, fs), p0, fs.c_N);
        CHECK_FALSE(ofs.bounded_ok);
    }
}

TEST_CASE("decay verification on synthetic tails") {
    auto g = make_grid_ptr(1e-4, 1e2, 1024, 3);
    // regime (1.6) instance with predicted exponent 2
    const ProblemParams pp{3, 2.0, 2.0, 0.5, 0.1};

    SECTION("exact power law is recovered") {
        // pure r^{-2} inside the measurement window, capped near the origin so
        // that u^p stays integrable there
        const double A = 0.37;
        auto u = RadialFunction::sample(
            g, [&](double r) { return r >= 0.5 ? A * std::pow(r, -2.0) : 4.0 * A; },
            {4.0 * A, 0.0}, TailModel::power_law(A, 2.0));
        const DecayFit df = verify_decay(u, pp);
        CHECK(df.regime == 16);
        CHECK(df.fitted_exponent == Catch::Approx(2.0).margin(1e-10));
        CHECK(df.fitted_prefactor == Catch::Approx(A).epsilon(1e-10));
        CHECK(df.predicted_exponent == Catch::Approx(2.0));
        CHECK(df.fit_residual < 1e-12);
    }
    SECTION("decay sandwich windows agree for settled tails") {
        auto u = RadialFunction::sample(
            g, [](double r) { return 0.5 * (1.0 + 1.0 / r) / (1.0 + r * r); },
            {0.5, -1.0}, TailModel::power_law(0.5, 2.0));
        const DecayFit df = verify_decay(u, pp);
        CHECK(std::abs(df.product_inner / df.product_outer - 1.0) < 0.10);
        CHECK(df.fitted_prefactor >= std::min(df.product_inner, df.product_outer) * (1 - 1e-12));
        CHECK(df.fitted_prefactor <= std::max(df.product_inner, df.product_outer) * (1 + 1e-12));
    }
    SECTION("window too short raises an analysis error") {
        auto gs = make_grid_ptr(0.5, 5.0, 64, 3);
        auto u = RadialFunction::sample(
            gs, [](double r) { return 1.0 / (1.0 + r * r); }, {1.0, 0.0},
            TailModel::power_law(1.0, 2.0));
        CHECK_THROWS_AS(verify_decay(u, pp), AnalysisError);
    }
}

TEST_CASE("lower bound certificate") {
    auto g = make_grid_ptr(1e-4, 1e2, 1024, 3);
    const ProblemParams pp{3, 2.0, 2.0, 0.5, 0.0}; // tau0 = -2
    SECTION("exact power") {
        auto u = RadialFunction::sample(
            g, [](double r) { return std::pow(r, -2.0); }, {1.0, -2.0},
            TailModel::power_law(1.0, 2.0));
        CHECK(lower_bound_check(u, pp) == Catch::Approx(1.0).epsilon(1e-12));
    }
    SECTION("positive extra term keeps the infimum at one") {
        auto u = RadialFunction::sample(
            g, [](double r) { return std::pow(r, -2.0) + std::pow(r, -3.0); }, {1.0, -3.0},
            TailModel::power_law(1.0, 2.0));
        const double b0 = lower_bound_check(u, pp);
        CHECK(b0 >= 1.0);
        CHECK(b0 < 1.05);
    }
    SECTION("degenerate input") {
        CHECK_THROWS_AS(lower_bound_check(RadialFunction::zero(g), pp), AnalysisError);
    }
}

TEST_CASE("linear comparison benchmark") {
    auto g = make_grid_ptr(1e-4, 1e2, 2048, 3);
    CHECK(std::abs(linear_comparison_decay(1.0, 1.0, 2.0, g) - 1.0) < 0.02);
    CHECK(std::abs(linear_comparison_decay(0.5, 1.0, 2.5, g) - 2.0) < 0.02 * 2.0);
    CHECK(linear_comparison_decay(1.0, 0.0, 2.0, g) == 0.0);
    CHECK_THROWS_AS(linear_comparison_decay(-1.0, 1.0, 2.0, g), ParameterError);
}

TEST_CASE("young inequality holds pointwise up to rounding") {
    auto g = make_grid_ptr(1e-4, 1e2, 512, 3);
    auto u = RadialFunction::sample(
        g, [](double r) { return 1.7 * std::pow(1.0 + r, -2.0); }, {1.7, 0.0},
        TailModel::power_law(1.7, 2.0));
    auto I = RadialFunction::sample(
        g, [](double r) { return 0.9 * std::pow(1.0 + r, -1.0); }, {0.9, 0.0},
        TailModel::power_law(0.9, 1.0));
    CHECK(young_max_violation(u, 0.5, I) <= 1e-10);
    CHECK(young_max_violation(u, 0.25, I) <= 1e-10);
}

TEST_CASE("full verification of a converged coarse solve") {
    const ProblemParams pp{3, 2.0, 2.0, 0.5, 0.0};
    auto g = make_grid_ptr(1e-4, 1e2, 512, 3);
    const AngularKernel K = build_kernel(3, 2.0, g);
    const FundamentalSolution fs = fundamental_solution(3, g);
    SolveOptions opts;
    // k large enough that the polynomial tail is settled inside the decay
    // window, still below the convergence threshold of this instance
    const SolveResult sr = iterate(pp, 1.0, g, K, fs, opts);
    REQUIRE(sr.verdict == SolveVerdict::Converged);

    const VerificationReport rep = full_verification(sr, pp, K, fs, opts.tol);
    INFO(verification_json(rep).dump(2));
    CHECK(rep.all_pass());
    CHECK(rep.lower_bound_b0 > 0.0);
    CHECK(rep.decay.has_value());
    CHECK(rep.decay->regime == 16);
    // u ~ r^{-2} at infinity is not integrable in R^3; the report must say so
    CHECK_FALSE(rep.l1_norm_u.has_value());
    CHECK(rep.lp_mass > 0.0);

    SECTION("reports are deterministic") {
        const VerificationReport rep2 = full_verification(sr, pp, K, fs, opts.tol);
        CHECK(verification_json(rep).dump() == verification_json(rep2).dump());
    }
}
