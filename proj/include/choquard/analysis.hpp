#pragma once

// Verification analytics: maps computed profiles back to the quantitative laws
// of the problem. Origin law u(r) r^{N-2} -> c_N k; far-field decay
// u(r) r^{(N-alpha)/(1-q)} -> (int_{R^N} u^p)^{1/(1-q)} in the supercritical
// mass regime; lower-bound certificate u >= b0 r^{tau0}; and the linear
// comparison benchmark for -Delta u + mu u = nu r^{-sigma}.
//
// Limit coefficients are estimated by log-mean products over far/near windows
// rather than by extrapolating free fits, so subleading corrections enter only
// through the window placement. All analytics are pure and deterministic.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "choquard/errors.hpp"
#include "choquard/exponents.hpp"
#include "choquard/green.hpp"
#include "choquard/grid.hpp"
#include "choquard/riesz.hpp"
#include "choquard/solver.hpp"

namespace choquard {

namespace detail {

/// Geometric mean of u(r) * r^{power} over grid nodes in [lo, hi].
/// Returns 0 when any sample vanishes.
inline double product_log_mean(const RadialFunction& u, double power, double lo, double hi) {
    const RadialGrid& g = *u.grid;
    double acc = 0.0;
    int m = 0;
    for (int i = 0; i < g.n; ++i) {
        const double r = g.r(i);
        if (r < lo || r > hi) continue;
        const double v = u[i] * std::pow(r, power);
        if (!(v > 0.0)) return 0.0;
        acc += std::log(v);
        ++m;
    }
    if (m == 0) throw AnalysisError("product_log_mean: empty window");
    return std::exp(acc / m);
}

}  // namespace detail

struct OriginFit {
    double exponent = 0.0;    ///< free log-log slope of u over [r_min, 10 r_min]
    double coefficient = 0.0; ///< limit estimate of u(r) r^{N-2}
    double target = 0.0;      ///< c_N * k
    double rel_error = 0.0;
    double fit_residual = 0.0;
    bool k_zero_mode = false;
    bool bounded_ok = false; ///< k = 0: finite at r_min with exponent above -(N-2)+0.5
};

/// Checks the origin law. For k > 0 the product u(r) r^{N-2} is averaged over
/// [r_min, 10 r_min] and compared with c_N k; for k = 0 a boundedness check is
/// reported instead (the solution is classical).
inline OriginFit verify_origin(const RadialFunction& u, const ProblemParams& pp, double cN) {
    const RadialGrid& g = *u.grid;
    OriginFit fit;
    const double lo = g.r_min, hi = 10.0 * g.r_min;
    if (pp.k > 0.0) {
        const PowerLawFit pl = fit_power_law(u, lo, hi);
        fit.exponent = pl.exponent;
        fit.fit_residual = pl.residual;
        fit.coefficient = detail::product_log_mean(u, pp.N - 2.0, lo, hi);
        fit.target = cN * pp.k;
        fit.rel_error = fit.coefficient / fit.target - 1.0;
        return fit;
    }
    fit.k_zero_mode = true;
    fit.target = 0.0;
    const double at_rmin = u[0];
    if (u.sup() == 0.0) {
        // Trivial profile: bounded by definition.
        fit.bounded_ok = true;
        return fit;
    }
    const PowerLawFit pl = fit_power_law(u, lo, hi);
    fit.exponent = pl.exponent;
    fit.fit_residual = pl.residual;
    fit.coefficient = detail::product_log_mean(u, pp.N - 2.0, lo, hi);
    fit.bounded_ok = std::isfinite(at_rmin) && fit.exponent > -(pp.N - 2.0) + 0.5;
    return fit;
}

struct DecayFit {
    int regime = 0; ///< 16 or 19
    double window_lo = 0.0, window_hi = 0.0;

    double fitted_exponent = 0.0; ///< decay exponent from the free tail fit
    double fit_residual = 0.0;
    double predicted_exponent = 0.0;

    /// Limit estimate of u(r) r^{predicted_exponent} over the outer half-decade.
    double fitted_prefactor = 0.0;
    /// Regime 16: (int_{R^N} u^p)^{1/(1-q)}, the constant forced by the
    /// far-field balance u^{1-q} ~ I_alpha[u^p] ~ ||u^p||_1 r^{alpha-N}.
    /// (u itself need not be integrable; its L1 mass is reported separately
    /// when it exists.)
    double predicted_prefactor = 0.0;
    double exponent_rel_error = 0.0;
    double prefactor_rel_error = 0.0;

    /// Limit products over two disjoint far-field windows (decay sandwich).
    double product_inner = 0.0, product_outer = 0.0;

    // Regime 19 two-sided bound data.
    double limsup_product = 0.0, liminf_product = 0.0;
    bool bounded_by_k = false, bounded_below = false;
    bool regime_not_attainable_note = false;
};

/// Fits the far-field decay of a converged profile against the predicted law.
/// The measurement window is the half-decade below r_max/2: the upper cut
/// keeps Robin-boundary pollution out, the lower cut keeps the window past the
/// crossover radius where the exponential near-field part still competes with
/// the polynomial tail (a free fit across that crossover measures neither).
inline DecayFit verify_decay(const RadialFunction& u, const ProblemParams& pp) {
    const RadialGrid& g = *u.grid;
    const DecayPrediction pred = predicted_decay(pp);
    DecayFit fit;
    fit.regime = pred.regime;
    fit.predicted_exponent = pred.exponent;
    fit.window_hi = g.r_max / 2.0;
    fit.window_lo = fit.window_hi / std::sqrt(10.0);
    if (fit.window_lo < 4.0 * g.r_min)
        throw AnalysisError("verify_decay: fitting window too short; increase r_max");

    PowerLawFit pl;
    try {
        pl = fit_power_law(u, fit.window_lo, fit.window_hi);
    } catch (const FitError& e) {
        throw AnalysisError(std::string("verify_decay: ") + e.what() + "; increase r_max");
    }
    fit.fitted_exponent = -pl.exponent;
    fit.fit_residual = pl.residual;

    const double quarter = fit.window_hi / std::pow(10.0, 0.25);
    fit.fitted_prefactor =
        detail::product_log_mean(u, pred.exponent, fit.window_lo, fit.window_hi);
    fit.product_inner = detail::product_log_mean(u, pred.exponent, fit.window_lo, quarter);
    fit.product_outer = detail::product_log_mean(u, pred.exponent, quarter, fit.window_hi);

    if (pred.regime == 16) {
        fit.predicted_prefactor = std::pow(integrate(pow(u, pp.p)), 1.0 / (1.0 - pp.q));
        fit.exponent_rel_error = fit.fitted_exponent / fit.predicted_exponent - 1.0;
        fit.prefactor_rel_error = fit.fitted_prefactor / fit.predicted_prefactor - 1.0;
    } else {
        // Regime (1.9): two-sided bounds, limsup <= k and liminf > 0. Inside
        // the existence hypotheses this regime appears empty; the check is
        // implemented anyway and labeled.
        fit.regime_not_attainable_note = true;
        double mx = 0.0, mn = std::numeric_limits<double>::infinity();
        for (int i = 0; i < g.n; ++i) {
            const double r = g.r(i);
            if (r < fit.window_lo || r > fit.window_hi) continue;
            const double v = u[i] * std::pow(r, pred.exponent);
            mx = std::max(mx, v);
            mn = std::min(mn, v);
        }
        fit.limsup_product = mx;
        fit.liminf_product = mn;
        fit.bounded_by_k = mx <= pp.k * 1.05;
        fit.bounded_below = mn > 0.0;
    }
    return fit;
}

/// b0 = inf over nodes r >= 1 of u(r) r^{-tau0}; strictly positive for any
/// converged solution (the lower-bound certificate).
inline double lower_bound_check(const RadialFunction& u, const ProblemParams& pp) {
    if (u.sup() == 0.0) throw AnalysisError("lower_bound_check: all-zero profile");
    const double t0 = tau0(pp);
    const RadialGrid& g = *u.grid;
    double b0 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.n; ++i) {
        const double r = g.r(i);
        if (r < 1.0) continue;
        b0 = std::min(b0, u[i] * std::pow(r, -t0));
    }
    return b0;
}

/// Solves -Delta u + mu u = nu r^{-sigma} outside the unit ball through the
/// rescaled -Delta + 1 operator and returns the fitted limit of u(r) r^{sigma}
/// (compare with nu/mu). The substitution y = sqrt(mu) x maps the problem onto
/// the grid with forcing nu mu^{sigma/2-1} |y|^{-sigma} outside B_sqrt(mu).
inline double linear_comparison_decay(double mu, double nu, double sigma, GridPtr grid) {
    if (!(mu > 0.0) || !(sigma > 0.0) || nu < 0.0)
        throw ParameterError("linear_comparison_decay: need mu, sigma > 0 and nu >= 0");
    if (nu == 0.0) return 0.0;
    const double nu_scaled = nu * std::pow(mu, 0.5 * sigma - 1.0);
    const double rb = std::sqrt(mu);
    RadialFunction f = RadialFunction::sample(
        grid, [&](double r) { return r >= rb ? nu_scaled * std::pow(r, -sigma) : 0.0; },
        {0.0, 0.0}, TailModel::power_law(nu_scaled, sigma));
    const RadialFunction u = green_apply(f);
    // Quarter decade below r_max/2: far enough that the O(r^-2) correction is
    // small, inside the Robin-unpolluted region.
    const double hi = grid->r_max / 2.0;
    const double fitted_scaled =
        detail::product_log_mean(u, sigma, hi / std::pow(10.0, 0.25), hi);
    return fitted_scaled * std::pow(mu, -0.5 * sigma);
}

/// Largest relative violation of the pointwise Young inequality
/// I u^q <= (1-q) I^{1/(1-q)} + q u over the nodes. An arithmetic identity:
/// should be zero up to rounding.
inline double young_max_violation(const RadialFunction& u, double q,
                                  const RadialFunction& riesz_of_up) {
    double worst = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        const double I = riesz_of_up[i];
        const double lhs = I * std::pow(u[i], q);
        const double rhs = (1.0 - q) * std::pow(I, 1.0 / (1.0 - q)) + q * u[i];
        const double floor = std::numeric_limits<double>::min();
        worst = std::max(worst, (lhs - rhs) / (std::abs(rhs) + floor));
    }
    return worst;
}

struct VerifyTolerances {
    double origin_rel = 0.02;
    double decay_exponent_rel = 0.05;
    double decay_prefactor_rel = 0.10;
    double residual_factor = 10.0; ///< times the solve tolerance
    double young_slack = 1e-10;
};

/// Full per-solve verification: origin and decay laws, lower bound, Young
/// route, fixed-point residual, plus pass flags derived purely from the
/// numeric fields and the configured tolerances.
struct VerificationReport {
    OriginFit origin;
    std::optional<DecayFit> decay;
    double lower_bound_b0 = 0.0;
    std::optional<double> l1_norm_u; ///< present only when u is integrable
    double lp_mass = 0.0;            ///< int_{R^N} u^p
    double young_violation = 0.0;
    double residual = 0.0;
    bool trivial = false;
    std::vector<std::pair<std::string, bool>> pass_flags;

    bool all_pass() const {
        for (const auto& [name, ok] : pass_flags)
            if (!ok) return false;
        return true;
    }
};

inline VerificationReport full_verification(const SolveResult& sr, const ProblemParams& pp,
                                            const AngularKernel& kernel,
                                            const FundamentalSolution& fs, double solve_tol,
                                            const VerifyTolerances& tol = {}) {
    VerificationReport rep;
    rep.trivial = sr.trivial;
    ProblemParams with_k = pp;
    with_k.k = sr.k;
    rep.origin = verify_origin(sr.u, with_k, fs.c_N);

    if (sr.trivial) {
        rep.pass_flags.emplace_back("origin_bounded", rep.origin.bounded_ok);
        return rep;
    }

    rep.lp_mass = integrate(pow(sr.u, pp.p));
    try {
        rep.l1_norm_u = integrate(sr.u);
    } catch (const DivergentIntegralError&) {
        // u decays too slowly to be integrable; its p-th power still is.
    }
    rep.lower_bound_b0 = lower_bound_check(sr.u, with_k);
    rep.young_violation = young_max_violation(sr.u, pp.q, riesz_apply(pow(sr.u, pp.p), kernel));
    std::optional<double> robin;
    const RegionVerdict rv = classify(pp);
    if (rv.verdict == Region::ExistenceWithDirac) robin = predicted_decay(pp).exponent;
    rep.residual = fixed_point_residual(sr.u, pp, sr.k, kernel, fs, robin);

    if (rv.verdict == Region::ExistenceWithDirac && sr.k > 0.0) {
        rep.decay = verify_decay(sr.u, with_k);
        rep.pass_flags.emplace_back("origin_law",
                                    std::abs(rep.origin.rel_error) <= tol.origin_rel);
        if (rep.decay->regime == 16) {
            rep.pass_flags.emplace_back(
                "decay_exponent",
                std::abs(rep.decay->exponent_rel_error) <= tol.decay_exponent_rel);
            rep.pass_flags.emplace_back(
                "decay_prefactor",
                std::abs(rep.decay->prefactor_rel_error) <= tol.decay_prefactor_rel);
        } else {
            rep.pass_flags.emplace_back("decay_bounded_by_k", rep.decay->bounded_by_k);
            rep.pass_flags.emplace_back("decay_bounded_below", rep.decay->bounded_below);
        }
    }
    rep.pass_flags.emplace_back("lower_bound_positive", rep.lower_bound_b0 > 0.0);
    rep.pass_flags.emplace_back("young_route", rep.young_violation <= tol.young_slack);
    rep.pass_flags.emplace_back("fixed_point_residual",
                                rep.residual < tol.residual_factor * solve_tol);
    return rep;
}

}  // namespace choquard
