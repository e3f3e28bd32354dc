#pragma once

// Fundamental solution Gamma_0 of -Delta + Id in R^N (the radial Bessel kernel)
// and the Green operator G applied to radial right-hand sides.
//
// The operator is discretized with second-order central differences on the
// log-spaced nodes. In t = log r the radial form reads
//
//     -e^{-2t} [ u_tt + (N-2) u_t ] + u = f(e^t),
//
// which yields a tridiagonal M-matrix whenever log_step <= 2/(N-2): positive
// solutions for positive data and pointwise monotonicity in f, the two
// properties the monotone iteration rests on.

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "choquard/errors.hpp"
#include "choquard/grid.hpp"

namespace choquard {

/// Origin-normalization constant: lim_{r->0} Gamma_0(r) r^{N-2} = c_N.
/// Standard value 1/((N-2) |S^{N-1}|), shared with the -Delta kernel.
inline double green_origin_constant(int N) {
    return 1.0 / ((N - 2.0) * unit_sphere_area(N));
}

/// Gamma_0(r) = (2 pi)^{-N/2} r^{(2-N)/2} K_{(N-2)/2}(r), the distributional
/// solution of -Delta u + u = delta_0. For N=3 this is e^{-r}/(4 pi r).
inline double fundamental_solution_value(int N, double r) {
    const double nu = 0.5 * (N - 2);
    const double k = std::cyl_bessel_k(nu, r);
    if (!(k > 0.0)) return 0.0; // underflow far out
    return std::pow(2.0 * std::numbers::pi, -0.5 * N) * std::pow(r, 0.5 * (2 - N)) * k;
}

struct FundamentalSolution {
    int dimension = 0;
    RadialFunction profile;
    double c_N = 0.0;        ///< adopted normalization 1/((N-2) omega_{N-1})
    double c_N_fitted = 0.0; ///< origin-fit coefficient of profile * r^{N-2}
    double origin_fit_residual = 0.0;
};

inline FundamentalSolution fundamental_solution(int N, GridPtr grid) {
    if (N < 3) throw ParameterError("fundamental_solution: need N >= 3");
    FundamentalSolution fs;
    fs.dimension = N;
    fs.c_N = green_origin_constant(N);
    fs.profile = RadialFunction::sample(
        std::move(grid), [N](double r) { return fundamental_solution_value(N, r); },
        OriginModel{green_origin_constant(N), 2.0 - N}, TailModel::exponential_like());
    // Verify the adopted normalization: constant fit (log mean) of
    // Gamma_0 * r^{N-2} over [r_min, 10 r_min].
    const RadialGrid& g = *fs.profile.grid;
    double sum = 0.0;
    int m = 0;
    for (int i = 0; i < g.n && g.r(i) <= 10.0 * g.r_min; ++i, ++m)
        sum += std::log(fs.profile[i] * std::pow(g.r(i), N - 2.0));
    fs.c_N_fitted = std::exp(sum / m);
    double ss = 0.0;
    for (int i = 0; i < m; ++i) {
        const double e = std::log(fs.profile[i] * std::pow(g.r(i), N - 2.0)) - sum / m;
        ss += e * e;
    }
    fs.origin_fit_residual = std::sqrt(ss / m);
    return fs;
}

/// k * Gamma_0 as a profile (the analytically handled point-mass term).
inline RadialFunction dirac_profile(double k, const FundamentalSolution& fs) {
    RadialFunction out = fs.profile;
    for (double& v : out.values) v *= k;
    out.origin_model.coefficient *= k;
    return out;
}

namespace detail {

struct Tridiagonal {
    std::vector<double> lower, diag, upper; // lower[i] couples row i to i-1
};

/// Thomas solve; the systems built here are irreducibly diagonally dominant.
inline std::vector<double> solve_tridiagonal(Tridiagonal m, std::vector<double> rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int i = 1; i < n; ++i) {
        if (m.diag[i - 1] == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
        const double w = m.lower[i] / m.diag[i - 1];
        m.diag[i] -= w * m.upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (m.diag[n - 1] == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / m.diag[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (rhs[i] - m.upper[i] * x[i + 1]) / m.diag[i];
    return x;
}

}  // namespace detail

/// (-Delta + 1) u at the interior nodes of a profile, by the same central
/// stencil the solver uses. Used for residual and supersolution checks.
inline std::vector<double> apply_radial_operator(const RadialFunction& u) {
    const RadialGrid& g = *u.grid;
    const int N = g.dimension;
    const double h = g.log_step;
    std::vector<double> out(g.n, 0.0);
    for (int i = 1; i < g.n - 1; ++i) {
        const double e2 = 1.0 / (g.r(i) * g.r(i));
        const double utt = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
        const double ut = (u[i + 1] - u[i - 1]) / (2.0 * h);
        out[i] = -e2 * (utt + (N - 2.0) * ut) + u[i];
    }
    return out;
}

struct GreenOptions {
    /// Override for the far-field decay exponent used in the Robin closure
    /// u' + (sigma / r_max) u = 0. Defaults to the rhs tail model's rate.
    std::optional<double> robin_sigma;
};

/// u = G[f]: solves -(u'' + (N-1)/r u') + u = f on [r_min, r_max] with a
/// regularity closure at r_min matched to f's origin model and a Robin decay
/// closure at r_max. Requires f >= 0 with origin exponent > -N.
inline RadialFunction green_apply(const RadialFunction& f, const GreenOptions& opts = {}) {
    const RadialGrid& g = *f.grid;
    const int n = g.n;
    const int N = g.dimension;
    const double h = g.log_step;
    if (h > 2.0 / (N - 2.0))
        throw NumericalError("green_apply: grid too coarse for dimension (log step " +
                             std::to_string(h) + " > 2/(N-2)); increase n");
    const double s0 = f.origin_model.exponent;
    const double c0 = f.origin_model.coefficient;
    if (c0 != 0.0 && s0 <= -static_cast<double>(N))
        throw DivergentIntegralError("green_apply: origin model not integrable", s0, true);

    detail::Tridiagonal m;
    m.lower.assign(n, 0.0);
    m.diag.assign(n, 0.0);
    m.upper.assign(n, 0.0);
    std::vector<double> rhs(n, 0.0);

    for (int i = 1; i < n - 1; ++i) {
        const double e2 = 1.0 / (g.r(i) * g.r(i));
        m.lower[i] = -e2 * (1.0 / (h * h) - (N - 2.0) / (2.0 * h));
        m.upper[i] = -e2 * (1.0 / (h * h) + (N - 2.0) / (2.0 * h));
        m.diag[i] = 2.0 * e2 / (h * h) + 1.0;
        rhs[i] = f[i];
    }

    // Left closure from the local expansion near the origin. For sigma0 > -2
    // the image is bounded: u ~ u0 (1 + r^2/(2N)) + B(r),
    // B(r) = -c0 r^{sigma0+2} / ((sigma0+2)(sigma0+N)); eliminating u0 links the
    // first two nodes. For sigma0 < -2 the image is itself singular and the
    // model value is imposed directly.
    const double r1 = g.r(0), r2 = g.r(1);
    if (c0 != 0.0 && s0 < -2.0) {
        const double B1 = -c0 * std::pow(r1, s0 + 2.0) / ((s0 + 2.0) * (s0 + N));
        m.diag[0] = 1.0;
        rhs[0] = B1;
    } else {
        double B1 = 0.0, B2 = 0.0;
        if (c0 != 0.0) {
            double s = s0;
            if (std::abs(s + 2.0) < 1e-3) s = -2.0 + (s >= -2.0 ? 1e-3 : -1e-3); // log case guard
            const double denom = (s + 2.0) * (s + N);
            B1 = -c0 * std::pow(r1, s + 2.0) / denom;
            B2 = -c0 * std::pow(r2, s + 2.0) / denom;
        }
        const double A1 = 1.0 + r1 * r1 / (2.0 * N), A2 = 1.0 + r2 * r2 / (2.0 * N);
        m.diag[0] = 1.0 / A1;
        m.upper[0] = -1.0 / A2;
        rhs[0] = B1 / A1 - B2 / A2;
    }

    // Robin closure at r_max with the rate of the slower of {exponential, rhs tail}.
    double lambda;
    if (opts.robin_sigma) {
        lambda = *opts.robin_sigma / g.r_max;
    } else if (f.tail_model.kind == TailModel::Kind::PowerLaw) {
        lambda = std::max(f.tail_model.exponent, 0.0) / g.r_max;
    } else {
        lambda = 1.0 + (N - 1.0) / (2.0 * g.r_max);
    }
    const double dr = g.r(n - 1) - g.r(n - 2);
    m.lower[n - 1] = -1.0 / dr;
    m.diag[n - 1] = 1.0 / dr + lambda;
    rhs[n - 1] = 0.0;

    RadialFunction u;
    u.grid = f.grid;
    u.values = detail::solve_tridiagonal(std::move(m), std::move(rhs));

    // M-matrix structure guarantees u >= 0 up to rounding.
    double scale = 0.0;
    for (double v : u.values) scale = std::max(scale, std::abs(v));
    for (double& v : u.values) {
        if (v < 0.0) {
            if (v < -1e-10 * scale)
                throw NumericalError("green_apply: positivity violated beyond rounding");
            v = 0.0;
        }
    }

    u.origin_model = fit_origin_model(u);
    u.tail_model = fit_tail_model(u);
    return u;
}

}  // namespace choquard
