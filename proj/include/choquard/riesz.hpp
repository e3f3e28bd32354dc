#pragma once

// Radial Riesz potential
//
//     I_alpha[f](x) = int_{R^N} f(|y|) |x - y|^{alpha - N} dy,
//
// reduced to one dimension through the angular kernel
//
//     kappa(r, s) = int_{S^{N-1}} |r e_1 - s w|^{alpha - N} dsigma(w)
//                 = r^{alpha - N} K(s / r),
//
// where K(rho) = omega_{N-2} int_0^pi (1 + rho^2 - 2 rho cos t)^{(alpha-N)/2}
// sin^{N-2} t dt and K(rho) = rho^{alpha-N} K(1/rho). On a log-uniform grid the
// node ratios s_j / r_i take only 2n-1 values, so the kernel table is built
// from one ratio profile. The kernel diverges on the diagonal when alpha <= 1;
// the radial quadrature never touches it: the two panels adjacent to s = r use
// a product rule in the clustered variable 1 - rho = X t^gamma whose abscissas
// are grid-independent, so their K values are precomputed too.
//
// Truncation to [r_min, r_max] is compensated by continuing the trapezoid sum
// onto virtual log-spaced nodes filled from the endpoint power-law models,
// plus closed-form remainders beyond the extension.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "choquard/errors.hpp"
#include "choquard/grid.hpp"

namespace choquard {

namespace detail {

constexpr double kAngularTol = 1e-9;
constexpr int kAngularDepth = 8; // ~4k point cap per entry
constexpr int kNearDiagPoints = 32;

inline double angular_theta_part(int N, double alpha, double rho, double t0, double t1) {
    auto f = [&](double t) {
        return std::pow(1.0 + rho * rho - 2.0 * rho * std::cos(t), 0.5 * (alpha - N)) *
               std::pow(std::sin(t), N - 2);
    };
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, t0, t1, kAngularDepth, kAngularTol);
}

/// A(rho) = int_0^pi (1+rho^2-2 rho cos t)^{(alpha-N)/2} sin^{N-2} t dt for
/// rho in [0, 1). Near rho = 1 the kernel concentrates at t = 0; the variable
/// v = 1 - cos t with v = v* sinh^2 w (v* = (1-rho)^2 / 2rho) flattens it into
/// an analytic integrand, evaluated in log space to dodge overflow.
inline double angular_profile(int N, double alpha, double rho) {
    if (rho <= 0.0) {
        // A(0) = B(1/2, (N-1)/2)
        return std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (N - 1)) / std::tgamma(0.5 * N);
    }
    if (rho <= 0.9) return angular_theta_part(N, alpha, rho, 0.0, std::numbers::pi);

    const double d = 1.0 - rho;
    const double vs = d * d / (2.0 * rho);
    const double W = std::asinh(std::sqrt(1.0 / vs));
    const double logd = std::log(d);
    auto f = [&](double w) {
        const double sh = std::sinh(w), ch = std::cosh(w);
        const double v = vs * sh * sh;
        double lnI = (alpha - N) * (logd + std::log(ch)) + std::log(2.0 * vs * sh * ch);
        if (N != 3) lnI += 0.5 * (N - 3) * (std::log(v) + std::log(2.0 - v));
        return std::exp(lnI);
    };
    const double near = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, 0.0, W, kAngularDepth + 4, kAngularTol);
    return near + angular_theta_part(N, alpha, rho, 0.5 * std::numbers::pi, std::numbers::pi);
}

inline double unit_sphere_area_dim(int nm1) {
    // |S^{nm1}| in R^{nm1+1}
    return 2.0 * std::pow(std::numbers::pi, 0.5 * (nm1 + 1)) / std::tgamma(0.5 * (nm1 + 1));
}

}  // namespace detail

/// K(rho) = omega_{N-2} A(rho), folded through the symmetry for rho > 1.
/// K(0) = omega_{N-1}; K(1) = +infinity when alpha <= 1.
inline double angular_kappa(int N, double alpha, double rho) {
    if (!(alpha > 0.0) || !(alpha < static_cast<double>(N)))
        throw ParameterError("angular_kappa: need 0 < alpha < N");
    const double omega_sub = detail::unit_sphere_area_dim(N - 2);
    if (rho == 1.0) {
        if (alpha <= 1.0) return std::numeric_limits<double>::infinity();
        // closed form: 2^{alpha-2} B((alpha-1)/2, (N-1)/2)
        return omega_sub * std::pow(2.0, alpha - 2.0) *
               std::exp(std::lgamma(0.5 * (alpha - 1)) + std::lgamma(0.5 * (N - 1)) -
                        std::lgamma(0.5 * (alpha + N) - 1.0));
    }
    if (rho > 1.0)
        return std::pow(rho, alpha - N) * omega_sub * detail::angular_profile(N, alpha, 1.0 / rho);
    return omega_sub * detail::angular_profile(N, alpha, rho);
}

/// Tabulated angular kernel for one (N, alpha, grid) triple. Immutable after
/// construction; applies are read-only and safe to run concurrently.
struct AngularKernel {
    int dimension = 0;
    double alpha = 0.0;
    GridPtr grid;
    double log_step = 0.0;
    int extension = 0; ///< number of virtual nodes continued past each endpoint
    bool diagonal_integrable = false;

    // K at grid ratios: k_minus[m] = K(e^{-m h}), k_plus[m] = K(e^{+m h}),
    // m = 0 .. n-1+extension. k_minus[0] is the diagonal (inf for alpha <= 1).
    std::vector<double> k_minus, k_plus;

    // Near-diagonal product quadrature: fixed ratios, K values and weights for
    // the panels [r e^{-h}, r] and [r, r e^{h}].
    std::vector<double> lo_rho, lo_kappa, lo_w;
    std::vector<double> hi_rho, hi_kappa, hi_w;

    std::uint64_t grid_hash = 0;

    /// kappa(r_i, s_j) for grid nodes (the table view of the kernel).
    double kappa(int i, int j) const {
        const double fac = std::pow(grid->r(i), alpha - dimension);
        return fac * (j <= i ? k_minus[i - j] : k_plus[j - i]);
    }
};

inline std::uint64_t grid_fingerprint(const RadialGrid& g) {
    auto mix = [](std::uint64_t h, std::uint64_t v) {
        h ^= v;
        return h * 0x100000001b3ull;
    };
    std::uint64_t h = 0xcbf29ce484222325ull;
    std::uint64_t a, b;
    static_assert(sizeof(double) == 8);
    std::memcpy(&a, &g.r_min, 8);
    std::memcpy(&b, &g.r_max, 8);
    h = mix(h, a);
    h = mix(h, b);
    h = mix(h, static_cast<std::uint64_t>(g.n));
    h = mix(h, static_cast<std::uint64_t>(g.dimension));
    return h;
}

inline AngularKernel build_kernel(int N, double alpha, GridPtr grid) {
    if (!(alpha > 0.0) || !(alpha < static_cast<double>(N)))
        throw ParameterError("build_kernel: need 0 < alpha < N");
    AngularKernel K;
    K.dimension = N;
    K.alpha = alpha;
    K.grid = std::move(grid);
    K.log_step = K.grid->log_step;
    K.diagonal_integrable = alpha > 1.0;
    K.grid_hash = grid_fingerprint(*K.grid);

    const double h = K.log_step;
    const int n = K.grid->n;
    // Extend about 4 log-units (factor e^4) past each endpoint for the model
    // continuation; remainders beyond are closed-form.
    K.extension = static_cast<int>(std::ceil(4.0 / h));
    const int table = n + K.extension;

    K.k_minus.resize(table);
    K.k_plus.resize(table);
    K.k_minus[0] = angular_kappa(N, alpha, 1.0);
    K.k_plus[0] = K.k_minus[0];
    for (int m = 1; m < table; ++m) {
        K.k_minus[m] = angular_kappa(N, alpha, std::exp(-m * h));
        K.k_plus[m] = std::exp(m * h * (alpha - N)) * K.k_minus[m];
    }

    // Clustered product rule on the diagonal panels: 1-rho = X t^gamma (left),
    // rho-1 = X t^gamma (right); gamma keeps the integrand ~ t^{gamma*alpha-1}
    // mild at t=0.
    const double gamma = std::max(3.0, 3.0 / alpha);
    const double x_lo = 1.0 - std::exp(-h);
    const double x_hi = std::exp(h) - 1.0;
    using GL = boost::math::quadrature::gauss<double, detail::kNearDiagPoints>;
    const auto& xs = GL::abscissa(); // positive half of [-1,1]
    const auto& ws = GL::weights();
    auto push_side = [&](double X, bool lower, std::vector<double>& rho_v,
                         std::vector<double>& kap_v, std::vector<double>& w_v) {
        auto add = [&](double x, double w) {
            const double t = 0.5 * (1.0 + x);         // map to (0,1)
            const double jac = 0.5 * w * X * gamma * std::pow(t, gamma - 1.0);
            const double rho = lower ? 1.0 - X * std::pow(t, gamma) : 1.0 + X * std::pow(t, gamma);
            rho_v.push_back(rho);
            kap_v.push_back(angular_kappa(N, alpha, rho));
            w_v.push_back(jac);
        };
        for (size_t k = 0; k < xs.size(); ++k) {
            add(xs[k], ws[k]);
            if (xs[k] != 0.0) add(-xs[k], ws[k]);
        }
    };
    push_side(x_lo, true, K.lo_rho, K.lo_kappa, K.lo_w);
    push_side(x_hi, false, K.hi_rho, K.hi_kappa, K.hi_w);
    return K;
}

namespace detail {

/// f inside a panel, linear between the bracketing node values. Linear (not
/// log-linear) so the whole apply stays an exactly linear map of the samples;
/// the within-panel deviation is O(h^2) of an already O(h)-weighted term.
inline double panel_interp(double va, double vb, double theta) {
    return va + (vb - va) * theta;
}

}  // namespace detail

/// I_alpha[f] on the grid. Integrability requirements: origin exponent > -N
/// and tail exponent > alpha; the tail violation is the numerical witness of
/// the Theorem-1.1 obstruction and throws DivergentRieszError.
inline RadialFunction riesz_apply(const RadialFunction& f, const AngularKernel& K) {
    const RadialGrid& g = *f.grid;
    const int n = g.n;
    const int N = K.dimension;
    const double alpha = K.alpha;
    const double h = g.log_step;
    const int M = K.extension;
    if (grid_fingerprint(g) != K.grid_hash)
        throw ParameterError("riesz_apply: profile grid does not match kernel grid");

    const double s0 = f.origin_model.exponent;
    const double c0 = f.origin_model.coefficient;
    if (c0 != 0.0 && s0 <= -static_cast<double>(N))
        throw DivergentRieszError(
            "riesz_apply: origin model exponent violates sigma_0 > -N", s0, alpha);
    const bool tail_pl = f.tail_model.kind == TailModel::Kind::PowerLaw;
    const double cinf = tail_pl ? f.tail_model.coefficient : 0.0;
    const double sinf = tail_pl ? f.tail_model.exponent : 0.0;
    if (tail_pl && cinf != 0.0 && sinf <= alpha)
        throw DivergentRieszError("riesz_apply: tail decay exponent " + std::to_string(sinf) +
                                      " <= alpha = " + std::to_string(alpha) +
                                      "; I_alpha[f] diverges",
                                  sinf, alpha);

    const bool use_origin = c0 != 0.0;
    const bool use_tail = tail_pl && cinf != 0.0;
    const int jlo = use_origin ? -M : 0;
    const int jhi = use_tail ? n - 1 + M : n - 1;

    // V[j] = f(s_j) s_j^N on real and virtual nodes (virtual values from models).
    std::vector<double> V(static_cast<size_t>(jhi - jlo + 1));
    auto vat = [&](int j) -> double& { return V[static_cast<size_t>(j - jlo)]; };
    for (int j = jlo; j < 0; ++j) {
        const double s = g.r_min * std::exp(j * h);
        vat(j) = c0 * std::pow(s, s0 + N);
    }
    for (int j = 0; j < n; ++j) vat(j) = f[j] * std::pow(g.r(j), N);
    for (int j = n; j <= jhi; ++j) {
        const double s = g.r_max * std::exp((j - (n - 1)) * h);
        vat(j) = cinf * std::pow(s, static_cast<double>(N) - sinf);
    }

    const double m0 = s0 + N;
    const double origin_edge = g.r_min * std::exp(-M * h); // below: closed-form remainder
    const double tail_edge = g.r_max * std::exp(M * h);

    RadialFunction out;
    out.grid = f.grid;
    out.values.assign(n, 0.0);

    for (int i = 0; i < n; ++i) {
        const double r = g.r(i);
        // Trapezoid (in log s) over all panels except the two touching s = r.
        auto incl = [&](int p) {
            return p >= jlo && p <= jhi - 1 && p != i - 1 && p != i;
        };
        double acc = 0.0;
        for (int j = jlo; j <= jhi; ++j) {
            if (j == i) continue; // zero weight; keeps inf * 0 out
            const double w = 0.5 * h * (static_cast<double>(incl(j - 1)) + incl(j));
            if (w == 0.0) continue;
            const double kk = (j < i) ? K.k_minus[i - j] : K.k_plus[j - i];
            acc += w * V[static_cast<size_t>(j - jlo)] * kk;
        }
        if (use_origin)
            acc += c0 * std::pow(origin_edge, m0) / m0 * K.k_minus[i + M];

        // Diagonal panels by the clustered product rule; f inside a panel is
        // log-linear between its endpoint values (model values off-grid).
        auto fval = [&](double s, int lo_node) -> double {
            double va, vb;
            if (lo_node < 0) {
                va = c0 * std::pow(g.r_min * std::exp(lo_node * h), s0);
            } else {
                va = f[lo_node];
            }
            if (lo_node + 1 > n - 1) {
                if (!use_tail) return 0.0;
                return cinf * std::pow(s, -sinf);
            }
            vb = f[lo_node + 1];
            const double theta =
                (std::log(s / g.r_min) - lo_node * h) / h; // position inside the panel
            return detail::panel_interp(va, vb, theta);
        };
        const double r_pow_N = std::pow(r, static_cast<double>(N));
        if (i - 1 >= jlo) { // left panel [s_{i-1}, s_i]
            double part = 0.0;
            for (size_t k = 0; k < K.lo_rho.size(); ++k) {
                const double rho = K.lo_rho[k];
                part += K.lo_w[k] * fval(r * rho, i - 1) * K.lo_kappa[k] * std::pow(rho, N - 1);
            }
            acc += part * r_pow_N;
        }
        if (i + 1 <= jhi) { // right panel [s_i, s_{i+1}]
            double part = 0.0;
            for (size_t k = 0; k < K.hi_rho.size(); ++k) {
                const double rho = K.hi_rho[k];
                part += K.hi_w[k] * fval(r * rho, i) * K.hi_kappa[k] * std::pow(rho, N - 1);
            }
            acc += part * r_pow_N;
        }

        double value = std::pow(r, alpha - N) * acc;
        if (use_tail) {
            // remainder of (tail_edge, infinity): kappa(r,s) = s^{alpha-N} K(r/s)
            value += cinf * std::pow(tail_edge, alpha - sinf) / (sinf - alpha) *
                     K.k_minus[(n - 1 + M) - i];
        }
        out.values[i] = value;
    }

    // Endpoint models of the image: bounded constant at the origin when
    // integrable there, fitted elsewhere.
    if (c0 == 0.0 || s0 + alpha > 0.0) {
        double at0 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double cj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            at0 += h * cj * f[j] * std::pow(g.r(j), alpha);
        }
        if (use_origin) at0 += c0 * std::pow(g.r_min, s0 + alpha) / (s0 + alpha);
        if (use_tail) at0 += cinf * std::pow(g.r_max, alpha - sinf) / (sinf - alpha);
        out.origin_model = {unit_sphere_area(N) * at0, 0.0};
    } else {
        out.origin_model = fit_origin_model(out);
    }
    out.tail_model = fit_tail_model(out);
    return out;
}

/// I_alpha[f](0) = omega_{N-1} int_0^inf f(s) s^{alpha-1} ds (finite iff the
/// origin model satisfies sigma_0 + alpha > 0).
inline double riesz_at_origin(const RadialFunction& f, double alpha) {
    const RadialGrid& g = *f.grid;
    const double s0 = f.origin_model.exponent;
    const double c0 = f.origin_model.coefficient;
    if (c0 != 0.0 && s0 + alpha <= 0.0)
        throw DivergentIntegralError("riesz_at_origin: sigma_0 + alpha <= 0", s0, true);
    double acc = 0.0;
    for (int j = 0; j < g.n; ++j) {
        const double cj = (j == 0 || j == g.n - 1) ? 0.5 : 1.0;
        acc += g.log_step * cj * f[j] * std::pow(g.r(j), alpha);
    }
    if (c0 != 0.0) acc += c0 * std::pow(g.r_min, s0 + alpha) / (s0 + alpha);
    if (f.tail_model.kind == TailModel::Kind::PowerLaw) {
        const double sinf = f.tail_model.exponent;
        if (sinf <= alpha)
            throw DivergentRieszError("riesz_at_origin: tail exponent <= alpha",
                                      sinf, alpha);
        acc += f.tail_model.coefficient * std::pow(g.r_max, alpha - sinf) / (sinf - alpha);
    }
    return unit_sphere_area(g.dimension) * acc;
}

/// Quantitative check of the far-field expansion I_alpha[f] = ||f||_1 r^{alpha-N}
/// + O(r^{-(N-alpha+gamma)}) for tails dominated by r^{-beta}, beta > N.
struct RieszReport {
    double l1_norm = 0.0;
    double gamma = 0.0; ///< (beta-N)/(1+beta-N)
    std::vector<std::pair<double, double>> error_samples;
    double fitted_error_slope = 0.0;
    double bound_slope = 0.0; ///< -(N - alpha + gamma); the fitted slope should not exceed it
};

inline RieszReport asymptotic_check(const RadialFunction& f, double beta,
                                    const AngularKernel& K) {
    if (!(beta > K.dimension))
        throw ParameterError("asymptotic_check: need beta > N");
    RieszReport rep;
    rep.l1_norm = integrate(f);
    rep.gamma = (beta - K.dimension) / (1.0 + beta - K.dimension);
    rep.bound_slope = -(K.dimension - K.alpha + rep.gamma);

    const RadialFunction I = riesz_apply(f, K);
    const RadialGrid& g = *f.grid;
    const double lo = g.r_max / std::pow(10.0, 1.5);
    std::vector<double> xs, ys;
    for (int i = 0; i < g.n; ++i) {
        const double r = g.r(i);
        if (r < lo) continue;
        const double err = std::abs(I[i] - rep.l1_norm * std::pow(r, K.alpha - K.dimension));
        rep.error_samples.emplace_back(r, err);
        if (err > 0.0) {
            xs.push_back(std::log(r));
            ys.push_back(std::log(err));
        }
    }
    if (xs.size() < 8) throw AnalysisError("asymptotic_check: too few usable samples");
    double sx = 0, sy = 0;
    for (size_t i = 0; i < xs.size(); ++i) { sx += xs[i]; sy += ys[i]; }
    const double mx = sx / xs.size(), my = sy / ys.size();
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    rep.fitted_error_slope = sxy / sxx;
    return rep;
}

}  // namespace choquard
