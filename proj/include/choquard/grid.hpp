#pragma once

// Log-spaced radial discretization of (0, infinity), weighted quadrature for
// omega_{N-1} * int_0^inf f(r) r^{N-1} dr, and power-law endpoint models for
// radial profiles. Grids and profiles are immutable after construction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "choquard/errors.hpp"

namespace choquard {

/// Surface area of the unit (N-1)-sphere, |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2).
inline double unit_sphere_area(int N) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

/// Volume of the unit ball in R^N.
inline double unit_ball_volume(int N) { return unit_sphere_area(N) / N; }

struct RadialGrid {
    double r_min = 0.0;
    double r_max = 0.0;
    int n = 0;          ///< number of nodes
    int dimension = 0;  ///< ambient dimension N
    double log_step = 0.0;
    double omega = 0.0; ///< |S^{N-1}|
    std::vector<double> nodes;   ///< strictly increasing, log-uniform
    std::vector<double> weights; ///< full-measure weights: sum w_i f_i = int_{R^N} f

    int size() const { return n; }
    double r(int i) const { return nodes[static_cast<size_t>(i)]; }

    /// Index of the node nearest to radius x.
    int nearest_index(double x) const {
        const double t = std::log(x / r_min) / log_step;
        const int i = static_cast<int>(std::lround(t));
        return std::clamp(i, 0, n - 1);
    }
};

/// Log-uniform grid on [r_min, r_max] with composite trapezoid weights in log
/// coordinates for the measure omega_{N-1} r^{N-1} dr.
inline RadialGrid make_grid(double r_min, double r_max, int n, int N) {
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw ParameterError("make_grid: need 0 < r_min < r_max");
    if (n < 16) throw ParameterError("make_grid: need n >= 16");
    if (N < 3) throw ParameterError("make_grid: need N >= 3");

    RadialGrid g;
    g.r_min = r_min;
    g.r_max = r_max;
    g.n = n;
    g.dimension = N;
    g.omega = unit_sphere_area(N);
    g.log_step = std::log(r_max / r_min) / (n - 1);
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int i = 0; i < n; ++i) g.nodes[i] = r_min * std::exp(i * g.log_step);
    g.nodes[n - 1] = r_max;
    // int f r^{N-1} dr = int f(e^t) e^{Nt} dt: trapezoid in t, the r^N weight folded in.
    for (int i = 0; i < n; ++i) {
        const double c = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        g.weights[i] = g.omega * g.log_step * c * std::pow(g.nodes[i], N);
    }
    return g;
}

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_grid_ptr(double r_min, double r_max, int n, int N) {
    return std::make_shared<const RadialGrid>(make_grid(r_min, r_max, n, N));
}

/// f(r) ~ coefficient * r^{exponent} for r < r_min.
struct OriginModel {
    double coefficient = 0.0;
    double exponent = 0.0;
};

/// Behavior of a profile beyond r_max.
struct TailModel {
    enum class Kind { PowerLaw, ExponentialLike, Zero };
    Kind kind = Kind::Zero;
    double coefficient = 0.0; ///< PowerLaw: f(r) ~ coefficient * r^{-exponent}
    double exponent = 0.0;    ///< PowerLaw decay exponent sigma_inf (positive)

    static TailModel power_law(double c, double sigma) { return {Kind::PowerLaw, c, sigma}; }
    static TailModel exponential_like() { return {Kind::ExponentialLike, 0.0, 0.0}; }
    static TailModel zero() { return {Kind::Zero, 0.0, 0.0}; }
};

/// Grid samples of a nonnegative radial profile plus endpoint models. This is
/// the numerical home of u, u_k, v_n, w_k and I_alpha[f].
struct RadialFunction {
    GridPtr grid;
    std::vector<double> values;
    OriginModel origin_model;
    TailModel tail_model;

    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
    int size() const { return static_cast<int>(values.size()); }

    /// Max value over nodes (profile scale).
    double sup() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, v);
        return m;
    }

    /// Model-extended evaluation at arbitrary radius (log-linear between nodes).
    double eval(double r) const;

    static RadialFunction sample(GridPtr g, const std::function<double(double)>& fn,
                                 OriginModel origin, TailModel tail) {
        RadialFunction f;
        f.grid = std::move(g);
        f.values.resize(f.grid->n);
        for (int i = 0; i < f.grid->n; ++i) f.values[i] = fn(f.grid->r(i));
        f.origin_model = origin;
        f.tail_model = tail;
        return f;
    }

    static RadialFunction zero(GridPtr g) {
        RadialFunction f;
        f.grid = std::move(g);
        f.values.assign(f.grid->n, 0.0);
        f.origin_model = {0.0, 0.0};
        f.tail_model = TailModel::zero();
        return f;
    }
};

struct PowerLawFit {
    double exponent = 0.0;  ///< slope of log f against log r
    double prefactor = 0.0; ///< exp(intercept): f ~ prefactor * r^{exponent}
    double residual = 0.0;  ///< RMS log-misfit
    int nodes_used = 0;
};

/// Least-squares line fit of log f against log r over the window [lo, hi].
/// Requires at least 8 in-window nodes, all strictly positive.
inline PowerLawFit fit_power_law(const RadialFunction& f, double lo, double hi) {
    const RadialGrid& g = *f.grid;
    std::vector<double> xs, ys;
    for (int i = 0; i < g.n; ++i) {
        const double r = g.r(i);
        if (r < lo || r > hi) continue;
        if (!(f[i] > 0.0))
            throw FitError("fit_power_law: nonpositive sample at r=" + std::to_string(r));
        xs.push_back(std::log(r));
        ys.push_back(std::log(f[i]));
    }
    if (xs.size() < 8)
        throw FitError("fit_power_law: fewer than 8 nodes in window [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
    const size_t m = xs.size();
    double sx = 0, sy = 0;
    for (size_t i = 0; i < m; ++i) { sx += xs[i]; sy += ys[i]; }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    fit.prefactor = std::exp(my - fit.exponent * mx);
    double ss = 0;
    for (size_t i = 0; i < m; ++i) {
        const double e = ys[i] - (my + fit.exponent * (xs[i] - mx));
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / m);
    fit.nodes_used = static_cast<int>(m);
    return fit;
}

namespace detail {
/// Number of endpoint nodes used when fitting origin/tail models.
constexpr int kModelFitNodes = 16;
/// Fitted tail steeper than this fraction of r_max is treated as exponential.
constexpr double kExpSlopeFraction = 0.25;
constexpr double kTinyValue = 1e-290;
}  // namespace detail

/// Fit the origin model from the first nodes of the profile.
inline OriginModel fit_origin_model(const RadialFunction& f) {
    const RadialGrid& g = *f.grid;
    const int m = std::min(detail::kModelFitNodes, g.n);
    bool positive = true;
    for (int i = 0; i < m; ++i) positive = positive && f[i] > detail::kTinyValue;
    if (!positive) return {0.0, 0.0};
    const PowerLawFit fit = fit_power_law(f, g.r_min * 0.999, g.r(m - 1) * 1.001);
    return {fit.prefactor, fit.exponent};
}

/// Fit the tail model from the last nodes; very steep fits classify as
/// exponential-like, underflowed tails as zero.
inline TailModel fit_tail_model(const RadialFunction& f) {
    const RadialGrid& g = *f.grid;
    const int m = std::min(detail::kModelFitNodes, g.n);
    bool positive = true;
    for (int i = g.n - m; i < g.n; ++i) positive = positive && f[i] > detail::kTinyValue;
    if (!positive) return TailModel::zero();
    const PowerLawFit fit = fit_power_law(f, g.r(g.n - m) * 0.999, g.r_max * 1.001);
    const double sigma = -fit.exponent;
    if (sigma > detail::kExpSlopeFraction * g.r_max) return TailModel::exponential_like();
    // Anchor the coefficient at r_max for continuity.
    return TailModel::power_law(f[g.n - 1] * std::pow(g.r_max, sigma), sigma);
}

inline void fit_endpoint_models(RadialFunction& f) {
    f.origin_model = fit_origin_model(f);
    f.tail_model = fit_tail_model(f);
}

inline double RadialFunction::eval(double r) const {
    const RadialGrid& g = *grid;
    if (r < g.r_min) {
        return origin_model.coefficient * std::pow(r, origin_model.exponent);
    }
    if (r > g.r_max) {
        switch (tail_model.kind) {
            case TailModel::Kind::PowerLaw:
                return tail_model.coefficient * std::pow(r, -tail_model.exponent);
            default: return 0.0;
        }
    }
    const double t = std::log(r / g.r_min) / g.log_step;
    const int i = std::min(static_cast<int>(t), g.n - 2);
    const double frac = t - i;
    const double a = values[i], b = values[i + 1];
    if (a > 0.0 && b > 0.0) return a * std::pow(b / a, frac); // log-linear
    return a + (b - a) * frac;
}

/// omega_{N-1} int_0^inf f r^{N-1} dr: panel quadrature on [r_min, r_max] plus
/// closed-form endpoint-model contributions. Throws DivergentIntegralError when
/// an endpoint model is not integrable.
inline double integrate(const RadialFunction& f) {
    const RadialGrid& g = *f.grid;
    const int N = g.dimension;
    const double s0 = f.origin_model.exponent;
    if (f.origin_model.coefficient != 0.0 && s0 <= -static_cast<double>(N))
        throw DivergentIntegralError(
            "integrate: origin model exponent " + std::to_string(s0) + " <= -N", s0, true);
    if (f.tail_model.kind == TailModel::Kind::PowerLaw &&
        f.tail_model.exponent <= static_cast<double>(N))
        throw DivergentIntegralError("integrate: tail decay exponent " +
                                         std::to_string(f.tail_model.exponent) + " <= N",
                                     f.tail_model.exponent, false);

    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) acc += g.weights[i] * f[i];
    if (f.origin_model.coefficient != 0.0)
        acc += g.omega * f.origin_model.coefficient * std::pow(g.r_min, s0 + N) / (s0 + N);
    if (f.tail_model.kind == TailModel::Kind::PowerLaw)
        acc += g.omega * f.tail_model.coefficient * std::pow(g.r_max, N - f.tail_model.exponent) /
               (f.tail_model.exponent - N);
    return acc;
}

/// Nodewise power f^e with endpoint models transformed exactly
/// (exponents multiply, coefficients power).
inline RadialFunction pow(const RadialFunction& f, double e) {
    RadialFunction out;
    out.grid = f.grid;
    out.values.resize(f.values.size());
    for (size_t i = 0; i < f.values.size(); ++i) out.values[i] = std::pow(f.values[i], e);
    out.origin_model = {std::pow(f.origin_model.coefficient, e), f.origin_model.exponent * e};
    switch (f.tail_model.kind) {
        case TailModel::Kind::PowerLaw:
            out.tail_model = TailModel::power_law(std::pow(f.tail_model.coefficient, e),
                                                  f.tail_model.exponent * e);
            break;
        case TailModel::Kind::ExponentialLike:
            out.tail_model = TailModel::exponential_like();
            break;
        case TailModel::Kind::Zero: out.tail_model = TailModel::zero(); break;
    }
    return out;
}

/// Nodewise product; origin exponents add, tails combine by decay dominance.
inline RadialFunction multiply(const RadialFunction& f, const RadialFunction& g) {
    RadialFunction out;
    out.grid = f.grid;
    out.values.resize(f.values.size());
    for (size_t i = 0; i < f.values.size(); ++i) out.values[i] = f.values[i] * g.values[i];
    out.origin_model = {f.origin_model.coefficient * g.origin_model.coefficient,
                        f.origin_model.exponent + g.origin_model.exponent};
    using K = TailModel::Kind;
    if (f.tail_model.kind == K::Zero || g.tail_model.kind == K::Zero)
        out.tail_model = TailModel::zero();
    else if (f.tail_model.kind == K::ExponentialLike || g.tail_model.kind == K::ExponentialLike)
        out.tail_model = TailModel::exponential_like();
    else
        out.tail_model = TailModel::power_law(f.tail_model.coefficient * g.tail_model.coefficient,
                                              f.tail_model.exponent + g.tail_model.exponent);
    return out;
}

/// a*f + b*g for nonnegative combinations. Models combine exactly when the
/// exponents agree; otherwise the more slowly decaying (dominant) term wins.
inline RadialFunction linear_combination(double a, const RadialFunction& f, double b,
                                         const RadialFunction& g) {
    RadialFunction out;
    out.grid = f.grid;
    out.values.resize(f.values.size());
    for (size_t i = 0; i < f.values.size(); ++i)
        out.values[i] = a * f.values[i] + b * g.values[i];

    const OriginModel of = {a * f.origin_model.coefficient, f.origin_model.exponent};
    const OriginModel og = {b * g.origin_model.coefficient, g.origin_model.exponent};
    if (of.coefficient == 0.0)
        out.origin_model = og;
    else if (og.coefficient == 0.0)
        out.origin_model = of;
    else if (of.exponent == og.exponent)
        out.origin_model = {of.coefficient + og.coefficient, of.exponent};
    else
        out.origin_model = (of.exponent < og.exponent) ? of : og;

    auto scaled = [](double c, const TailModel& t) {
        TailModel s = t;
        s.coefficient *= c;
        return s;
    };
    const TailModel tf = scaled(a, f.tail_model), tg = scaled(b, g.tail_model);
    using K = TailModel::Kind;
    if (tf.kind != K::PowerLaw)
        out.tail_model = (tg.kind == K::PowerLaw) ? tg : (tf.kind == K::ExponentialLike ? tf : tg);
    else if (tg.kind != K::PowerLaw)
        out.tail_model = tf;
    else if (tf.exponent == tg.exponent)
        out.tail_model = TailModel::power_law(tf.coefficient + tg.coefficient, tf.exponent);
    else
        out.tail_model = (tf.exponent < tg.exponent) ? tf : tg;
    return out;
}

}  // namespace choquard
