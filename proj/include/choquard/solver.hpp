#pragma once

// Constructive core: the supersolution w_k = k [phi + a0 varphi], the monotone
// iteration v_n = G[I_alpha[v_{n-1}^p] v_{n-1}^q] + k Gamma_0 for the minimal
// singular solution u_k, the bisection bracket for the threshold mass k*, and
// the nonexistence bootstrap probe.
//
// One solve is sequential; independent solves share only the immutable grid
// and kernel tables and may run concurrently.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "choquard/errors.hpp"
#include "choquard/exponents.hpp"
#include "choquard/green.hpp"
#include "choquard/grid.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

class SupersolutionFailure : public NumericalError {
public:
    enum class Kind { LadderExhausted, KTooLarge };
    SupersolutionFailure(const std::string& msg, Kind kind, double worst, double at_r)
        : NumericalError(msg), kind(kind), worst_violation(worst), at_radius(at_r) {}
    Kind kind;
    double worst_violation;
    double at_radius;
};

namespace detail {

/// phi(r) = (r^{2-N} + r^tau) e^{-r^2/(2N)}
inline double super_phi(int N, double tau, double r) {
    return (std::pow(r, 2.0 - N) + std::pow(r, tau)) * std::exp(-r * r / (2.0 * N));
}

/// Radial Laplacian of phi, in closed form.
inline double super_lap_phi(int N, double tau, double r) {
    const double e = std::exp(-r * r / (2.0 * N));
    const double tau_part = tau * (tau + N - 2.0) * std::pow(r, tau - 2.0) -
                            ((N + 2.0 * tau) / N) * std::pow(r, tau) +
                            std::pow(r, tau + 2.0) / (static_cast<double>(N) * N);
    const double sing_part = ((N - 4.0) / N) * std::pow(r, 2.0 - N) +
                             std::pow(r, 4.0 - N) / (static_cast<double>(N) * N);
    return e * (tau_part + sing_part);
}

/// varphi(r) = (r0 + r)^{tau0}
inline double super_varphi(double tau0v, double r0, double r) {
    return std::pow(r0 + r, tau0v);
}

inline double super_lap_varphi(int N, double tau0v, double r0, double r) {
    return tau0v * (tau0v - 1.0) * std::pow(r0 + r, tau0v - 2.0) +
           tau0v * (N - 1.0) / r * std::pow(r0 + r, tau0v - 1.0);
}

}  // namespace detail

/// Validated supersolution profile w_k = k [phi + a0 varphi].
struct SupersolutionProfile {
    double tau = 0.0; ///< midpoint of (2-N, min{0, 2+alpha-(N-2)(p+q)})
    double r0 = 0.0;  ///< 2 sqrt(tau0 (tau0 - 1))
    double a0 = 0.0;
    double k = 0.0;
    RadialFunction profile;
    double worst_slack = 0.0; ///< min over interior nodes of (-Dw + w - I[w^p]w^q)/w
};

/// Constructs w_k = k [phi + a0 varphi]. The blending weight a0 is searched
/// over the ladder 2^{-10}..2^{10} until the differential inequality
/// lap(phi) + a0 lap(varphi) <= (phi + a0 varphi)/2 holds at every node
/// (closed-form Laplacians; a0 does not depend on k). No Riesz validation here:
/// the profile also serves as the iteration cap beyond the certified k range.
inline SupersolutionProfile build_supersolution_profile(const ProblemParams& pp, double k,
                                                        GridPtr grid) {
    const RegionVerdict rv = classify(pp);
    if (rv.verdict != Region::ExistenceWithDirac)
        throw RegionError(std::string("build_supersolution: region is ") +
                          region_name(rv.verdict));
    if (!(k > 0.0)) throw ParameterError("build_supersolution: need k > 0");

    const int N = pp.N;
    const double tau_hi = std::min(0.0, 2.0 + pp.alpha - (N - 2.0) * (pp.p + pp.q));
    const double tau = 0.5 * ((2.0 - N) + tau_hi);
    const double t0 = tau0(pp);
    const double r0 = 2.0 * std::sqrt(t0 * (t0 - 1.0));

    const RadialGrid& g = *grid;
    double a0 = 0.0;
    double worst = 0.0, worst_r = 0.0;
    for (int j = 0; j <= 20 && a0 == 0.0; ++j) {
        const double a = std::ldexp(1.0, j - 10); // 2^{j-10}
        bool ok = true;
        worst = 0.0;
        for (int i = 0; i < g.n; ++i) {
            const double r = g.r(i);
            const double lhs = detail::super_lap_phi(N, tau, r) +
                               a * detail::super_lap_varphi(N, t0, r0, r);
            const double rhs = 0.5 * (detail::super_phi(N, tau, r) +
                                      a * detail::super_varphi(t0, r0, r));
            if (lhs > rhs * (1.0 + 1e-12)) {
                ok = false;
                if (lhs - rhs > worst) { worst = lhs - rhs; worst_r = r; }
            }
        }
        if (ok) a0 = a;
    }
    if (a0 == 0.0)
        throw SupersolutionFailure(
            "build_supersolution: a0 ladder exhausted; inequality (phi'' + a0 varphi'' <= "
            "(phi + a0 varphi)/2) fails worst at r = " + std::to_string(worst_r),
            SupersolutionFailure::Kind::LadderExhausted, worst, worst_r);

    SupersolutionProfile sp;
    sp.tau = tau;
    sp.r0 = r0;
    sp.a0 = a0;
    sp.k = k;
    sp.profile = RadialFunction::sample(
        grid,
        [&](double r) {
            return k * (detail::super_phi(N, tau, r) + a0 * detail::super_varphi(t0, r0, r));
        },
        {}, TailModel::zero());
    fit_endpoint_models(sp.profile);
    return sp;
}

/// Builds w_k and numerically validates the supersolution property
/// -D w + w - I_alpha[w^p] w^q >= -tol_super * w at every interior node
/// (the relative slack absorbs discretization error). Failure at the given k
/// is the k-too-large signal.
inline SupersolutionProfile build_supersolution(const ProblemParams& pp, double k, GridPtr grid,
                                                const AngularKernel& kernel,
                                                double tol_super = 1e-3) {
    SupersolutionProfile sp = build_supersolution_profile(pp, k, std::move(grid));
    const RadialGrid& g = *sp.profile.grid;

    const RadialFunction wp = pow(sp.profile, pp.p);
    const RadialFunction R = riesz_apply(wp, kernel);
    const std::vector<double> Lw = apply_radial_operator(sp.profile);
    double min_slack = std::numeric_limits<double>::infinity();
    double min_r = 0.0;
    for (int i = 1; i < g.n - 1; ++i) {
        const double res = Lw[i] - R[i] * std::pow(sp.profile[i], pp.q);
        const double slack = res / sp.profile[i];
        if (slack < min_slack) { min_slack = slack; min_r = g.r(i); }
    }
    sp.worst_slack = min_slack;
    if (min_slack < -tol_super)
        throw SupersolutionFailure(
            "build_supersolution: supersolution check fails at k = " + std::to_string(k) +
                " (worst relative deficit " + std::to_string(min_slack) + " at r = " +
                std::to_string(min_r) + "); k too large",
            SupersolutionFailure::Kind::KTooLarge, min_slack, min_r);
    return sp;
}

enum class SolveVerdict { Converged, DivergedRiesz, MaxIterations };

inline const char* verdict_name(SolveVerdict v) {
    switch (v) {
        case SolveVerdict::Converged: return "Converged";
        case SolveVerdict::DivergedRiesz: return "DivergedRiesz";
        case SolveVerdict::MaxIterations: return "MaxIterations";
    }
    return "?";
}

struct IterationRecord {
    int n = 0;
    double delta_sup = 0.0; ///< relative sup-norm of v_n - v_{n-1}
    bool monotone_ok = true;
    bool capped_ok = true; ///< v_n <= w_k (when a supersolution was built)
};

struct SolveResult {
    RadialFunction u;
    int iterations = 0;
    double final_delta = 0.0;
    double k = 0.0;
    SolveVerdict verdict = SolveVerdict::MaxIterations;
    std::vector<IterationRecord> diagnostics;
    std::string divergence_reason;
    bool cap_available = false;
    bool trivial = false; ///< k = 0 run collapsing to u == 0
};

struct SolveOptions {
    double tol = 1e-8;
    int max_iter = 500;
    double stall_ratio = 0.999; ///< delta ratio above this for stall_window steps => stall
    int stall_window = 20;
    double blowup_guard = 1e100;
    bool defensive = false; ///< skip the region precondition (nonexistence probe path)
    bool build_cap = true;
    std::optional<RadialFunction> initial; ///< admissible restart profile (disables the
                                           ///< monotonicity assertion)
};

/// Relative sup-norm of u - (G[I_alpha[u^p] u^q] + k Gamma_0): one extra sweep
/// of the fixed-point map.
inline double fixed_point_residual(const RadialFunction& u, const ProblemParams& pp, double k,
                                   const AngularKernel& kernel, const FundamentalSolution& fs,
                                   std::optional<double> robin_sigma = {}) {
    const RadialFunction R = riesz_apply(pow(u, pp.p), kernel);
    GreenOptions gopts;
    gopts.robin_sigma = robin_sigma;
    const RadialFunction img = green_apply(multiply(R, pow(u, pp.q)), gopts);
    const RadialFunction next = linear_combination(1.0, img, k, fs.profile);
    const double floor =
        u.sup() * std::numeric_limits<double>::epsilon() + std::numeric_limits<double>::min();
    double worst = 0.0;
    for (int i = 0; i < u.size(); ++i)
        worst = std::max(worst, std::abs(next[i] - u[i]) / (floor + u[i]));
    return worst;
}

/// Monotone iteration from v_0 = k Gamma_0. Stops when the relative sup-delta
/// falls below tol (Converged), when the Riesz step certifies divergence or the
/// iterate escapes every polynomial tail bound (DivergedRiesz), or at max_iter
/// / stall (MaxIterations).
inline SolveResult iterate(const ProblemParams& pp, double k, GridPtr grid,
                           const AngularKernel& kernel, const FundamentalSolution& fs,
                           const SolveOptions& opts = {}) {
    pp.validate();
    if (k < 0.0) throw ParameterError("iterate: need k >= 0");
    if (!(opts.tol > 0.0)) throw ParameterError("iterate: need tol > 0");
    std::optional<double> robin_sigma;
    if (!opts.defensive) {
        const RegionVerdict rv = classify(pp);
        if (rv.verdict != Region::ExistenceWithDirac)
            throw RegionError(std::string("iterate: region is ") + region_name(rv.verdict) +
                              ", not ExistenceWithDirac");
        robin_sigma = predicted_decay(pp).exponent;
    }

    SolveResult res;
    res.k = k;

    std::optional<RadialFunction> cap;
    if (opts.build_cap && !opts.defensive && k > 0.0) {
        try {
            cap = build_supersolution_profile(pp, k, grid).profile;
        } catch (const SupersolutionFailure&) {
            // No cap; convergence alone decides the verdict.
        }
    }
    res.cap_available = cap.has_value();

    RadialFunction v = opts.initial ? *opts.initial
                                    : (k > 0.0 ? dirac_profile(k, fs) : RadialFunction::zero(grid));
    const bool check_monotone = !opts.initial.has_value();

    int stall_count = 0;
    double prev_delta = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= opts.max_iter; ++n) {
        RadialFunction v_next;
        try {
            const RadialFunction R = riesz_apply(pow(v, pp.p), kernel);
            GreenOptions gopts;
            gopts.robin_sigma = robin_sigma;
            const RadialFunction img = green_apply(multiply(R, pow(v, pp.q)), gopts);
            v_next = (k > 0.0) ? linear_combination(1.0, img, k, fs.profile) : img;
        } catch (const DivergentRieszError& e) {
            res.verdict = SolveVerdict::DivergedRiesz;
            res.divergence_reason = e.what();
            res.u = v;
            res.iterations = n - 1;
            return res;
        }

        const double scale = v_next.sup();
        if (!std::isfinite(scale) || scale > opts.blowup_guard) {
            res.verdict = SolveVerdict::DivergedRiesz;
            res.divergence_reason = "iterate amplitude escaped every polynomial bound (sup = " +
                                    std::to_string(scale) + ")";
            res.u = v;
            res.iterations = n;
            return res;
        }
        const double floor =
            scale * std::numeric_limits<double>::epsilon() + std::numeric_limits<double>::min();

        IterationRecord rec;
        rec.n = n;
        for (int i = 0; i < v.size(); ++i) {
            rec.delta_sup =
                std::max(rec.delta_sup, std::abs(v_next[i] - v[i]) / (floor + v_next[i]));
            if (v_next[i] < v[i] - 1e-12 * scale) rec.monotone_ok = false;
            if (cap && v_next[i] > (*cap)[i] * (1.0 + 1e-9)) rec.capped_ok = false;
        }
        if (check_monotone && !rec.monotone_ok)
            throw NumericalError(
                "iterate: monotonicity violated beyond slack at step " + std::to_string(n) +
                "; the discrete operators lost their order preservation");
        res.diagnostics.push_back(rec);
        v = std::move(v_next);
        res.iterations = n;
        res.final_delta = rec.delta_sup;

        if (rec.delta_sup < opts.tol) {
            res.verdict = SolveVerdict::Converged;
            break;
        }
        stall_count = (rec.delta_sup > opts.stall_ratio * prev_delta) ? stall_count + 1 : 0;
        prev_delta = rec.delta_sup;
        if (stall_count >= opts.stall_window) {
            res.verdict = SolveVerdict::MaxIterations;
            res.divergence_reason = "stalled (contraction ratio above " +
                                    std::to_string(opts.stall_ratio) + " for " +
                                    std::to_string(opts.stall_window) + " steps)";
            break;
        }
    }
    res.u = std::move(v);
    res.trivial = (k == 0.0 && !opts.initial && res.u.sup() == 0.0);
    return res;
}

/// Bisection bracket for the threshold Dirac mass k*. The bracket is a
/// numerical artifact of the grid and tolerances; it is reported as such.
struct KstarBracket {
    double k_lo = 0.0; ///< largest known-convergent k
    double k_hi = 0.0; ///< smallest known divergent-or-unconverged k
    bool open_above = false;
    int probes = 0;
};

inline KstarBracket estimate_kstar(const ProblemParams& pp, GridPtr grid,
                                   const AngularKernel& kernel, const FundamentalSolution& fs,
                                   const SolveOptions& opts = {}, double k_min = 1e-8,
                                   double k_max = 1e4, double bracket_ratio = 1.5) {
    const RegionVerdict rv = classify(pp);
    if (rv.verdict != Region::ExistenceWithDirac)
        throw RegionError(std::string("estimate_kstar: region is ") + region_name(rv.verdict));

    KstarBracket b;
    auto converged = [&](double k) {
        ++b.probes;
        return iterate(pp, k, grid, kernel, fs, opts).verdict == SolveVerdict::Converged;
    };
    if (!converged(k_min))
        throw NumericalError("estimate_kstar: not convergent at k = " + std::to_string(k_min) +
                             "; solver configuration problem");
    if (converged(k_max)) {
        b.k_lo = k_max;
        b.k_hi = std::numeric_limits<double>::infinity();
        b.open_above = true;
        return b;
    }
    b.k_lo = k_min;
    b.k_hi = k_max;
    while (b.k_hi / b.k_lo > bracket_ratio) {
        const double mid = std::sqrt(b.k_lo * b.k_hi);
        if (converged(mid))
            b.k_lo = mid;
        else
            b.k_hi = mid;
    }
    return b;
}

/// Certificate of the Theorem-1.1 obstruction at a nonexistence-region point:
/// the tau bootstrap crosses -alpha/p and the Riesz integrand loses
/// integrability; a defensive iteration run is reported alongside.
struct NonexistenceReport {
    TauSequence taus;
    double divergence_lhs = 0.0; ///< alpha + tau_{j0} p
    bool criterion_holds = false;
    SolveVerdict defensive_verdict = SolveVerdict::MaxIterations;
    int defensive_iterations = 0;
    std::string defensive_reason;
};

inline NonexistenceReport nonexistence_probe(const ProblemParams& pp, GridPtr grid,
                                             const AngularKernel& kernel,
                                             const FundamentalSolution& fs, double probe_k = 1.0,
                                             SolveOptions opts = {}) {
    const RegionVerdict rv = classify(pp);
    if (rv.verdict != Region::Nonexistence)
        throw RegionError(std::string("nonexistence_probe: region is ") +
                          region_name(rv.verdict) + ", not Nonexistence");

    NonexistenceReport rep;
    rep.taus = tau_sequence(pp);
    if (!rep.taus.j0)
        throw NumericalError("nonexistence_probe: tau sequence did not cross -alpha/p within "
                             "the cap; unexpected in the nonexistence region");
    rep.divergence_lhs = pp.alpha + rep.taus.taus[static_cast<size_t>(*rep.taus.j0)] * pp.p;
    rep.criterion_holds = rep.divergence_lhs >= -1e-12;

    opts.defensive = true;
    opts.build_cap = false;
    const SolveResult run = iterate(pp, probe_k, std::move(grid), kernel, fs, opts);
    rep.defensive_verdict = run.verdict;
    rep.defensive_iterations = run.iterations;
    rep.defensive_reason = run.divergence_reason;
    return rep;
}

}  // namespace choquard
