// Acceptance suite: end-to-end checks of the numerical laboratory, one
// pass/fail line per criterion, each with its runtime budget. Exits nonzero if
// any criterion fails. The phase-diagram criterion shells out to the CLI
// binary; pass its path as argv[1] or set CHOQUARD_CLI.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "choquard/analysis.hpp"
#include "choquard/exponents.hpp"
#include "choquard/green.hpp"
#include "choquard/grid.hpp"
#include "choquard/riesz.hpp"
#include "choquard/solver.hpp"

using namespace choquard;

namespace {

constexpr double kPi = std::numbers::pi;

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    double budget = 0.0;
    std::string detail;
};

std::vector<CriterionResult> g_results;

class Check {
public:
    Check(int id, std::string name, double budget)
        : id_(id), name_(std::move(name)), budget_(budget),
          start_(std::chrono::steady_clock::now()) {}

    void require(bool ok, const std::string& what) {
        if (!ok) {
            failed_ = true;
            if (!detail_.empty()) detail_ += "; ";
            detail_ += "FAILED: " + what;
        }
    }
    void note(const std::string& s) {
        if (!detail_.empty()) detail_ += "; ";
        detail_ += s;
    }
    void finish() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const bool in_budget = secs < budget_;
        if (!in_budget) {
            failed_ = true;
            detail_ += "; FAILED: runtime budget exceeded";
        }
        g_results.push_back({id_, name_, !failed_, secs, budget_, detail_});
        std::printf("[%d] %-28s %s  (%.2f s / %.0f s)%s%s\n", id_, name_.c_str(),
                    failed_ ? "FAIL" : "PASS", secs, budget_, detail_.empty() ? "" : "  ",
                    detail_.c_str());
        std::fflush(stdout);
    }

private:
    int id_;
    std::string name_;
    double budget_;
    std::chrono::steady_clock::time_point start_;
    bool failed_ = false;
    std::string detail_;
};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Classifier agrees with a literal re-evaluation of the inequalities.

void criterion_classifier() {
    Check c(1, "classifier-oracle", 1.0);
    std::mt19937_64 rng(987654321);
    static const int dims[] = {3, 4, 5, 10};
    int tried = 0, mismatched = 0;
    while (tried < 10000) {
        ProblemParams pp;
        pp.N = dims[std::uniform_int_distribution<int>(0, 3)(rng)];
        pp.alpha = std::uniform_real_distribution<double>(0.05, pp.N - 0.05)(rng);
        pp.p = std::uniform_real_distribution<double>(0.05, 4.0)(rng);
        pp.q = std::uniform_real_distribution<double>(0.02, 0.98)(rng);
        const RegionVerdict v = classify(pp);
        if (v.margins.smallest_abs() <= 1e-9) continue;
        ++tried;
        const double N = pp.N, a = pp.alpha, p = pp.p, q = pp.q;
        Region want;
        if ((1.0 - a / N) * p + q < 1.0 && p + q < 1.0 + a / (N - 2.0))
            want = Region::Nonexistence;
        else if (p + q >= (N + a) / (N - 2.0) || p >= N / (N - 2.0))
            want = Region::RemovableOnly;
        else
            want = Region::ExistenceWithDirac;
        if (v.verdict != want) ++mismatched;
    }
    c.require(mismatched == 0, std::to_string(mismatched) + " mismatches");
    c.note("10000 samples");
    c.finish();
}

// ---------------------------------------------------------------------------
// 2. Tau bootstrap: pinned sequence, divergence criterion, closed form.

void criterion_tau() {
    Check c(2, "tau-bootstrap", 1.0);
    const TauSequence s = tau_sequence({10, 0.5, 0.05, 0.9, 0.0});
    const double want[] = {-95.0, -42.5, -16.25, -3.125};
    c.require(s.taus.size() == 4, "expected 4 taus");
    for (size_t j = 0; j < s.taus.size() && j < 4; ++j)
        c.require(std::abs(s.taus[j] - want[j]) < 1e-12, "tau_" + std::to_string(j));
    c.require(s.j0 == 3, "j0 = 3");
    const double lhs = 0.5 + s.taus.back() * 0.05;
    c.require(std::abs(lhs - 0.34375) < 1e-12 && lhs >= 0.0, "divergence criterion 0.34375");

    std::mt19937_64 rng(24601);
    static const int dims[] = {3, 4, 5, 10};
    bool cf_ok = true;
    for (int t = 0; t < 1000; ++t) {
        ProblemParams pp;
        pp.N = dims[std::uniform_int_distribution<int>(0, 3)(rng)];
        pp.alpha = std::uniform_real_distribution<double>(0.05, pp.N - 0.05)(rng);
        pp.p = std::uniform_real_distribution<double>(0.05, 4.0)(rng);
        pp.q = std::uniform_real_distribution<double>(0.02, 0.98)(rng);
        const TauSequence seq = tau_sequence(pp, 50);
        const double rho = pp.p / (1.0 - pp.q);
        const double t1 = pp.alpha / (1.0 - pp.q) + rho * seq.tau0;
        for (size_t j = 0; j < seq.taus.size(); ++j) {
            const double closed =
                (std::abs(rho - 1.0) < 1e-14)
                    ? seq.tau0 + static_cast<double>(j) * (t1 - seq.tau0)
                    : seq.tau0 +
                          (t1 - seq.tau0) * (1.0 - std::pow(rho, static_cast<double>(j))) /
                              (1.0 - rho);
            if (std::abs(seq.taus[j] - closed) > 1e-10 * (1.0 + std::abs(closed)))
                cf_ok = false;
        }
    }
    c.require(cf_ok, "closed form matches recursion to 1e-10 on 1000 instances");
    c.finish();
}

// ---------------------------------------------------------------------------
// 3. Green operator: identity image, Gamma_0 closed form, c_3 fit.

void criterion_green() {
    Check c(3, "green-operator", 5.0);
    auto g = make_grid_ptr(1e-4, 1e2, 2048, 3);
    const RadialFunction one = RadialFunction::sample(
        g, [](double) { return 1.0; }, {1.0, 0.0}, TailModel::power_law(1.0, 0.0));
    const RadialFunction u = green_apply(one);
    double worst = 0.0;
    for (int i = 0; i < g->n; ++i) {
        const double r = g->r(i);
        if (r < 10 * g->r_min || r > g->r_max / 10) continue;
        worst = std::max(worst, std::abs(u[i] - 1.0));
    }
    c.require(worst < 1e-6, "G[1] = 1 within 1e-6 (got " + fmt(worst) + ")");

    const FundamentalSolution fs = fundamental_solution(3, g);
    double worst_rel = 0.0;
    for (int i = 0; i < g->n; ++i) {
        const double r = g->r(i);
        if (r < 10 * g->r_min || r > g->r_max / 10) continue;
        const double exact = std::exp(-r) / (4.0 * kPi * r);
        worst_rel = std::max(worst_rel, std::abs(fs.profile[i] / exact - 1.0));
    }
    c.require(worst_rel < 1e-6, "Gamma_0 vs e^{-r}/(4 pi r) (got " + fmt(worst_rel) + ")");
    const double cerr = std::abs(fs.c_N_fitted / (1.0 / (4.0 * kPi)) - 1.0);
    c.require(cerr < 5e-3, "c_3 within 0.5% (got " + fmt(cerr) + ")");
    c.finish();
}

// ---------------------------------------------------------------------------
// 4. Riesz potential: origin value, far field, error slope, scaling.

void criterion_riesz() {
    Check c(4, "riesz-potential", 60.0);
    auto g = make_grid_ptr(1e-4, 1e2, 2047, 3); // nodes at 1 and 10
    const AngularKernel K = build_kernel(3, 1.0, g);

    const int j1 = g->nearest_index(1.0);
    RadialFunction ind = RadialFunction::sample(
        g, [](double r) { return r < 0.9999 ? 1.0 : 0.0; }, {1.0, 0.0}, TailModel::zero());
    ind.values[static_cast<size_t>(j1)] = 0.5;
    const double I0 = riesz_at_origin(ind, 1.0);
    c.require(std::abs(I0 / (4.0 * kPi) - 1.0) < 1e-3,
              "I(0) = 4 pi within 0.1% (got rel " + fmt(I0 / (4.0 * kPi) - 1.0) + ")");

    const RadialFunction I = riesz_apply(ind, K);
    const int j10 = g->nearest_index(10.0);
    const double far = (4.0 * kPi / 3.0) * 1e-2;
    c.require(std::abs(I[j10] / far - 1.0) < 1e-2,
              "far field at r=10 within 1% (got rel " + fmt(I[j10] / far - 1.0) + ")");

    auto f = RadialFunction::sample(
        g, [](double r) { return std::pow(1.0 + r, -5.0); }, {1.0, 0.0}, TailModel::zero());
    fit_endpoint_models(f);
    const RieszReport rep = asymptotic_check(f, 5.0, K);
    c.require(rep.fitted_error_slope <= -(3.0 - 1.0 + 2.0 / 3.0) + 0.1,
              "error slope " + fmt(rep.fitted_error_slope) + " <= " +
                  fmt(-(3.0 - 1.0 + 2.0 / 3.0) + 0.1));

    const int m = 114;
    const double lam = std::exp(m * g->log_step);
    auto fl = RadialFunction::sample(
        g, [&](double r) { return std::pow(1.0 + r / lam, -5.0); }, {1.0, 0.0},
        TailModel::zero());
    fit_endpoint_models(fl);
    const RadialFunction If = riesz_apply(f, K), Ifl = riesz_apply(fl, K);
    double worst = 0.0;
    for (int i = m; i < g->n; ++i) {
        const double r = g->r(i);
        if (r < 1e-3 || r > 50.0) continue;
        worst = std::max(worst, std::abs(Ifl[i] / (std::pow(lam, K.alpha) * If[i - m]) - 1.0));
    }
    c.require(worst < 1e-4, "scaling law within 1e-4 (got " + fmt(worst) + ")");
    c.finish();
}

// ---------------------------------------------------------------------------
// 5. Linear comparison benchmark.

void criterion_linear_comparison() {
    Check c(5, "linear-comparison", 10.0);
    auto g = make_grid_ptr(1e-4, 1e2, 2048, 3);
    const struct { double nu, sigma, mu; } mat[] = {
        {1.0, 2.0, 1.0}, {3.0, 4.0, 1.0}, {1.0, 2.5, 0.5}};
    for (const auto& t : mat) {
        const double lim = linear_comparison_decay(t.mu, t.nu, t.sigma, g);
        const double want = t.nu / t.mu;
        c.require(std::abs(lim / want - 1.0) < 0.02,
                  "nu=" + fmt(t.nu) + " sigma=" + fmt(t.sigma) + " mu=" + fmt(t.mu) + ": " +
                      fmt(lim) + " vs " + fmt(want));
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// 6 & 7. Minimal-solution laws and their grid-refinement stability.

struct Pipeline {
    GridPtr grid;
    AngularKernel kernel;
    FundamentalSolution fs;
    KstarBracket bracket;
    SolveResult solve;
    bool monotone = true, capped = true;
    double residual = 0.0;
    double origin_coef = 0.0, origin_target = 0.0;
    double tail_exponent = 0.0, tail_prefactor = 0.0, predicted_prefactor = 0.0;
    double b0 = 0.0;
};

Pipeline run_pipeline(const ProblemParams& pp, int n, std::optional<double> k_fixed,
                      bool run_bisection) {
    Pipeline pl;
    pl.grid = make_grid_ptr(1e-4, 1e2, n, pp.N);
    pl.kernel = build_kernel(pp.N, pp.alpha, pl.grid);
    pl.fs = fundamental_solution(pp.N, pl.grid);
    SolveOptions opts; // tol 1e-8, max_iter 500
    if (run_bisection) pl.bracket = estimate_kstar(pp, pl.grid, pl.kernel, pl.fs, opts);
    const double k = k_fixed ? *k_fixed : pl.bracket.k_lo;
    pl.solve = iterate(pp, k, pl.grid, pl.kernel, pl.fs, opts);
    if (pl.solve.verdict != SolveVerdict::Converged) return pl;
    for (const auto& d : pl.solve.diagnostics) {
        pl.monotone = pl.monotone && d.monotone_ok;
        pl.capped = pl.capped && d.capped_ok;
    }
    pl.capped = pl.capped && pl.solve.cap_available;
    pl.residual = fixed_point_residual(pl.solve.u, pp, k, pl.kernel, pl.fs,
                                       predicted_decay(pp).exponent);
    ProblemParams with_k = pp;
    with_k.k = k;
    const OriginFit of = verify_origin(pl.solve.u, with_k, pl.fs.c_N);
    pl.origin_coef = of.coefficient;
    pl.origin_target = of.target;
    const DecayFit df = verify_decay(pl.solve.u, with_k);
    pl.tail_exponent = df.fitted_exponent;
    pl.tail_prefactor = df.fitted_prefactor;
    pl.predicted_prefactor = df.predicted_prefactor;
    pl.b0 = lower_bound_check(pl.solve.u, with_k);
    return pl;
}

void criterion_minimal_solution(Pipeline& saved) {
    Check c(6, "minimal-solution-laws", 180.0);
    const ProblemParams pp{3, 2.0, 2.0, 0.5, 0.0};
    saved = run_pipeline(pp, 2048, std::nullopt, true);
    c.note("k_lo = " + fmt(saved.bracket.k_lo) + " (" + std::to_string(saved.bracket.probes) +
           " probes)");
    c.require(saved.solve.verdict == SolveVerdict::Converged, "converged at k_lo");
    if (saved.solve.verdict == SolveVerdict::Converged) {
        c.require(saved.monotone, "iterates monotone nondecreasing");
        c.require(saved.capped, "iterates below the supersolution profile");
        c.require(saved.residual < 10.0 * 1e-8,
                  "fixed-point residual " + fmt(saved.residual) + " < 1e-7");
        const double oerr = std::abs(saved.origin_coef / saved.origin_target - 1.0);
        c.require(oerr < 0.02, "origin law within 2% (got " + fmt(oerr) + ")");
        const double eerr = std::abs(saved.tail_exponent / 2.0 - 1.0);
        c.require(eerr < 0.05, "tail exponent 2 within 5% (got rel " + fmt(eerr) + ")");
        const double perr = std::abs(saved.tail_prefactor / saved.predicted_prefactor - 1.0);
        c.require(perr < 0.10, "tail prefactor within 10% of the L1-mass power (got " +
                                   fmt(perr) + ")");
        c.require(saved.b0 > 0.0, "lower-bound certificate positive");
    }
    c.finish();
}

void criterion_grid_refinement(const Pipeline& coarse) {
    Check c(7, "grid-refinement", 600.0);
    const ProblemParams pp{3, 2.0, 2.0, 0.5, 0.0};
    if (coarse.solve.verdict != SolveVerdict::Converged) {
        c.require(false, "criterion 6 pipeline unavailable");
        c.finish();
        return;
    }
    // Profile quantities are compared at a common safely-convergent mass
    // (k_lo itself moves with the grid).
    const double k_common = 0.5 * coarse.bracket.k_lo;
    Pipeline base = run_pipeline(pp, 2048, k_common, false);
    Pipeline fine = run_pipeline(pp, 4096, k_common, true);
    c.require(base.solve.verdict == SolveVerdict::Converged, "base converged");
    c.require(fine.solve.verdict == SolveVerdict::Converged, "refined converged");
    if (base.solve.verdict == SolveVerdict::Converged &&
        fine.solve.verdict == SolveVerdict::Converged) {
        auto rel = [](double a, double b) { return std::abs(a / b - 1.0); };
        c.require(rel(fine.origin_coef, base.origin_coef) < 0.01,
                  "origin coefficient drift " + fmt(rel(fine.origin_coef, base.origin_coef)));
        c.require(rel(fine.tail_exponent, base.tail_exponent) < 0.01,
                  "tail exponent drift " + fmt(rel(fine.tail_exponent, base.tail_exponent)));
        c.require(rel(fine.tail_prefactor, base.tail_prefactor) < 0.01,
                  "tail prefactor drift " + fmt(rel(fine.tail_prefactor, base.tail_prefactor)));
        c.require(rel(fine.b0, base.b0) < 0.01, "b0 drift " + fmt(rel(fine.b0, base.b0)));
        const double bracket_move = fine.bracket.k_lo / coarse.bracket.k_lo;
        c.require(bracket_move < 2.0 && bracket_move > 0.5,
                  "k_lo bracket factor " + fmt(bracket_move));
        c.note("k_lo(2048) = " + fmt(coarse.bracket.k_lo) +
               ", k_lo(4096) = " + fmt(fine.bracket.k_lo));
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// 8. Nonexistence probes.

void criterion_nonexistence() {
    Check c(8, "nonexistence-probe", 60.0);
    {
        const ProblemParams pp{3, 1.0, 0.2, 0.5, 0.0};
        auto g = make_grid_ptr(1e-4, 1e2, 2048, 3);
        const AngularKernel K = build_kernel(3, 1.0, g);
        const FundamentalSolution fs = fundamental_solution(3, g);
        SolveOptions opts;
        opts.max_iter = 120;
        const NonexistenceReport rep = nonexistence_probe(pp, g, K, fs, 1.0, opts);
        c.require(rep.criterion_holds && std::abs(rep.divergence_lhs - 0.2) < 1e-12,
                  "N=3 divergence criterion (lhs " + fmt(rep.divergence_lhs) + ")");
        c.require(rep.defensive_verdict != SolveVerdict::Converged,
                  std::string("N=3 defensive run ends ") + verdict_name(rep.defensive_verdict));
    }
    {
        const ProblemParams pp{10, 0.5, 0.05, 0.9, 0.0};
        auto g = make_grid_ptr(1e-4, 1e2, 2048, 10);
        const AngularKernel K = build_kernel(10, 0.5, g);
        const FundamentalSolution fs = fundamental_solution(10, g);
        SolveOptions opts;
        opts.max_iter = 120;
        const NonexistenceReport rep = nonexistence_probe(pp, g, K, fs, 1.0, opts);
        c.require(rep.criterion_holds && std::abs(rep.divergence_lhs - 0.34375) < 1e-12,
                  "N=10 divergence criterion (lhs " + fmt(rep.divergence_lhs) + ")");
        c.require(rep.defensive_verdict != SolveVerdict::Converged,
                  std::string("N=10 defensive run ends ") + verdict_name(rep.defensive_verdict));
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// 9. Phase-diagram CSVs from the CLI match the inequality definitions.

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_phase_diagram(const char* cli_path) {
    Check c(9, "phase-diagram", 5.0);
    if (cli_path == nullptr || cli_path[0] == '\0') {
        c.require(false, "CLI path not provided (argv[1] or CHOQUARD_CLI)");
        c.finish();
        return;
    }
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "choquard_acceptance";
    fs::create_directories(dir);

    auto run_pd = [&](double alpha, const fs::path& out) {
        std::ostringstream cmd;
        cmd << '"' << cli_path << '"' << " phase-diagram 3 " << alpha
            << " --res-p 200 --res-q 100 -o " << out << " >/dev/null 2>&1";
        return std::system(cmd.str().c_str()) == 0;
    };

    for (double alpha : {1.0, 2.0}) {
        const fs::path out1 = dir / ("pd_a" + fmt(alpha) + "_1.csv");
        const fs::path out2 = dir / ("pd_a" + fmt(alpha) + "_2.csv");
        if (!run_pd(alpha, out1) || !run_pd(alpha, out2)) {
            c.require(false, "CLI invocation failed");
            continue;
        }
        const std::string bytes1 = read_file(out1), bytes2 = read_file(out2);
        c.require(!bytes1.empty() && bytes1 == bytes2,
                  "rerun bit-exact for alpha=" + fmt(alpha));

        std::istringstream in(bytes1);
        std::string line;
        std::getline(in, line); // header
        int rows = 0, bad = 0;
        while (std::getline(in, line)) {
            ++rows;
            std::istringstream ls(line);
            std::string tok;
            std::getline(ls, tok, ',');
            const double p = std::strtod(tok.c_str(), nullptr);
            std::getline(ls, tok, ',');
            const double q = std::strtod(tok.c_str(), nullptr);
            std::getline(ls, tok, ',');
            const std::string verdict = tok;
            const double N = 3.0;
            std::string want;
            if ((1.0 - alpha / N) * p + q < 1.0 && p + q < 1.0 + alpha / (N - 2.0))
                want = "Nonexistence";
            else if (p + q >= (N + alpha) / (N - 2.0) || p >= N / (N - 2.0))
                want = "RemovableOnly";
            else
                want = "ExistenceWithDirac";
            if (verdict != want) ++bad;
        }
        c.require(rows == 20000, "20000 rows for alpha=" + fmt(alpha));
        c.require(bad == 0, std::to_string(bad) + " rows disagree with the inequalities");
    }
    c.finish();
}

}  // namespace

int main(int argc, char** argv) {
    const char* cli = argc > 1 ? argv[1] : std::getenv("CHOQUARD_CLI");
    std::printf("acceptance suite: sublinear Choquard laboratory\n");

    criterion_classifier();
    criterion_tau();
    criterion_green();
    criterion_riesz();
    criterion_linear_comparison();
    Pipeline saved;
    criterion_minimal_solution(saved);
    criterion_grid_refinement(saved);
    criterion_nonexistence();
    criterion_phase_diagram(cli);

    int failures = 0;
    for (const auto& r : g_results)
        if (!r.pass) ++failures;
    std::printf("%zu/%zu criteria passed\n", g_results.size() - failures, g_results.size());
    return failures == 0 ? 0 : 1;
}
