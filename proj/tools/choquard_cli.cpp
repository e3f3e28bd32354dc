// Command-line front end: region classification, tau sequences, phase
// diagrams, minimal-solution solves, k* bracketing, nonexistence probes and
// the module verification suites. Machine-readable JSON/CSV outputs; reruns
// with identical configuration and seed are byte-identical.
//
// Exit codes: 0 success/Converged, 1 verification failure, 2 invalid
// parameters or region mismatch, 3 I/O failure, 4 DivergedRiesz,
// 5 MaxIterations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "choquard/analysis.hpp"
#include "choquard/exponents.hpp"
#include "choquard/io.hpp"
#include "choquard/solver.hpp"
#include "choquard/verify.hpp"

namespace {

using namespace choquard;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitBadParams = 2;
constexpr int kExitIo = 3;
constexpr int kExitDiverged = 4;
constexpr int kExitMaxIter = 5;

struct RunConfig {
    ProblemParams params;
    double r_min = 1e-4;
    double r_max = 1e2;
    int nodes = 2048;
    double tol = 1e-8;
    int max_iter = 500;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    std::string cache_dir; // empty: CHOQUARD_CACHE_DIR or no caching
};

/// Applies a JSON config file underneath explicitly passed flags. Unknown keys
/// are rejected.
void apply_config_file(const std::string& path, CLI::App* cmd, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParameterError(std::string("config parse error: ") + e.what());
    }
    const std::vector<std::string> known = {"N",   "alpha",    "p",        "q",
                                            "k",   "r_min",    "r_max",    "n",
                                            "tol", "max_iter", "seed",     "output_dir",
                                            "cache_dir"};
    for (const auto& [key, val] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ParameterError("unknown config key: " + key);
    }
    auto fresh = [&](const char* flag) {
        const CLI::Option* o = cmd->get_option_no_throw(flag);
        return o == nullptr || o->count() == 0;
    };
    auto num = [&](const char* key) {
        return j.at(key).is_string()
                   ? std::strtod(j.at(key).get_ref<const std::string&>().c_str(), nullptr)
                   : j.at(key).get<double>();
    };
    if (j.contains("N") && fresh("--N")) cfg.params.N = j.at("N").get<int>();
    if (j.contains("alpha") && fresh("--alpha")) cfg.params.alpha = num("alpha");
    if (j.contains("p") && fresh("--p")) cfg.params.p = num("p");
    if (j.contains("q") && fresh("--q")) cfg.params.q = num("q");
    if (j.contains("k") && fresh("--k")) cfg.params.k = num("k");
    if (j.contains("r_min") && fresh("--r-min")) cfg.r_min = num("r_min");
    if (j.contains("r_max") && fresh("--r-max")) cfg.r_max = num("r_max");
    if (j.contains("n") && fresh("--nodes")) cfg.nodes = j.at("n").get<int>();
    if (j.contains("tol") && fresh("--tol")) cfg.tol = num("tol");
    if (j.contains("max_iter") && fresh("--max-iter")) cfg.max_iter = j.at("max_iter").get<int>();
    if (j.contains("seed") && fresh("--seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir") && fresh("--output-dir"))
        cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("cache_dir") && fresh("--cache-dir"))
        cfg.cache_dir = j.at("cache_dir").get<std::string>();
}

void add_param_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--N", cfg.params.N, "dimension (N >= 3)");
    cmd->add_option("--alpha", cfg.params.alpha, "Riesz order, 0 < alpha < N");
    cmd->add_option("--p", cfg.params.p, "nonlocal exponent, p > 0");
    cmd->add_option("--q", cfg.params.q, "local exponent, 0 < q < 1");
    cmd->add_option("--k", cfg.params.k, "Dirac mass at the origin, k >= 0");
    cmd->add_option("--r-min", cfg.r_min, "grid inner radius")->capture_default_str();
    cmd->add_option("--r-max", cfg.r_max, "grid outer radius")->capture_default_str();
    cmd->add_option("--nodes,-n", cfg.nodes, "grid nodes")->capture_default_str();
    cmd->add_option("--tol", cfg.tol, "iteration stopping tolerance")->capture_default_str();
    cmd->add_option("--max-iter", cfg.max_iter, "iteration cap")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "seed for randomized suites")->capture_default_str();
    cmd->add_option("--output-dir", cfg.output_dir, "directory for reports/profiles")
        ->capture_default_str();
    cmd->add_option("--cache-dir", cfg.cache_dir,
                    "kernel cache directory (default: CHOQUARD_CACHE_DIR)");
}

int cmd_classify(const ProblemParams& pp, double eps_boundary) {
    const RegionVerdict v = classify(pp, eps_boundary);
    std::string line = region_name(v.verdict);
    if (v.verdict == Region::ExistenceWithDirac) {
        const DecayPrediction d = predicted_decay(pp);
        line += " (regime 1." + std::to_string(d.regime == 16 ? 6 : 9) +
                ", decay exponent " + num17(d.exponent) + ")";
        if (d.regime == 19)
            line += " [warning: regime (1.9) appears empty under the existence hypotheses]";
    }
    if (v.near_boundary) line += " [near boundary]";
    std::cout << line << "\n";
    Json j = region_json(v);
    j["params"] = params_json(pp);
    if (v.verdict == Region::ExistenceWithDirac) {
        const DecayPrediction d = predicted_decay(pp);
        j["decay_prediction"] = {{"exponent", num17(d.exponent)},
                                 {"regime", d.regime},
                                 {"origin_exponent", num17(d.origin_exponent)}};
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_tau_seq(const ProblemParams& pp, int max_j) {
    const TauSequence seq = tau_sequence(pp, max_j);
    Json j = tau_sequence_json(seq);
    j["params"] = params_json(pp);
    if (seq.j0) {
        const double lhs = pp.alpha + seq.taus[static_cast<size_t>(*seq.j0)] * pp.p;
        j["divergence_lhs"] = num17(lhs);
        j["divergence_criterion_holds"] = lhs >= 0.0;
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_phase_diagram(int N, double alpha, double p_min, double p_max, double q_min,
                      double q_max, int res_p, int res_q, const std::string& out_path,
                      int jobs) {
    if (res_p < 16 || res_q < 16) throw ParameterError("phase-diagram: resolution must be >= 16");
    if (!(p_min >= 0.0 && p_max > p_min && q_min >= 0.0 && q_max > q_min && q_max <= 1.0))
        throw ParameterError("phase-diagram: bad p/q ranges");

    const int rows = res_p * res_q;
    std::vector<std::string> lines(static_cast<size_t>(rows));
    auto work = [&](int lo, int hi) {
        char buf[256];
        for (int idx = lo; idx < hi; ++idx) {
            const int ip = idx / res_q, iq = idx % res_q;
            const double p = p_min + (ip + 0.5) * (p_max - p_min) / res_p;
            const double q = q_min + (iq + 0.5) * (q_max - q_min) / res_q;
            const RegionVerdict v = classify({N, alpha, p, q, 0.0});
            int regime = 0;
            if (v.flags.regime_16) regime = 16;
            else if (v.flags.regime_19) regime = 19;
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%s,%d,%.17g,%.17g,%.17g,%.17g\n", p, q,
                          region_name(v.verdict), regime, v.margins.mass, v.margins.sum_low,
                          v.margins.sum_serrin, v.margins.p_serrin);
            lines[static_cast<size_t>(idx)] = buf;
        }
    };
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        work(0, rows);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (rows + jobs - 1) / jobs;
        for (int t = 0; t < jobs; ++t) {
            const int lo = t * chunk, hi = std::min(rows, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "error: cannot open " << out_path << "\n";
        return kExitIo;
    }
    out << "p,q,verdict,regime,margin_mass,margin_sum_low,margin_sum_serrin,margin_p_serrin\n";
    for (const auto& l : lines) out << l; // merged in parameter order
    if (!out) {
        std::cerr << "error: write failed for " << out_path << "\n";
        return kExitIo;
    }
    return kExitOk;
}

int cmd_solve(const RunConfig& cfg) {
    const ProblemParams& pp = cfg.params;
    const RegionVerdict rv = classify(pp);
    if (rv.verdict != Region::ExistenceWithDirac) {
        std::cerr << "error: region is " << region_name(rv.verdict)
                  << ", not ExistenceWithDirac\n";
        return kExitBadParams;
    }
    auto grid = make_grid_ptr(cfg.r_min, cfg.r_max, cfg.nodes, pp.N);
    const AngularKernel kernel =
        load_or_build_kernel(pp.N, pp.alpha, grid, resolve_cache_dir(cfg.cache_dir));
    const FundamentalSolution fs = fundamental_solution(pp.N, grid);

    SolveOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    const SolveResult sr = iterate(pp, pp.k, grid, kernel, fs, opts);
    const VerificationReport rep =
        (sr.verdict == SolveVerdict::Converged)
            ? full_verification(sr, pp, kernel, fs, cfg.tol)
            : VerificationReport{};

    Json j = solve_json(sr, pp);
    if (sr.verdict == SolveVerdict::Converged) j["verification"] = verification_json(rep);

    std::filesystem::create_directories(cfg.output_dir);
    const auto report_path = std::filesystem::path(cfg.output_dir) / "report.json";
    const auto profile_path = std::filesystem::path(cfg.output_dir) / "profile.csv";
    try {
        std::ofstream out(report_path);
        out << j.dump(2) << "\n";
        if (!out) throw IoError("write failed");
        write_csv(sr.u, profile_path.string());
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    std::cout << verdict_name(sr.verdict) << " in " << sr.iterations
              << " iterations (final delta " << num17(sr.final_delta) << ")\n";
    if (sr.trivial) std::cout << "trivial run: k = 0 relaxed to the zero solution\n";
    if (sr.verdict == SolveVerdict::Converged) {
        for (const auto& [name, ok] : rep.pass_flags)
            std::cout << "  " << (ok ? "pass " : "FAIL ") << name << "\n";
    }
    std::cout << "report: " << report_path.string() << "\n";

    switch (sr.verdict) {
        case SolveVerdict::Converged: return kExitOk;
        case SolveVerdict::DivergedRiesz: return kExitDiverged;
        case SolveVerdict::MaxIterations: return kExitMaxIter;
    }
    return kExitOk;
}

int cmd_kstar(const RunConfig& cfg) {
    const ProblemParams& pp = cfg.params;
    auto grid = make_grid_ptr(cfg.r_min, cfg.r_max, cfg.nodes, pp.N);
    const AngularKernel kernel =
        load_or_build_kernel(pp.N, pp.alpha, grid, resolve_cache_dir(cfg.cache_dir));
    const FundamentalSolution fs = fundamental_solution(pp.N, grid);
    SolveOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    const KstarBracket b = estimate_kstar(pp, grid, kernel, fs, opts);
    Json j;
    j["params"] = params_json(pp);
    j["k_lo"] = num17(b.k_lo);
    j["k_hi"] = b.open_above ? Json("open") : Json(num17(b.k_hi));
    j["open_above"] = b.open_above;
    j["probes"] = b.probes;
    j["note"] = "bracket is a numerical artifact of the grid and tolerances";
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_probe_nonexistence(const RunConfig& cfg, double probe_k) {
    const ProblemParams& pp = cfg.params;
    auto grid = make_grid_ptr(cfg.r_min, cfg.r_max, cfg.nodes, pp.N);
    const AngularKernel kernel =
        load_or_build_kernel(pp.N, pp.alpha, grid, resolve_cache_dir(cfg.cache_dir));
    const FundamentalSolution fs = fundamental_solution(pp.N, grid);
    SolveOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    const NonexistenceReport rep = nonexistence_probe(pp, grid, kernel, fs, probe_k, opts);
    Json j;
    j["params"] = params_json(pp);
    j["tau_sequence"] = tau_sequence_json(rep.taus);
    j["divergence_lhs"] = num17(rep.divergence_lhs);
    j["criterion_holds"] = rep.criterion_holds;
    j["defensive_verdict"] = verdict_name(rep.defensive_verdict);
    j["defensive_iterations"] = rep.defensive_iterations;
    if (!rep.defensive_reason.empty()) j["defensive_reason"] = rep.defensive_reason;
    std::cout << j.dump(2) << "\n";
    const bool ok = rep.criterion_holds && rep.defensive_verdict != SolveVerdict::Converged;
    return ok ? kExitOk : kExitVerifyFail;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    const std::vector<PropertyResult> results = verify_suite(suite, seed);
    int failures = 0;
    for (const auto& r : results) {
        std::printf("%s %-45s %s\n", r.pass ? "pass" : "FAIL", r.name.c_str(), r.detail.c_str());
        if (!r.pass) ++failures;
    }
    std::printf("%d/%zu properties passed\n", static_cast<int>(results.size()) - failures,
                results.size());
    return failures == 0 ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for isolated singularities of the sublinear Choquard "
                 "equation -Delta u + u = I_alpha[u^p] u^q"};
    app.require_subcommand(1);

    // classify N alpha p q
    double cl_N = 3, cl_alpha = 1, cl_p = 1, cl_q = 0.5, eps_boundary = 1e-9;
    CLI::App* classify_cmd = app.add_subcommand("classify", "classify a parameter point");
    classify_cmd->add_option("N", cl_N)->required();
    classify_cmd->add_option("alpha", cl_alpha)->required();
    classify_cmd->add_option("p", cl_p)->required();
    classify_cmd->add_option("q", cl_q)->required();
    classify_cmd->add_option("--eps-boundary", eps_boundary)->capture_default_str();

    // tau-seq N alpha p q
    int max_j = 64;
    CLI::App* tau_cmd = app.add_subcommand("tau-seq", "bootstrap exponent sequence");
    double ts_N = 3, ts_alpha = 1, ts_p = 1, ts_q = 0.5;
    tau_cmd->add_option("N", ts_N)->required();
    tau_cmd->add_option("alpha", ts_alpha)->required();
    tau_cmd->add_option("p", ts_p)->required();
    tau_cmd->add_option("q", ts_q)->required();
    tau_cmd->add_option("--max-j", max_j)->capture_default_str();

    // phase-diagram
    int pd_N = 3, res_p = 200, res_q = 100, jobs = 1;
    double pd_alpha = 1.0, p_min = 0.0, p_max = 4.0, q_min = 0.0, q_max = 1.0;
    std::string pd_out = "phase_diagram.csv";
    CLI::App* pd_cmd = app.add_subcommand("phase-diagram", "region partition CSV over (p,q)");
    pd_cmd->add_option("N", pd_N)->required();
    pd_cmd->add_option("alpha", pd_alpha)->required();
    pd_cmd->add_option("--p-min", p_min)->capture_default_str();
    pd_cmd->add_option("--p-max", p_max)->capture_default_str();
    pd_cmd->add_option("--q-min", q_min)->capture_default_str();
    pd_cmd->add_option("--q-max", q_max)->capture_default_str();
    pd_cmd->add_option("--res-p", res_p)->capture_default_str();
    pd_cmd->add_option("--res-q", res_q)->capture_default_str();
    pd_cmd->add_option("--out,-o", pd_out)->capture_default_str();
    pd_cmd->add_option("--jobs", jobs, "concurrent workers; output order is deterministic")
        ->capture_default_str();

    // solve / kstar / probe-nonexistence share RunConfig options
    RunConfig scfg, kcfg, ncfg;
    std::string solve_config_path, kstar_config_path, probe_config_path;
    CLI::App* solve_cmd = app.add_subcommand("solve", "minimal-solution run + verification");
    add_param_options(solve_cmd, scfg);
    solve_cmd->add_option("--config", solve_config_path, "JSON config file (flags override)");
    CLI::App* kstar_cmd = app.add_subcommand("kstar", "bisection bracket for k*");
    add_param_options(kstar_cmd, kcfg);
    kstar_cmd->add_option("--config", kstar_config_path, "JSON config file (flags override)");
    CLI::App* probe_cmd =
        app.add_subcommand("probe-nonexistence", "certify the divergence criterion");
    double probe_k = 1.0;
    add_param_options(probe_cmd, ncfg);
    probe_cmd->add_option("--probe-k", probe_k, "mass for the defensive iteration")
        ->capture_default_str();
    probe_cmd->add_option("--config", probe_config_path, "JSON config file (flags override)");

    // verify suite [seed]
    std::string suite = "all";
    std::uint64_t seed = 0;
    CLI::App* verify_cmd = app.add_subcommand("verify", "module invariant suites");
    verify_cmd->add_option("suite", suite, "exponents|green|riesz|solver|analysis|all")
        ->required();
    verify_cmd->add_option("seed", seed)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*classify_cmd)
            return cmd_classify({static_cast<int>(cl_N), cl_alpha, cl_p, cl_q, 0.0},
                                eps_boundary);
        if (*tau_cmd)
            return cmd_tau_seq({static_cast<int>(ts_N), ts_alpha, ts_p, ts_q, 0.0}, max_j);
        if (*pd_cmd)
            return cmd_phase_diagram(pd_N, pd_alpha, p_min, p_max, q_min, q_max, res_p, res_q,
                                     pd_out, jobs);
        if (*solve_cmd) {
            if (!solve_config_path.empty()) apply_config_file(solve_config_path, solve_cmd, scfg);
            scfg.params.validate();
            return cmd_solve(scfg);
        }
        if (*kstar_cmd) {
            if (!kstar_config_path.empty()) apply_config_file(kstar_config_path, kstar_cmd, kcfg);
            kcfg.params.validate();
            return cmd_kstar(kcfg);
        }
        if (*probe_cmd) {
            if (!probe_config_path.empty()) apply_config_file(probe_config_path, probe_cmd, ncfg);
            ncfg.params.validate();
            return cmd_probe_nonexistence(ncfg, probe_k);
        }
        if (*verify_cmd) return cmd_verify(suite, seed);
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadParams;
    } catch (const RegionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadParams;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerifyFail;
    }
    return kExitOk;
}
