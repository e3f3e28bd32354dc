#pragma once

// File formats: CSV profile export, the JSON profile descriptor (bit-exact
// round-trip), the binary kernel cache with its JSON sidecar, and JSON report
// rendering. Floating-point values in JSON are written as decimal strings with
// 17 significant digits, which round-trip doubles exactly; reports use
// nlohmann ordered_json so reruns are byte-identical.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "choquard/analysis.hpp"
#include "choquard/errors.hpp"
#include "choquard/grid.hpp"
#include "choquard/riesz.hpp"
#include "choquard/solver.hpp"

namespace choquard {

using Json = nlohmann::ordered_json;

/// Decimal string with 17 significant digits (exact double round-trip).
inline std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline double parse17(const Json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_string()) return std::strtod(v.get_ref<const std::string&>().c_str(), nullptr);
    return v.get<double>();
}

// ---------------------------------------------------------------------------
// RadialFunction

inline void write_csv(const RadialFunction& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_csv: cannot open " + path);
    out << "r,value\n";
    for (int i = 0; i < f.size(); ++i)
        out << num17(f.grid->r(i)) << ',' << num17(f[i]) << '\n';
    if (!out) throw IoError("write_csv: write failed for " + path);
}

inline Json tail_model_json(const TailModel& t) {
    Json j;
    switch (t.kind) {
        case TailModel::Kind::PowerLaw:
            j["type"] = "power_law";
            j["coefficient"] = num17(t.coefficient);
            j["exponent"] = num17(t.exponent);
            break;
        case TailModel::Kind::ExponentialLike: j["type"] = "exponential_like"; break;
        case TailModel::Kind::Zero: j["type"] = "zero"; break;
    }
    return j;
}

inline Json profile_json(const RadialFunction& f) {
    Json j;
    j["grid"] = {{"r_min", num17(f.grid->r_min)},
                 {"r_max", num17(f.grid->r_max)},
                 {"n", f.grid->n},
                 {"dimension", f.grid->dimension}};
    j["origin_model"] = {{"coefficient", num17(f.origin_model.coefficient)},
                         {"exponent", num17(f.origin_model.exponent)}};
    j["tail_model"] = tail_model_json(f.tail_model);
    Json vals = Json::array();
    for (double v : f.values) vals.push_back(num17(v));
    j["values"] = std::move(vals);
    return j;
}

inline void write_profile_json(const RadialFunction& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_profile_json: cannot open " + path);
    out << profile_json(f).dump(2) << '\n';
    if (!out) throw IoError("write_profile_json: write failed for " + path);
}

inline RadialFunction profile_from_json(const Json& j) {
    const auto& jg = j.at("grid");
    auto grid = make_grid_ptr(parse17(jg, "r_min"), parse17(jg, "r_max"), jg.at("n").get<int>(),
                              jg.at("dimension").get<int>());
    RadialFunction f;
    f.grid = std::move(grid);
    const auto& vals = j.at("values");
    f.values.reserve(vals.size());
    for (const auto& v : vals)
        f.values.push_back(v.is_string()
                               ? std::strtod(v.get_ref<const std::string&>().c_str(), nullptr)
                               : v.get<double>());
    if (static_cast<int>(f.values.size()) != f.grid->n)
        throw IoError("profile_from_json: value count does not match grid");
    f.origin_model = {parse17(j.at("origin_model"), "coefficient"),
                      parse17(j.at("origin_model"), "exponent")};
    const auto& jt = j.at("tail_model");
    const std::string type = jt.at("type").get<std::string>();
    if (type == "power_law")
        f.tail_model = TailModel::power_law(parse17(jt, "coefficient"), parse17(jt, "exponent"));
    else if (type == "exponential_like")
        f.tail_model = TailModel::exponential_like();
    else if (type == "zero")
        f.tail_model = TailModel::zero();
    else
        throw IoError("profile_from_json: unknown tail model type " + type);
    return f;
}

inline RadialFunction read_profile_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_profile_json: cannot open " + path);
    Json j;
    in >> j;
    return profile_from_json(j);
}

// ---------------------------------------------------------------------------
// Kernel cache: binary container of the tabulated values plus a JSON sidecar.
// The cache stores, never recomputes: reloaded tables are bit-identical.

namespace detail {

constexpr std::uint32_t kKernelMagic = 0x4b514843; // "CHQK"
constexpr std::uint32_t kKernelVersion = 1;

inline void put_doubles(std::ofstream& out, const std::vector<double>& v) {
    const std::uint64_t count = v.size();
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

inline std::vector<double> get_doubles(std::ifstream& in) {
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    std::vector<double> v(count);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    return v;
}

}  // namespace detail

inline std::string kernel_cache_basename(int N, double alpha, std::uint64_t grid_hash) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "kernel_N%d_a%.12g_g%016llx", N, alpha,
                  static_cast<unsigned long long>(grid_hash));
    return buf;
}

inline void save_kernel(const AngularKernel& K, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string base =
        (fs::path(dir) / kernel_cache_basename(K.dimension, K.alpha, K.grid_hash)).string();

    std::ofstream bin(base + ".bin", std::ios::binary);
    if (!bin) throw IoError("save_kernel: cannot open " + base + ".bin");
    bin.write(reinterpret_cast<const char*>(&detail::kKernelMagic), 4);
    bin.write(reinterpret_cast<const char*>(&detail::kKernelVersion), 4);
    detail::put_doubles(bin, K.k_minus);
    detail::put_doubles(bin, K.k_plus);
    detail::put_doubles(bin, K.lo_rho);
    detail::put_doubles(bin, K.lo_kappa);
    detail::put_doubles(bin, K.lo_w);
    detail::put_doubles(bin, K.hi_rho);
    detail::put_doubles(bin, K.hi_kappa);
    detail::put_doubles(bin, K.hi_w);
    if (!bin) throw IoError("save_kernel: write failed");

    Json side;
    side["dimension"] = K.dimension;
    side["alpha"] = num17(K.alpha);
    side["n"] = K.grid->n;
    side["r_min"] = num17(K.grid->r_min);
    side["r_max"] = num17(K.grid->r_max);
    side["extension"] = K.extension;
    side["diagonal_integrable"] = K.diagonal_integrable;
    side["grid_hash"] = kernel_cache_basename(K.dimension, K.alpha, K.grid_hash);
    std::ofstream meta(base + ".json");
    meta << side.dump(2) << '\n';
}

inline std::optional<AngularKernel> load_kernel(int N, double alpha, GridPtr grid,
                                                const std::string& dir) {
    namespace fs = std::filesystem;
    const std::uint64_t hash = grid_fingerprint(*grid);
    const std::string base = (fs::path(dir) / kernel_cache_basename(N, alpha, hash)).string();
    std::ifstream bin(base + ".bin", std::ios::binary);
    if (!bin) return std::nullopt;
    std::uint32_t magic = 0, version = 0;
    bin.read(reinterpret_cast<char*>(&magic), 4);
    bin.read(reinterpret_cast<char*>(&version), 4);
    if (magic != detail::kKernelMagic || version != detail::kKernelVersion) return std::nullopt;

    AngularKernel K;
    K.dimension = N;
    K.alpha = alpha;
    K.grid = std::move(grid);
    K.log_step = K.grid->log_step;
    K.diagonal_integrable = alpha > 1.0;
    K.grid_hash = hash;
    K.k_minus = detail::get_doubles(bin);
    K.k_plus = detail::get_doubles(bin);
    K.lo_rho = detail::get_doubles(bin);
    K.lo_kappa = detail::get_doubles(bin);
    K.lo_w = detail::get_doubles(bin);
    K.hi_rho = detail::get_doubles(bin);
    K.hi_kappa = detail::get_doubles(bin);
    K.hi_w = detail::get_doubles(bin);
    if (!bin) return std::nullopt;
    K.extension = static_cast<int>(K.k_minus.size()) - K.grid->n;
    if (K.extension < 0) return std::nullopt;
    return K;
}

/// Cache directory resolution: explicit argument, else CHOQUARD_CACHE_DIR,
/// else no caching.
inline std::string resolve_cache_dir(const std::string& requested = "") {
    if (!requested.empty()) return requested;
    if (const char* env = std::getenv("CHOQUARD_CACHE_DIR")) return env;
    return "";
}

inline AngularKernel load_or_build_kernel(int N, double alpha, GridPtr grid,
                                          const std::string& cache_dir = "") {
    const std::string dir = resolve_cache_dir(cache_dir);
    if (!dir.empty()) {
        if (auto K = load_kernel(N, alpha, grid, dir)) return std::move(*K);
    }
    AngularKernel K = build_kernel(N, alpha, std::move(grid));
    if (!dir.empty()) save_kernel(K, dir);
    return K;
}

// ---------------------------------------------------------------------------
// Report rendering

inline Json region_json(const RegionVerdict& v) {
    Json j;
    j["verdict"] = region_name(v.verdict);
    j["flags"] = {{"nonexist_q", v.flags.nonexist_q},
                  {"cond_12", v.flags.cond_12},
                  {"cond_13", v.flags.cond_13},
                  {"cond_14", v.flags.cond_14},
                  {"regime_16", v.flags.regime_16},
                  {"regime_19", v.flags.regime_19},
                  {"existence_hypotheses", v.flags.existence_hypotheses}};
    j["margins"] = {{"mass", num17(v.margins.mass)},
                    {"sum_low", num17(v.margins.sum_low)},
                    {"sum_serrin", num17(v.margins.sum_serrin)},
                    {"p_serrin", num17(v.margins.p_serrin)}};
    j["near_boundary"] = v.near_boundary;
    return j;
}

inline Json params_json(const ProblemParams& pp) {
    return Json{{"N", pp.N},
                {"alpha", num17(pp.alpha)},
                {"p", num17(pp.p)},
                {"q", num17(pp.q)},
                {"k", num17(pp.k)}};
}

inline Json tau_sequence_json(const TauSequence& seq) {
    Json j;
    j["tau0"] = num17(seq.tau0);
    Json taus = Json::array();
    for (double t : seq.taus) taus.push_back(num17(t));
    j["taus"] = std::move(taus);
    if (seq.j0)
        j["j0"] = *seq.j0;
    else
        j["j0"] = "none";
    j["threshold"] = num17(seq.threshold);
    if (seq.limit)
        j["limit"] = num17(*seq.limit);
    else
        j["limit"] = "infinite";
    return j;
}

inline Json verification_json(const VerificationReport& rep) {
    Json j;
    j["trivial"] = rep.trivial;
    j["origin_fit"] = {{"exponent", num17(rep.origin.exponent)},
                       {"coefficient", num17(rep.origin.coefficient)},
                       {"target", num17(rep.origin.target)},
                       {"rel_error", num17(rep.origin.rel_error)},
                       {"fit_residual", num17(rep.origin.fit_residual)},
                       {"k_zero_mode", rep.origin.k_zero_mode},
                       {"bounded_ok", rep.origin.bounded_ok}};
    if (rep.decay) {
        const DecayFit& d = *rep.decay;
        Json jd;
        jd["regime"] = d.regime;
        jd["window"] = {num17(d.window_lo), num17(d.window_hi)};
        jd["fitted_exponent"] = num17(d.fitted_exponent);
        jd["predicted_exponent"] = num17(d.predicted_exponent);
        jd["fit_residual"] = num17(d.fit_residual);
        jd["fitted_prefactor"] = num17(d.fitted_prefactor);
        jd["predicted_prefactor"] = num17(d.predicted_prefactor);
        jd["exponent_rel_error"] = num17(d.exponent_rel_error);
        jd["prefactor_rel_error"] = num17(d.prefactor_rel_error);
        jd["product_inner"] = num17(d.product_inner);
        jd["product_outer"] = num17(d.product_outer);
        if (d.regime == 19) {
            jd["limsup_product"] = num17(d.limsup_product);
            jd["liminf_product"] = num17(d.liminf_product);
            jd["bounded_by_k"] = d.bounded_by_k;
            jd["bounded_below"] = d.bounded_below;
            jd["note"] = "regime not attainable under stated hypotheses";
        }
        j["decay_fit"] = std::move(jd);
    }
    j["lower_bound_b0"] = num17(rep.lower_bound_b0);
    if (rep.l1_norm_u)
        j["l1_norm_u"] = num17(*rep.l1_norm_u);
    else
        j["l1_norm_u"] = "divergent";
    j["lp_mass"] = num17(rep.lp_mass);
    j["young_violation"] = num17(rep.young_violation);
    j["fixed_point_residual"] = num17(rep.residual);
    Json flags;
    for (const auto& [name, ok] : rep.pass_flags) flags[name] = ok;
    j["pass_flags"] = std::move(flags);
    return j;
}

inline Json solve_json(const SolveResult& sr, const ProblemParams& pp) {
    Json j;
    j["params"] = params_json(pp);
    j["k"] = num17(sr.k);
    j["verdict"] = verdict_name(sr.verdict);
    j["iterations"] = sr.iterations;
    j["final_delta"] = num17(sr.final_delta);
    j["cap_available"] = sr.cap_available;
    j["trivial"] = sr.trivial;
    if (!sr.divergence_reason.empty()) j["divergence_reason"] = sr.divergence_reason;
    bool monotone = true, capped = true;
    for (const auto& d : sr.diagnostics) {
        monotone = monotone && d.monotone_ok;
        capped = capped && d.capped_ok;
    }
    j["monotone_all_steps"] = monotone;
    j["capped_all_steps"] = capped;
    Json diag = Json::array();
    for (const auto& d : sr.diagnostics)
        diag.push_back(Json{{"n", d.n},
                            {"delta_sup", num17(d.delta_sup)},
                            {"monotone_ok", d.monotone_ok},
                            {"capped_ok", d.capped_ok}});
    j["diagnostics"] = std::move(diag);
    return j;
}

}  // namespace choquard
