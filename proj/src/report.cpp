#include "lgd/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "lgd/errors.hpp"

namespace lgd {

namespace {

using nlohmann::json;

constexpr const char* kParamKeys[] = {"mu0", "mu", "sigma", "r", "alpha", "r_d", "x0", "w"};

// NaN and infinities become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw InputError("write failed for " + path.string());
    }
}

std::string two_columns(const char* x_name, const std::vector<double>& x, const std::vector<double>& y) {
    std::string s = std::string(x_name) + ",density\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += fmt(x[i]) + "," + fmt(y[i]) + "\n";
    }
    return s;
}

json quote_json(const CdsQuote& q) {
    return {{"spread_bps", number(q.spread_bps)},   {"premium_leg", number(q.premium_leg)},
            {"default_leg", number(q.default_leg)}, {"mean_lgd", number(q.mean_lgd)},
            {"rho", number(q.rho)},                 {"defaults", q.defaults}};
}

}  // namespace

ModelParams params_from_json(const json& j) {
    if (!j.is_object()) {
        throw InputError("parameter file must hold a JSON object");
    }
    double values[8];
    for (std::size_t i = 0; i < 8; ++i) {
        const auto it = j.find(kParamKeys[i]);
        if (it == j.end() || !it->is_number()) {
            throw InputError(std::string("parameter '") + kParamKeys[i] + "' missing or not a number");
        }
        values[i] = it->get<double>();
    }
    return {values[0], values[1], values[2], values[3], values[4], values[5], values[6], values[7]};
}

json params_to_json(const ModelParams& p) {
    return {{"mu0", p.mu0}, {"mu", p.mu},       {"sigma", p.sigma}, {"r", p.r},
            {"alpha", p.alpha}, {"r_d", p.r_d}, {"x0", p.x0},       {"w", p.w}};
}

ModelParams read_params_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return params_from_json(j);
}

json report_json(const RunArtifact& art) {
    const LeverageModel model(art.params);
    const DerivedParams& dp = model.derived();
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["engine"] = {{"name", "lgd"}, {"version", kEngineVersion}};
    j["mode"] = art.mode;
    j["run"] = {{"seed", art.sim.seed},
                {"n_paths", art.sim.n_paths},
                {"sim_dt", art.sim.dt},
                {"tau_grid",
                 {{"t_max", art.sim.tau_grid.t_max},
                  {"points", art.sim.tau_grid.points},
                  {"residual_tolerance", art.sim.tau_grid.residual_tolerance}}},
                {"cds", {{"r", art.terms.r}, {"maturity", art.terms.maturity}, {"frequency", art.terms.frequency}}}};
    j["params"] = params_to_json(art.params);
    j["derived"] = {{"m", dp.m}, {"alpha_star", dp.alpha_star}, {"d", dp.d}, {"b", dp.b},
                    {"tau_decay_rate", tau_decay_rate(model)}};
    if (art.std_errors) {
        j["std_errors"] = {{"mu0", number(art.std_errors->mu0)},
                           {"mu", number(art.std_errors->mu)},
                           {"sigma", number(art.std_errors->sigma)}};
    } else {
        j["std_errors"] = nullptr;
    }
    if (art.calibration) {
        const CalibrationSummary& c = *art.calibration;
        json cands = json::array();
        for (const AlphaCandidate& a : c.candidates) {
            cands.push_back({{"alpha", a.alpha},
                             {"feasible", a.feasible},
                             {"failure", a.failure},
                             {"r_d", number(a.rd.r_d)},
                             {"dp5", number(a.rd.dp5.value)},
                             {"dp5_std_error", number(a.rd.dp5.std_error)},
                             {"residual", number(a.residual)},
                             {"kd_floor", number(a.rd.kd_floor)},
                             {"loglik", number(a.mle.loglik)},
                             {"single_drift", a.mle.single_drift},
                             {"evaluations", a.rd.evaluations}});
        }
        j["calibration"] = {{"target_dp5", c.target_dp5},
                            {"window_start", c.window_start},
                            {"window_end", c.window_end},
                            {"observations", c.observations},
                            {"loglik", number(c.loglik)},
                            {"single_drift", c.single_drift},
                            {"alpha_candidates", cands}};
    } else {
        j["calibration"] = nullptr;
    }
    j["default_probability"] = {{"horizon", 5.0}, {"value", art.dp5.value}, {"std_error", art.dp5.std_error}};
    j["last_passage"] = {{"atom_closed_form", art.atom_closed_form ? json(*art.atom_closed_form) : json(nullptr)},
                         {"atom_sample", art.atom_sample}};
    j["tau"] = {{"mean", art.tau_density.mean()}, {"raw_mass", art.tau_density.raw_mass},
                {"t_max", art.tau_density.grid.back()}};
    j["lgd"] = {{"support", {art.lgd.support_lo, art.lgd.support_hi}},
                {"mean", art.lgd.mean},
                {"raw_mass", art.lgd.kd_density.raw_mass}};
    j["cds"] = quote_json(art.cds);
    json sweep = json::array();
    for (const WQuote& q : art.w_sweep) {
        json e = quote_json(q.quote);
        e["w"] = q.w;
        sweep.push_back(e);
    }
    j["w_sweep"] = sweep;
    j["sampling"] = {{"clock_redraws", art.samples.failures}};
    return j;
}

void emit_report(const RunArtifact& art, const std::filesystem::path& dir, bool write_samples) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw InputError("cannot create " + dir.string() + ": " + ec.message());
    }
    write_text(dir / "report.json", report_json(art).dump(2) + "\n");
    write_text(dir / "lalpha_density.csv", two_columns("t", art.lalpha_density.x, art.lalpha_density.density));
    write_text(dir / "tau_density.csv", two_columns("t", art.tau_density.grid, [&] {
                   std::vector<double> pdf = art.tau_density.pdf;
                   for (double& v : pdf) {
                       v /= art.tau_density.raw_mass;
                   }
                   return pdf;
               }()));
    write_text(dir / "kd_density.csv", two_columns("kd", art.lgd.kd_density.grid, [&] {
                   std::vector<double> pdf = art.lgd.kd_density.pdf;
                   for (double& v : pdf) {
                       v /= art.lgd.kd_density.raw_mass;
                   }
                   return pdf;
               }()));
    if (write_samples) {
        std::string s = "l_alpha,tau,recovery,xi,kd\n";
        for (const DefaultSample& d : art.samples.samples) {
            s += fmt(d.l_alpha) + "," + fmt(d.tau) + "," + fmt(d.recovery.value) + "," + fmt(d.xi) + "," +
                 fmt(d.kd) + "\n";
        }
        write_text(dir / "samples.csv", s);
    }
}

}  // namespace lgd
