// Command-line front end. Exit codes: 0 success, 2 input error,
// 3 calibration infeasible, 4 numerical or domain failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lgd/errors.hpp"
#include "lgd/market.hpp"
#include "lgd/pipeline.hpp"
#include "lgd/pricing.hpp"
#include "lgd/report.hpp"
#include "lgd/simulation.hpp"
#include "lgd/validation.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

struct SimOptions {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 20211001;
    double dt = 1e-3;
};

void add_sim_options(CLI::App* cmd, SimOptions& o) {
    cmd->add_option("--n", o.n_paths, "Monte Carlo paths")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
    cmd->add_option("--dt", o.dt, "grid step of leverage paths (years)")->capture_default_str();
}

lgd::SimConfig sim_config(const SimOptions& o) {
    lgd::SimConfig cfg;
    cfg.n_paths = o.n_paths;
    cfg.seed = o.seed;
    cfg.dt = o.dt;
    lgd::validate(cfg);
    return cfg;
}

void print_quote(const char* label, const lgd::CdsQuote& q) {
    std::printf("%s spread %.4f bps  premium leg %.6f  default leg %.6e  mean LGD %.4f  rho %.2f\n", label,
                q.spread_bps, q.premium_leg, q.default_leg, q.mean_lgd, q.rho);
}

int run_validate() {
    bool ok = true;
    for (const auto& c : lgd::zakian_suite()) {
        std::printf("%s zakian %-10s max error %.3e (tolerance %.0e)\n", c.pass() ? "PASS" : "FAIL", c.name.c_str(),
                    c.max_error, c.tolerance);
        ok = ok && c.pass();
    }
    const lgd::LeverageModel model({0.0102, 0.0102, 0.1182, 0.0093, 1.8, 1.32, 1.4674, 0.5858});
    lgd::SimConfig cfg;
    cfg.n_paths = 50000;
    const auto cmp = lgd::compare_with_oracle(model, cfg);
    const bool ks_ok = cmp.ks < 0.02;
    ok = ok && ks_ok;
    std::printf("%s oracle recovery KS %.4f (tolerance 0.02, %zu paths)\n", ks_ok ? "PASS" : "FAIL", cmp.ks,
                cmp.paths);
    for (const auto& t : cmp.transforms) {
        const bool pass = std::abs(t.oracle - t.closed_form) < 3.0 * t.std_error;
        ok = ok && pass;
        std::printf("%s oracle E[exp(-%.1f tau)] %.5f vs closed form %.5f (s.e. %.5f)\n", pass ? "PASS" : "FAIL",
                    t.gamma, t.oracle, t.closed_form, t.std_error);
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Loss-given-default engine for a leverage model with a distress level"};
    app.require_subcommand(1);

    std::string equity_csv;
    std::string balance_csv;
    std::string config_file;
    std::string out_dir;
    std::string params_file;
    bool samples = false;
    double w = -1.0;
    std::vector<double> w_grid;
    std::string samples_csv;
    SimOptions sim;
    lgd::CdsTerms terms;
    terms.r = -1.0;

    auto* calibrate = app.add_subcommand("calibrate", "estimate parameters from market data and price");
    calibrate->add_option("--equity", equity_csv, "CSV with date,market_cap")->required()->check(CLI::ExistingFile);
    calibrate->add_option("--balance", balance_csv, "CSV with date,short_term_debt,long_term_debt")
        ->required()
        ->check(CLI::ExistingFile);
    calibrate->add_option("--config", config_file, "key = value run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    calibrate->add_option("--out", out_dir, "output directory")->required();
    calibrate->add_flag("--samples", samples, "also write samples.csv");

    auto* lgd_dist = app.add_subcommand("lgd-dist", "fixed-parameter run: densities, DP and spread");
    lgd_dist->add_option("--params", params_file, "JSON parameter file")->required()->check(CLI::ExistingFile);
    lgd_dist->add_option("--out", out_dir, "output directory")->required();
    lgd_dist->add_option("--w-grid", w_grid, "extra long-term shares priced on the same samples")->delimiter(',');
    lgd_dist->add_flag("--samples", samples, "also write samples.csv");
    add_sim_options(lgd_dist, sim);

    auto* cds = app.add_subcommand("cds-spread", "model CDS spread for a long-term debt share");
    cds->add_option("--params", params_file, "JSON parameter file")->required()->check(CLI::ExistingFile);
    cds->add_option("--w", w, "long-term share of total debt (default: from the parameter file)");
    cds->add_option("--maturity", terms.maturity, "years")->capture_default_str();
    cds->add_option("--frequency", terms.frequency, "payments per year")->capture_default_str();
    add_sim_options(cds, sim);

    auto* simulate = app.add_subcommand("simulate", "sample default times");
    simulate->add_option("--params", params_file, "JSON parameter file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", samples_csv, "write per-path samples to this CSV");
    add_sim_options(simulate, sim);

    auto* validate = app.add_subcommand("validate", "Laplace inversion suite and oracle comparison");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitInput;
    }

    try {
        if (calibrate->parsed()) {
            const lgd::LoadedInputs inputs = lgd::load_inputs(equity_csv, balance_csv, config_file);
            const lgd::RunArtifact art = lgd::run_pipeline(inputs);
            lgd::emit_report(art, out_dir, samples || inputs.config.write_samples);
            std::printf("alpha %.4f  r_d %.4f  DP5 %.4f (s.e. %.4f)\n", art.params.alpha, art.params.r_d, art.dp5.value,
                        art.dp5.std_error);
            print_quote("cds", art.cds);
        } else if (lgd_dist->parsed()) {
            lgd::FixedRunOptions opt;
            const lgd::ModelParams p = lgd::read_params_json(params_file);
            opt.sim = sim_config(sim);
            opt.terms.r = p.r;
            opt.w_grid = w_grid;
            const lgd::RunArtifact art = lgd::run_fixed(p, opt);
            lgd::emit_report(art, out_dir, samples);
            std::printf("DP5 %.4f (s.e. %.4f)  LGD support [%.4f, 1]  mean %.4f\n", art.dp5.value, art.dp5.std_error,
                        art.lgd.support_lo, art.lgd.mean);
            print_quote("cds", art.cds);
        } else if (cds->parsed()) {
            lgd::ModelParams p = lgd::read_params_json(params_file);
            if (w >= 0.0) {
                p.w = w;
            }
            terms.r = p.r;
            const lgd::LeverageModel model(p);
            const auto set = lgd::sample_default_times(model, sim_config(sim));
            print_quote("cds", lgd::price_cds(set.samples, terms));
        } else if (simulate->parsed()) {
            const lgd::LeverageModel model(lgd::read_params_json(params_file));
            const auto set = lgd::sample_default_times(model, sim_config(sim));
            const auto dp = lgd::default_probability(set.samples, 5.0);
            std::printf("paths %zu  DP5 %.4f (s.e. %.4f)  clock redraws %zu\n", set.samples.size(), dp.value,
                        dp.std_error, set.failures);
            if (!samples_csv.empty()) {
                FILE* f = std::fopen(samples_csv.c_str(), "w");
                if (f == nullptr) {
                    throw lgd::InputError("cannot write " + samples_csv);
                }
                std::fprintf(f, "l_alpha,tau,recovery,xi,kd\n");
                for (const auto& s : set.samples) {
                    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.l_alpha, s.tau, s.recovery.value, s.xi, s.kd);
                }
                std::fclose(f);
            }
        } else if (validate->parsed()) {
            return run_validate();
        }
    } catch (const lgd::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const lgd::CalibrationInfeasible& e) {
        std::cerr << "calibration infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const lgd::Error& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
