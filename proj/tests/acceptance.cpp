// Acceptance run: one PASS/FAIL/SKIP line per criterion at the pinned
// tolerances, with the measured values underneath. Exit status is nonzero if
// any criterion fails.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "lgd/calibration.hpp"
#include "lgd/errors.hpp"
#include "lgd/pipeline.hpp"
#include "lgd/report.hpp"
#include "lgd/validation.hpp"

namespace fs = std::filesystem;
using namespace lgd;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status = Status::fail;
    std::vector<std::string> details;

    void note(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
        char buf[512];
        va_list ap;
        va_start(ap, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        va_end(ap);
        details.emplace_back(buf);
    }
};

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out.status = Status::fail;
        out.details.push_back(std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out.status != Status::skip && secs > budget_s) {
        out.status = Status::fail;
        out.note("runtime %.1f s over the %.0f s budget", secs, budget_s);
    }
    const char* label = out.status == Status::pass ? "PASS" : out.status == Status::fail ? "FAIL" : "SKIP";
    std::printf("%s [%d] %s (%.1f s)\n", label, id, title, secs);
    for (const auto& d : out.details) {
        std::printf("       %s\n", d.c_str());
    }
    std::fflush(stdout);
    failures += out.status == Status::fail ? 1 : 0;
}

Status verdict(bool ok) { return ok ? Status::pass : Status::fail; }

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* env(const char* name) {
    const char* v = std::getenv(name);
    return v != nullptr && *v != '\0' ? v : nullptr;
}

}  // namespace

int main() {
    const ModelParams published = lgd::testing::published_estimates();
    const LeverageModel model(published);
    SimConfig full;  // 10,000 paths, production seed

    run(1, "Zakian inversion suite", 1.0, [] {
        Outcome o;
        bool ok = true;
        for (const auto& c : zakian_suite()) {
            o.note("%-12s max |error| %.2e (limit %.0e)", c.name.c_str(), c.max_error, c.tolerance);
            ok = ok && c.pass();
        }
        o.status = verdict(ok);
        return o;
    });

    run(2, "closed forms against the occupation-time oracle", 180.0, [&] {
        Outcome o;
        SimConfig cfg;
        cfg.n_paths = 50000;
        const OracleComparison cmp = compare_with_oracle(model, cfg);
        bool ok = cmp.ks < 0.02;
        o.note("recovery KS %.4f over %zu paths (limit 0.02)", cmp.ks, cmp.paths);
        for (const auto& t : cmp.transforms) {
            const double z = (t.oracle - t.closed_form) / t.std_error;
            o.note("E[exp(-%.1f tau)] oracle %.5f closed form %.5f, %.2f s.e. (limit 3)", t.gamma, t.oracle,
                   t.closed_form, z);
            ok = ok && std::abs(z) < 3.0;
        }
        o.status = verdict(ok);
        return o;
    });

    run(3, "last passage atom", 120.0, [&] {
        Outcome o;
        const double atom = LastPassageLaw(model).atom();
        const int n = 10000;
        int zeros = 0;
        for (int i = 0; i < n; ++i) {
            RngStream rng(full.seed, static_cast<std::uint64_t>(i));
            zeros += sample_last_passage_path(model, full.dt, rng) == 0.0 ? 1 : 0;
        }
        const double est = static_cast<double>(zeros) / n;
        const double se = std::sqrt(atom * (1.0 - atom) / n);
        o.note("closed form P(L = 0) %.4f (target 0.1625 +/- 0.003)", atom);
        o.note("path simulation %.4f over %d paths, %.2f s.e. (limit 3)", est, n, (est - atom) / se);
        o.status = verdict(within(atom, 0.1625, 0.003) && std::abs(est - atom) < 3.0 * se);
        return o;
    });

    run(4, "five-year default probability", 120.0, [&] {
        Outcome o;
        const auto set = sample_default_times(model, full);
        const ProbabilityEstimate dp = default_probability(set.samples, 5.0);
        o.note("DP5 %.4f (s.e. %.4f) over %zu paths, target 0.1614 +/- 0.012", dp.value, dp.std_error,
               set.samples.size());
        o.status = verdict(within(dp.value, 0.1614, 0.012));
        return o;
    });

    run(5, "CDS spread, mean LGD and rho", 180.0, [&] {
        Outcome o;
        FixedRunOptions opt;
        opt.sim = full;
        opt.terms.r = published.r;
        opt.w_grid = {0.57, 0.58, 0.5858, 0.59, 0.60};
        const RunArtifact art = run_fixed(published, opt);
        const CdsQuote& q = art.cds;
        const bool lgd_ok = within(q.mean_lgd, 0.1362, 0.005);
        const bool spread_ok = within(q.spread_bps, 48.67, 0.03 * 48.67);
        const bool rho_ok = within(q.rho, 357.33, 0.03 * 357.33);
        o.note("w 0.5858: mean LGD %.4f (0.1362 +/- 0.005) %s", q.mean_lgd, lgd_ok ? "ok" : "out");
        o.note("w 0.5858: spread %.2f bps (48.67 +/- 3%%) %s", q.spread_bps, spread_ok ? "ok" : "out");
        o.note("w 0.5858: rho %.2f (357.33 +/- 3%%) %s", q.rho, rho_ok ? "ok" : "out");
        bool increasing = true;
        bool rho_band = true;
        double previous = -1.0;
        for (const WQuote& wq : art.w_sweep) {
            o.note("w %.4f: spread %.4f  mean LGD %.4f  rho %.2f", wq.w, wq.quote.spread_bps, wq.quote.mean_lgd,
                   wq.quote.rho);
            increasing = increasing && wq.quote.spread_bps > previous;
            rho_band = rho_band && wq.quote.rho >= 356.0 && wq.quote.rho <= 359.0;
            previous = wq.quote.spread_bps;
        }
        o.note("spreads strictly increasing in w: %s", increasing ? "yes" : "no");
        o.note("all rho in [356, 359]: %s", rho_band ? "yes" : "no");
        o.status = verdict(lgd_ok && spread_ok && rho_ok && increasing && rho_band);
        return o;
    });

    run(6, "likelihood estimator coverage and scale invariance", 600.0, [] {
        Outcome o;
        const lgd::testing::SyntheticSpec spec;
        const LikelihoodSetup setup{spec.r, spec.alpha, spec.t_m, spec.dt};
        const int reps = 100;
        int mu_in = 0;
        int sigma_in = 0;
        int both_in = 0;
        for (int rep = 0; rep < reps; ++rep) {
            const MarketSeries s = lgd::testing::synthetic_series(spec, static_cast<std::uint64_t>(rep));
            const MleFit fit = fit_mle(s.equity, s.debt_b, setup);
            const bool mu_ok = std::abs(fit.estimate.mu - spec.mu) <= 2.0 * fit.std_error.mu;
            const bool sigma_ok = std::abs(fit.estimate.sigma - spec.sigma) <= 2.0 * fit.std_error.sigma;
            mu_in += mu_ok ? 1 : 0;
            sigma_in += sigma_ok ? 1 : 0;
            both_in += mu_ok && sigma_ok ? 1 : 0;
        }
        o.note("truth within 2 s.e.: mu %d/%d, sigma %d/%d (limit 90 each); both at once %d/%d", mu_in, reps,
               sigma_in, reps, both_in, reps);

        const MarketSeries s = lgd::testing::synthetic_series(spec, 12345);
        std::vector<double> e = s.equity;
        std::vector<double> b = s.debt_b;
        for (std::size_t i = 0; i < e.size(); ++i) {
            e[i] *= 10.0;
            b[i] *= 10.0;
        }
        const MleFit base = fit_mle(s.equity, s.debt_b, setup);
        const MleFit scaled = fit_mle(e, b, setup);
        const double dmu = std::abs(scaled.estimate.mu - base.estimate.mu);
        const double dsigma = std::abs(scaled.estimate.sigma - base.estimate.sigma);
        const bool invariant = dmu < 1e-6 && dsigma < 1e-6;
        o.note("scaling (E, B) by 10 moves mu by %.1e and sigma by %.1e (limit 1e-6)", dmu, dsigma);
        o.status = verdict(mu_in >= 90 && sigma_in >= 90 && invariant);
        return o;
    });

    run(7, "calibration on user-supplied Ford data", 1800.0, [] {
        Outcome o;
        const char* equity = env("LGD_FORD_EQUITY");
        const char* balance = env("LGD_FORD_BALANCE");
        if (equity == nullptr || balance == nullptr) {
            o.status = Status::skip;
            o.note("set LGD_FORD_EQUITY and LGD_FORD_BALANCE (and optionally LGD_FORD_CONFIG) to run");
            return o;
        }
        fs::path config;
        if (const char* c = env("LGD_FORD_CONFIG")) {
            config = c;
        } else {
            config = fs::temp_directory_path() / "lgd_ford_acceptance.cfg";
            std::ofstream(config) << "as_of = 2021-10-01\nlookback = 1000\nr = 0.0093\ntarget_dp5 = 0.16153\n"
                                     "alpha_grid = 1.8\n";
        }
        const RunArtifact art = run_pipeline(load_inputs(equity, balance, config));
        const ModelParams& p = art.params;
        const bool mu_ok = within(p.mu, 0.0102, 0.0057);
        const bool sigma_ok = within(p.sigma, 0.1182, 0.0030);
        const bool dp_ok = within(art.dp5.value, 0.1614, 0.0037);
        const bool x0_ok = within(p.x0, 1.4674, 0.005);
        const bool w_ok = within(p.w, 0.5858, 0.002);
        o.note("alpha %.2f  r_d %.4f (published 1.8, 1.32)", p.alpha, p.r_d);
        o.note("mu %.4f (0.0102 +/- 0.0057)  sigma %.4f (0.1182 +/- 0.0030)", p.mu, p.sigma);
        o.note("DP5 %.4f (0.1614 +/- 0.0037)  x0 %.4f (1.4674 +/- 0.005)  w %.4f (0.5858 +/- 0.002)",
               art.dp5.value, p.x0, p.w);
        o.status = verdict(mu_ok && sigma_ok && dp_ok && x0_ok && w_ok);
        return o;
    });

    run(8, "byte-identical reports for identical seeds", 120.0, [&] {
        Outcome o;
        FixedRunOptions opt;
        opt.sim.n_paths = 2000;
        opt.terms.r = published.r;
        opt.w_grid = {0.57, 0.60};
        const fs::path root = fs::temp_directory_path() / "lgd_acceptance_determinism";
        fs::remove_all(root);
        emit_report(run_fixed(published, opt), root / "a", true);
        emit_report(run_fixed(published, opt), root / "b", true);
        bool same = true;
        for (const char* f : {"report.json", "lalpha_density.csv", "tau_density.csv", "kd_density.csv", "samples.csv"}) {
            const bool eq = slurp(root / "a" / f) == slurp(root / "b" / f);
            o.note("%-20s %s", f, eq ? "identical" : "differs");
            same = same && eq;
        }
        fs::remove_all(root);
        o.status = verdict(same);
        return o;
    });

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
