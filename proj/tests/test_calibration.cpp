#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "lgd/calibration.hpp"
#include "lgd/errors.hpp"
#include "lgd/loss.hpp"

using namespace lgd;
using lgd::testing::SyntheticSpec;
using lgd::testing::synthetic_series;
using lgd::testing::published_estimates;

TEST_CASE("equity inversion round trip") {
    const double e = call_value(10.0, 5.0, 0.2, 1.0);
    CHECK(invert_equity_to_asset(e, 5.0, 0.2, 1.0) == doctest::Approx(10.0).epsilon(1e-10));
    RngStream rng(42, 0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double v = std::exp(4.0 * rng.uniform());
        const double b = v * (0.05 + 1.5 * rng.uniform());
        const double sigma = 0.02 + 0.8 * rng.uniform();
        const double eq = call_value(v, b, sigma, 1.0);
        if (eq <= 1e-12 * v) {
            continue;  // equity underflows relative to assets
        }
        worst = std::max(worst, std::abs(invert_equity_to_asset(eq, b, sigma, 1.0) / v - 1.0));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("degenerate option maturity") {
    // sigma sqrt(t_m) -> 0 turns the call into max(V - B, 0).
    CHECK(invert_equity_to_asset(3.0, 7.0, 0.2, 1e-10) == doctest::Approx(10.0).epsilon(1e-8));
    CHECK_THROWS_AS(invert_equity_to_asset(0.0, 7.0, 0.2, 1.0), DomainError);
    CHECK_THROWS_AS(invert_equity_to_asset(1.0, 7.0, 0.0, 1.0), DomainError);
}

TEST_CASE("likelihood scaling and dead parameters") {
    SyntheticSpec s;
    s.n = 300;
    const MarketSeries ser = synthetic_series(s, 1);
    const LikelihoodSetup setup{s.r, s.alpha, s.t_m, s.dt};
    std::vector<double> e10 = ser.equity;
    std::vector<double> b10 = ser.debt_b;
    for (double& v : e10) {
        v *= 10.0;
    }
    for (double& v : b10) {
        v *= 10.0;
    }
    const DriftParams th{0.01, 0.01, 0.12};
    const double shift = log_likelihood(e10, b10, th, setup) - log_likelihood(ser.equity, ser.debt_b, th, setup);
    CHECK(shift == doctest::Approx(-(s.n - 1.0) * std::log(10.0)).epsilon(1e-9));

    // Every leverage above alpha: mu never enters.
    LikelihoodSetup low = setup;
    low.alpha = 1.01;
    const double base = log_likelihood(ser.equity, ser.debt_b, {0.01, -0.05, 0.12}, low);
    CHECK(log_likelihood(ser.equity, ser.debt_b, {0.01, 0.0, 0.12}, low) == base);

    CHECK_THROWS_AS(log_likelihood(ser.equity, ser.debt_b, {0.0, 0.01, 0.12}, setup), InvalidParameters);
    CHECK_THROWS_AS(log_likelihood(ser.equity, ser.debt_b, {0.5, 0.5, 0.12}, setup), InvalidParameters);
}

TEST_CASE("likelihood prefers the truth over perturbed parameters") {
    SyntheticSpec s;
    s.mu0 = s.mu = 0.05;
    s.sigma = 0.2;
    s.r = 0.1;  // keeps every perturbation admissible
    int wins = 0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        const MarketSeries ser = synthetic_series(s, 1000 + rep);
        const LikelihoodSetup setup{s.r, s.alpha, s.t_m, s.dt};
        const double truth = log_likelihood(ser.equity, ser.debt_b, {0.05, 0.05, 0.2}, setup);
        bool best = true;
        for (double dm : {-0.05, 0.05}) {
            for (double ds : {-0.05, 0.05}) {
                const double m = 0.05 + dm;
                best = best && truth > log_likelihood(ser.equity, ser.debt_b, {m, m, 0.2 + ds}, setup);
            }
        }
        wins += best ? 1 : 0;
    }
    CHECK(wins >= 95);
}

TEST_CASE("mle on a single-drift series") {
    SyntheticSpec s;
    const MarketSeries ser = synthetic_series(s, 3);
    const MleFit fit = fit_mle(ser.equity, ser.debt_b, {s.r, s.alpha, s.t_m, s.dt});
    CHECK(fit.single_drift);
    CHECK(fit.above_alpha == 0);
    CHECK(fit.estimate.mu0 == fit.estimate.mu);
    CHECK(std::isfinite(fit.std_error.mu));
    CHECK(std::isfinite(fit.std_error.sigma));
    CHECK(std::abs(fit.estimate.sigma - s.sigma) < 3 * fit.std_error.sigma);
    CHECK(std::abs(fit.estimate.mu - s.mu) < 3 * fit.std_error.mu);
    CHECK(fit.assets.size() == ser.size());
    CHECK_NOTHROW(LeverageModel({fit.estimate.mu0, fit.estimate.mu, fit.estimate.sigma, s.r, s.alpha, 1.0, 1.5, 0.5}));
    // Argmax does not move when equity and debt are scaled together.
    std::vector<double> e = ser.equity;
    std::vector<double> b = ser.debt_b;
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] *= 7.0;
        b[i] *= 7.0;
    }
    const MleFit scaled = fit_mle(e, b, {s.r, s.alpha, s.t_m, s.dt});
    CHECK(scaled.estimate.mu == doctest::Approx(fit.estimate.mu).epsilon(1e-5));
    CHECK(scaled.estimate.sigma == doctest::Approx(fit.estimate.sigma).epsilon(1e-6));
}

TEST_CASE("mle with observations on both sides of alpha") {
    SyntheticSpec s;
    s.alpha = 1.5;
    s.x0 = 1.5;
    s.mu0 = 0.01;
    s.mu = -0.05;
    const MarketSeries ser = synthetic_series(s, 5);
    const MleFit fit = fit_mle(ser.equity, ser.debt_b, {s.r, s.alpha, s.t_m, s.dt});
    CHECK_FALSE(fit.single_drift);
    CHECK(fit.above_alpha > 0);
    CHECK(fit.above_alpha < ser.size() - 1);
    CHECK(fit.estimate.mu0 >= fit.estimate.mu);
    CHECK(fit.estimate.mu0 - 0.5 * fit.estimate.sigma * fit.estimate.sigma - s.r < 0.0);
    CHECK(std::abs(fit.estimate.sigma - s.sigma) < 3 * fit.std_error.sigma);
}

TEST_CASE("mle input checks") {
    SyntheticSpec s;
    s.n = 99;
    const MarketSeries short_series = synthetic_series(s, 1);
    CHECK_THROWS_AS(fit_mle(short_series.equity, short_series.debt_b, {s.r, s.alpha, s.t_m, s.dt}), InputError);
    const std::vector<double> flat(200, 50.0);
    const std::vector<double> debt(200, 100.0);
    CHECK_THROWS_AS(fit_mle(flat, debt, {s.r, s.alpha, s.t_m, s.dt}), InputError);
}

TEST_CASE("loss lower bound at the published estimates") {
    CHECK(kd_lower_bound(1.32, 0.5858) == doctest::Approx(0.066628));
    CHECK(kd_lower_bound(1.32, 0.5858) > 0.0);
    CHECK(kd_lower_bound(1.6, 0.5858) < 0.0);
}

TEST_CASE("r_d search recovers the threshold that produced the target") {
    const LeverageModel model(published_estimates());
    SimConfig cfg;
    cfg.n_paths = 1000;
    const ProbabilityEstimate target = default_probability(sample_default_times(model, cfg).samples, 5.0);
    const RdCalibration a = calibrate_rd(model.with_r_d(1.0), cfg, target.value);
    CHECK(std::abs(a.dp5.value - target.value) < std::max(0.002, a.dp5.std_error));
    CHECK(a.r_d == doctest::Approx(1.32).epsilon(0.05));
    CHECK(a.feasible);
    CHECK(a.kd_floor == doctest::Approx(kd_lower_bound(a.r_d, 0.5858)));
    CHECK(a.samples.samples.size() == 1000);
    const RdCalibration b = calibrate_rd(model.with_r_d(0.7), cfg, target.value);
    CHECK(a.r_d == b.r_d);
    CHECK(a.dp5.value == b.dp5.value);
    CHECK_THROWS_AS(calibrate_rd(model, cfg, 0.99), CalibrationInfeasible);
    CHECK_THROWS_AS(calibrate_rd(model, cfg, 1.5), DomainError);
}

TEST_CASE("alpha selection") {
    SyntheticSpec s;
    s.alpha = 1.8;
    s.x0 = 1.45;
    s.mu0 = s.mu = 0.01;
    s.n = 400;
    CalibrationInput in;
    in.series = synthetic_series(s, 9);
    in.r = s.r;
    in.sim.n_paths = 400;
    in.target_dp5 = 0.08;
    in.t_m = s.t_m;
    in.dt_obs = s.dt;

    SUBCASE("singleton grid") {
        in.alpha_grid = {1.8};
        const CalibrationResult res = select_alpha(in);
        REQUIRE(res.candidates.size() == 1);
        CHECK(res.params.alpha == 1.8);
        CHECK(res.params.r_d == res.candidates[0].rd.r_d);
        CHECK(res.feasible);
        CHECK(std::abs(res.achieved_dp5.value - in.target_dp5) < std::max(0.002, res.achieved_dp5.std_error));
    }
    SUBCASE("selection is the argmin of the residual") {
        in.alpha_grid = {2.1, 1.5, 1.8};
        const CalibrationResult res = select_alpha(in);
        REQUIRE(res.candidates.size() == 3);
        double best = 1e9;
        double best_alpha = 0.0;
        for (const auto& c : res.candidates) {
            if (c.feasible && c.residual < best) {
                best = c.residual;
                best_alpha = c.alpha;
            }
        }
        CHECK(res.params.alpha == best_alpha);
    }
    SUBCASE("infeasible alpha is dropped") {
        // With w = 1 the loss floor turns negative once r_d > 2.
        in.series.debt_long = in.series.debt_total;
        in.target_dp5 = 0.35;
        in.alpha_grid = {1.6, 6.0};
        const CalibrationResult res = select_alpha(in);
        REQUIRE(res.candidates.size() == 2);
        const auto& wide = res.candidates[1];
        INFO("alpha 6 r_d " << wide.rd.r_d << " failure " << wide.failure);
        CHECK_FALSE(wide.feasible);
        CHECK(wide.rd.r_d > 2.0);
        CHECK(res.params.alpha == 1.6);
        CHECK(res.params.w == 1.0);
    }
    SUBCASE("no feasible alpha") {
        in.series.debt_long = in.series.debt_total;
        in.target_dp5 = 0.5;
        in.alpha_grid = {1.6, 6.0};
        CHECK_THROWS_AS(select_alpha(in), CalibrationInfeasible);
    }
}
