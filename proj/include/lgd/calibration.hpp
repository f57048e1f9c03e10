#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lgd/market.hpp"
#include "lgd/model.hpp"
#include "lgd/simulation.hpp"

namespace lgd {

// Equity as a call on assets struck at the debt level, with
// d = (ln(V/B) + sigma^2 t_m / 2) / (sigma sqrt(t_m)) and no discounting:
// E = V N(d) - B N(d - sigma sqrt(t_m)).
double call_value(double assets, double debt, double sigma, double t_m);
double call_d(double assets, double debt, double sigma, double t_m);

// Unique V > 0 with call_value(V) = equity, to relative tolerance 1e-10.
// The root lies in [E, E + B]; the bracket is widened if rounding says
// otherwise. Throws NumericalFailure if no sign change is found.
double invert_equity_to_asset(double equity, double debt, double sigma, double t_m);

struct DriftParams {
    double mu0 = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
};

struct LikelihoodSetup {
    double r = 0.0;
    double alpha = 0.0;
    double t_m = 1.0;
    double dt_obs = 1.0 / 250.0;
};

// Transformed-data log-likelihood of the equity series. The regime drift of
// step t is mu0 when V_{t-1}/B_{t-1} > alpha and mu otherwise. Returns -inf
// when an inversion fails. Throws InvalidParameters if theta violates the
// drift constraints.
double log_likelihood(std::span<const double> equity, std::span<const double> debt, const DriftParams& theta,
                      const LikelihoodSetup& setup);

// Implied asset values for the given sigma.
std::vector<double> implied_assets(std::span<const double> equity, std::span<const double> debt, double sigma,
                                   double t_m);

struct MleFit {
    DriftParams estimate;
    DriftParams std_error;
    double loglik = 0.0;
    bool single_drift = false;  // no observation on one side of alpha: mu0 = mu
    std::size_t above_alpha = 0;  // steps whose start leverage exceeds alpha
    std::vector<double> assets;   // implied assets at the estimate
};

// Simplex maximization with a constraint penalty, five deterministic starts,
// standard errors from the central-difference Hessian. Throws InputError for
// fewer than 100 observations or constant equity and CalibrationInfeasible
// when no start yields a finite likelihood.
MleFit fit_mle(std::span<const double> equity, std::span<const double> debt, const LikelihoodSetup& setup);

struct RdCalibration {
    double r_d = 0.0;
    ProbabilityEstimate dp5;
    std::size_t evaluations = 0;
    double kd_floor = 0.0;  // lower bound of K^D at this r_d and w
    bool feasible = false;  // kd_floor >= 0
    DefaultSampleSet samples;
};

struct RdSearch {
    double r_min = 0.5;
    double dp_horizon = 5.0;
    double tolerance = 0.002;  // effective tolerance is max(this, 1 s.e.)
    int max_iterations = 60;
};

// Bisection on r_d against a target default probability with common random
// numbers: last passage times are drawn once and the clock reuses its streams.
// The upper end starts at alpha(1 - 1e-6) and backs off to at most 8% below
// alpha while the clock sampler fails there.
// `model` supplies every parameter except r_d. Throws CalibrationInfeasible
// if the target lies outside the DP range of the bracket.
RdCalibration calibrate_rd(const LeverageModel& model, const SimConfig& cfg, double target_dp5,
                           const RdSearch& search = {});

struct CalibrationInput {
    MarketSeries series;
    double r = 0.0;
    double target_dp5 = 0.0;
    std::vector<double> alpha_grid;
    SimConfig sim;
    double t_m = 1.0;
    double dt_obs = 1.0 / 250.0;
};

struct AlphaCandidate {
    double alpha = 0.0;
    bool feasible = false;
    std::string failure;  // reason when not feasible
    MleFit mle;
    RdCalibration rd;
    ModelParams params;
    double residual = 0.0;  // |achieved DP - target|
};

struct CalibrationResult {
    ModelParams params;
    DriftParams std_errors;
    ProbabilityEstimate achieved_dp5;
    std::vector<double> implied_assets;
    double loglik = 0.0;
    bool feasible = false;
    bool single_drift = false;
    std::vector<AlphaCandidate> candidates;
    DefaultSampleSet samples;
};

// Runs the MLE and r_d search for one alpha.
AlphaCandidate calibrate_alpha(const CalibrationInput& input, double alpha);

// Feasible candidate with the smallest DP residual; ties go to the smaller
// alpha. Throws CalibrationInfeasible listing the per-alpha reasons.
CalibrationResult select_alpha(const CalibrationInput& input);

}  // namespace lgd
