#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lgd/calibration.hpp"
#include "lgd/laplace.hpp"
#include "lgd/market.hpp"
#include "lgd/pricing.hpp"
#include "lgd/simulation.hpp"

namespace lgd {

struct WQuote {
    double w = 0.0;
    CdsQuote quote;
};

// Two-column density table.
struct DensityTable {
    std::vector<double> x;
    std::vector<double> density;
};

struct CalibrationSummary {
    double target_dp5 = 0.0;
    std::string window_start;
    std::string window_end;
    std::size_t observations = 0;
    double loglik = 0.0;
    bool single_drift = false;
    std::vector<AlphaCandidate> candidates;  // samples dropped
};

struct RunArtifact {
    std::string mode;  // "fixed" or "calibrate"
    ModelParams params;
    std::optional<DriftParams> std_errors;
    std::optional<CalibrationSummary> calibration;
    SimConfig sim;
    CdsTerms terms;
    ProbabilityEstimate dp5;
    std::optional<double> atom_closed_form;  // mu0 == mu only
    double atom_sample = 0.0;
    DensityTable lalpha_density;  // L_alpha given L_alpha > 0
    TabulatedDistribution tau_density;
    LgdReport lgd;
    CdsQuote cds;
    std::vector<WQuote> w_sweep;
    DefaultSampleSet samples;
};

struct FixedRunOptions {
    SimConfig sim;
    CdsTerms terms;
    std::vector<double> w_grid;
};

// Sampling, loss distribution and pricing with injected parameters
// (r_d included).
RunArtifact run_fixed(const ModelParams& params, const FixedRunOptions& options);

// Calibration, sampling and pricing from market data. Errors keep their
// type and gain the name of the failing stage.
RunArtifact run_pipeline(const LoadedInputs& inputs);

// Density of L_alpha on (0, t_hi] given L_alpha > 0: closed form when
// mu0 == mu, otherwise a histogram of the sampled positive values.
DensityTable last_passage_density(const LeverageModel& model, std::span<const DefaultSample> samples);

}  // namespace lgd
