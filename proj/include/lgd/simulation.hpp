#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lgd/laplace.hpp"
#include "lgd/model.hpp"
#include "lgd/rng.hpp"

namespace lgd {

struct SimConfig {
    std::size_t n_paths = 10000;
    double horizon = 50.0;       // years covered by grid paths
    double dt = 1e-3;            // grid step for leverage paths (years)
    std::uint64_t seed = 20211001;
    double oracle_eps = 1e-3;    // oracle start distance below alpha* (normalized units)
    double oracle_dt = 1e-3;     // oracle step away from the entrance boundary
    TauGridConfig tau_grid;
    double max_failure_rate = 1e-3;
};

// Throws DomainError unless n_paths >= 1, 0 < dt <= 1/250, horizon >= 5.
void validate(const SimConfig& cfg);

struct DefaultSample {
    double l_alpha = 0.0;  // last passage time of alpha (years)
    double tau = 0.0;      // default clock after l_alpha (years)
    RecoveryRatio recovery;
    double xi = 0.0;       // l_alpha + tau
    double kd = 0.0;       // loss rate of total debt
};

// ln(V_t/B_t) on the grid t_k = k*dt, k = 0..horizon/dt. Increments are
// Gaussian with the drift of the regime occupied at the start of the step
// (leverage <= alpha selects mu).
std::vector<double> simulate_log_leverage_path(const LeverageModel& model, const SimConfig& cfg,
                                               RngStream& rng);

// Last time the grid path changes side of ln(alpha), linearly interpolated
// inside the step; 0 if it never does. Throws NumericalFailure if the path
// ends above the level (horizon too short to decide).
double last_passage_from_path(std::span<const double> log_path, double dt, double alpha);

// Closed-form law of L_alpha when mu0 == mu: an atom at zero plus the density
// |nu|/(sigma sqrt(2 pi t)) exp(-(a - z0 - nu t)^2 / (2 sigma^2 t)).
class LastPassageLaw {
public:
    // Throws DomainError when mu0 != mu.
    explicit LastPassageLaw(const LeverageModel& model);

    double atom() const { return atom_; }
    double density(double t) const;
    // P(L_alpha <= t), atom included.
    double cdf(double t) const;
    // Inverse transform; u below the atom maps to 0.
    double sample(double u) const;

private:
    double nu_;
    double sigma_;
    double h_;  // ln(alpha) - ln(x0)
    double atom_;
};

// Throws DomainError when mu0 != mu.
LastPassageLaw lpt_atom_and_density(const LeverageModel& model);

// Path-based L_alpha draw valid for any mu0 >= mu. Below alpha the leverage is
// a plain GBM, so whether it ever returns to alpha, and when, is drawn
// exactly; above alpha the descent time is exact as well. Only the single
// grid step leaving alpha is discretized.
double sample_last_passage_path(const LeverageModel& model, double dt, RngStream& rng);

// Inverse-Gaussian draw (mean, shape).
double sample_inverse_gaussian(double mean, double shape, RngStream& rng);

struct ClockDraw {
    RecoveryRatio recovery;
    double tau = 0.0;
    std::size_t failures = 0;  // inversion failures that forced a recovery redraw
};

// Draws L_alpha and (recovery, tau) from independent substreams of
// (seed, path index), so the two halves can be re-drawn separately with
// common random numbers.
class DefaultTimeSampler {
public:
    DefaultTimeSampler(const LeverageModel& model, const SimConfig& cfg);

    const LeverageModel& model() const { return model_; }
    const SimConfig& config() const { return cfg_; }

    double sample_last_passage(std::size_t path) const;
    ClockDraw sample_clock(const LeverageModel& model, std::size_t path) const;
    DefaultSample assemble(const LeverageModel& model, double l_alpha, const ClockDraw& clock) const;

private:
    LeverageModel model_;
    SimConfig cfg_;
    std::optional<LastPassageLaw> lpt_;  // engaged when mu0 == mu
};

struct DefaultSampleSet {
    std::vector<DefaultSample> samples;
    std::size_t failures = 0;
};

DefaultSample sample_default_time(const LeverageModel& model, const SimConfig& cfg, std::size_t path);

// cfg.n_paths assembled samples, computed in parallel. Throws NumericalFailure
// if redraws exceed cfg.max_failure_rate of the paths.
DefaultSampleSet sample_default_times(const LeverageModel& model, const SimConfig& cfg);

// Same, reusing precomputed last passage times (common random numbers across
// r_d values).
DefaultSampleSet sample_default_times(const DefaultTimeSampler& sampler, const LeverageModel& model,
                                      std::span<const double> l_alpha);

struct ProbabilityEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

ProbabilityEstimate default_probability(std::span<const DefaultSample> samples, double horizon);

struct OracleDraw {
    double tau = 0.0;
    double ratio = 0.0;  // (Y/B) at tau
};

// Brute-force reference: Euler simulation of the conditioned process started
// oracle_eps below alpha*, killed when its occupation time below d reaches an
// independent unit exponential.
std::vector<OracleDraw> oracle_occupation_time(const LeverageModel& model, const SimConfig& cfg);

}  // namespace lgd
