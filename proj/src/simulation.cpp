#include "lgd/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "lgd/errors.hpp"
#include "lgd/loss.hpp"
#include "lgd/parallel.hpp"

namespace lgd {

namespace {

// Substream channels of a path.
constexpr std::uint64_t kLastPassageChannel = 0;
constexpr std::uint64_t kClockChannel = 1;
constexpr std::uint64_t kOracleChannel = 2;

constexpr int kMaxClockRedraws = 20;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// exp(log_scale) * Phi(x) without forming inf * 0.
double scaled_normal_cdf(double log_scale, double x) {
    const double phi = normal_cdf(x);
    return phi == 0.0 ? 0.0 : std::exp(log_scale + std::log(phi));
}

}  // namespace

void validate(const SimConfig& cfg) {
    if (cfg.n_paths < 1) {
        throw DomainError("n_paths must be at least 1");
    }
    if (!(cfg.dt > 0.0) || cfg.dt > 1.0 / 250.0) {
        throw DomainError("dt must lie in (0, 1/250]");
    }
    if (!(cfg.horizon >= 5.0)) {
        throw DomainError("horizon must be at least 5 years");
    }
    if (!(cfg.oracle_eps > 0.0) || !(cfg.oracle_dt > 0.0)) {
        throw DomainError("oracle_eps and oracle_dt must be positive");
    }
}

std::vector<double> simulate_log_leverage_path(const LeverageModel& model, const SimConfig& cfg,
                                               RngStream& rng) {
    validate(cfg);
    const ModelParams& p = model.params();
    const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
    const double level = std::log(p.alpha);
    const double above = model.drift_above() * cfg.dt;
    const double below = model.drift_below() * cfg.dt;
    const double vol = p.sigma * std::sqrt(cfg.dt);
    std::vector<double> path(steps + 1);
    path[0] = std::log(p.x0);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double z = path[k - 1];
        path[k] = z + (z > level ? above : below) + vol * rng.normal();
    }
    return path;
}

double last_passage_from_path(std::span<const double> log_path, double dt, double alpha) {
    if (log_path.empty() || !(dt > 0.0) || !(alpha > 0.0)) {
        throw DomainError("last_passage_from_path needs a nonempty path, dt > 0 and alpha > 0");
    }
    const double level = std::log(alpha);
    if (log_path.back() >= level) {
        throw NumericalFailure("path ends at or above alpha; horizon too short to fix L_alpha");
    }
    for (std::size_t k = log_path.size() - 1; k > 0; --k) {
        const double prev = log_path[k - 1];
        const double cur = log_path[k];
        if (prev == level) {
            return static_cast<double>(k - 1) * dt;
        }
        if ((prev > level) != (cur > level)) {
            const double frac = (prev - level) / (prev - cur);
            return (static_cast<double>(k - 1) + frac) * dt;
        }
    }
    return 0.0;
}

LastPassageLaw::LastPassageLaw(const LeverageModel& model)
    : nu_(model.drift_below()),
      sigma_(model.params().sigma),
      h_(std::log(model.params().alpha) - std::log(model.params().x0)) {
    if (!model.single_drift()) {
        throw DomainError("closed-form last passage law requires mu0 == mu");
    }
    atom_ = h_ > 0.0 ? -std::expm1(2.0 * nu_ * h_ / (sigma_ * sigma_)) : 0.0;
}

double LastPassageLaw::density(double t) const {
    if (!(t > 0.0)) {
        return 0.0;
    }
    const double dev = h_ - nu_ * t;
    return std::abs(nu_) / (sigma_ * std::sqrt(2.0 * M_PI * t)) *
           std::exp(-dev * dev / (2.0 * sigma_ * sigma_ * t));
}

double LastPassageLaw::cdf(double t) const {
    if (!(t > 0.0)) {
        return atom_;
    }
    // Integral of the density in closed form, in units where sigma = 1:
    // with A = Phi((nu t - h)/sqrt t) and B = exp(2 nu h) Phi((-nu t - h)/sqrt t),
    // the mass on (0, t] is B - A for h >= 0 and (1 - A) - (exp(2 nu h) - B)
    // for h < 0.
    const double nu = nu_ / sigma_;
    const double h = h_ / sigma_;
    const double rt = std::sqrt(t);
    const double log_scale = 2.0 * nu * h;
    double positive = 0.0;
    if (h >= 0.0) {
        positive = scaled_normal_cdf(log_scale, (-nu * t - h) / rt) - normal_cdf((nu * t - h) / rt);
    } else {
        positive = normal_cdf((h - nu * t) / rt) - scaled_normal_cdf(log_scale, (nu * t + h) / rt);
    }
    return std::clamp(atom_ + positive, atom_, 1.0);
}

double LastPassageLaw::sample(double u) const {
    if (!(u > 0.0) || !(u < 1.0)) {
        throw DomainError("uniform draw must lie in (0, 1)");
    }
    if (u <= atom_) {
        return 0.0;
    }
    // Solve in ln t; the cdf is continuous and strictly increasing on t > 0.
    const auto f = [&](double s) { return cdf(std::exp(s)) - u; };
    double lo = -20.0;
    double hi = 2.0;
    while (f(lo) > 0.0) {
        lo -= 20.0;
        if (lo < -200.0) {
            return 0.0;
        }
    }
    while (f(hi) < 0.0) {
        hi += 2.0;
        if (hi > 40.0) {
            throw NumericalFailure("last passage quantile beyond bracket");
        }
    }
    std::uintmax_t max_iter = 200;
    const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12; };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f(lo), f(hi), tol, max_iter);
    return std::exp(0.5 * (a + b));
}

LastPassageLaw lpt_atom_and_density(const LeverageModel& model) { return LastPassageLaw(model); }

double sample_inverse_gaussian(double mean, double shape, RngStream& rng) {
    const double n = rng.normal();
    const double y = n * n;
    const double x = mean + mean * mean * y / (2.0 * shape) -
                     mean / (2.0 * shape) * std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
    return rng.uniform() <= mean / (mean + x) ? x : mean * mean / x;
}

double sample_last_passage_path(const LeverageModel& model, double dt, RngStream& rng) {
    const ModelParams& p = model.params();
    const double level = std::log(p.alpha);
    const double var = p.sigma * p.sigma;
    const double nu_below = model.drift_below();
    const double nu_above = model.drift_above();
    const double vol = p.sigma * std::sqrt(dt);
    double z = std::log(p.x0);
    double t = 0.0;
    double last = 0.0;
    for (;;) {
        if (z < level) {
            // Below alpha the log-leverage is Brownian with drift nu_below < 0:
            // it ever reaches alpha with probability exp(2 nu h / sigma^2), and
            // given that it does, the hitting time is inverse Gaussian.
            const double h = level - z;
            if (rng.uniform() >= std::exp(2.0 * nu_below * h / var)) {
                return last;
            }
            t += sample_inverse_gaussian(h / std::abs(nu_below), h * h / var, rng);
            z = level;
            last = t;
        } else if (z > level) {
            const double h = z - level;
            t += sample_inverse_gaussian(h / std::abs(nu_above), h * h / var, rng);
            z = level;
            last = t;
        }
        // At the level: one grid step decides which side the path leaves to.
        z = level + nu_below * dt + vol * rng.normal();
        t += dt;
    }
}

DefaultTimeSampler::DefaultTimeSampler(const LeverageModel& model, const SimConfig& cfg)
    : model_(model), cfg_(cfg) {
    validate(cfg_);
    if (model_.single_drift()) {
        lpt_.emplace(model_);
    }
}

double DefaultTimeSampler::sample_last_passage(std::size_t path) const {
    RngStream rng(cfg_.seed, path, kLastPassageChannel);
    if (lpt_) {
        return lpt_->sample(rng.uniform());
    }
    return sample_last_passage_path(model_, cfg_.dt, rng);
}

ClockDraw DefaultTimeSampler::sample_clock(const LeverageModel& model, std::size_t path) const {
    RngStream rng(cfg_.seed, path, kClockChannel);
    const double r_d = model.params().r_d;
    ClockDraw draw;
    for (int attempt = 0; attempt < kMaxClockRedraws; ++attempt) {
        const double u_recovery = rng.uniform();
        const double u_tau = rng.uniform();
        RecoveryRatio recovery = sample_recovery(model, u_recovery);
        // The conditional law needs R strictly inside (0, r_d).
        recovery.value = std::min(recovery.value, r_d * (1.0 - 1e-12));
        try {
            draw.tau = sample_tau_given_recovery(model, recovery, u_tau, cfg_.tau_grid);
            draw.recovery = recovery;
            return draw;
        } catch (const NumericalFailure&) {
            ++draw.failures;
        }
    }
    throw NumericalFailure("default clock sampling failed " + std::to_string(kMaxClockRedraws) +
                           " times on path " + std::to_string(path));
}

DefaultSample DefaultTimeSampler::assemble(const LeverageModel& model, double l_alpha,
                                           const ClockDraw& clock) const {
    DefaultSample s;
    s.l_alpha = l_alpha;
    s.tau = clock.tau;
    s.recovery = clock.recovery;
    s.xi = l_alpha + clock.tau;
    s.kd = loss_kd(loss_kb(clock.recovery.value), model.params().w);
    return s;
}

DefaultSample sample_default_time(const LeverageModel& model, const SimConfig& cfg, std::size_t path) {
    const DefaultTimeSampler sampler(model, cfg);
    return sampler.assemble(model, sampler.sample_last_passage(path), sampler.sample_clock(model, path));
}

DefaultSampleSet sample_default_times(const DefaultTimeSampler& sampler, const LeverageModel& model,
                                      std::span<const double> l_alpha) {
    const std::size_t n = l_alpha.size();
    DefaultSampleSet out;
    out.samples.resize(n);
    std::vector<std::size_t> failures(n, 0);
    parallel_for(n, [&](std::size_t i) {
        const ClockDraw clock = sampler.sample_clock(model, i);
        failures[i] = clock.failures;
        out.samples[i] = sampler.assemble(model, l_alpha[i], clock);
    });
    for (std::size_t f : failures) {
        out.failures += f;
    }
    if (static_cast<double>(out.failures) > sampler.config().max_failure_rate * static_cast<double>(n)) {
        throw NumericalFailure("default clock redraws (" + std::to_string(out.failures) +
                               ") exceed the allowed failure rate");
    }
    return out;
}

DefaultSampleSet sample_default_times(const LeverageModel& model, const SimConfig& cfg) {
    const DefaultTimeSampler sampler(model, cfg);
    std::vector<double> l_alpha(cfg.n_paths);
    parallel_for(cfg.n_paths, [&](std::size_t i) { l_alpha[i] = sampler.sample_last_passage(i); });
    return sample_default_times(sampler, model, l_alpha);
}

ProbabilityEstimate default_probability(std::span<const DefaultSample> samples, double horizon) {
    if (samples.empty()) {
        throw DomainError("default probability needs at least one sample");
    }
    const auto hits = std::count_if(samples.begin(), samples.end(),
                                    [horizon](const DefaultSample& s) { return s.xi <= horizon; });
    const double n = static_cast<double>(samples.size());
    const double p = static_cast<double>(hits) / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
}

std::vector<OracleDraw> oracle_occupation_time(const LeverageModel& model, const SimConfig& cfg) {
    validate(cfg);
    const ModelParams& p = model.params();
    const double am = model.abs_m();
    const double gap = model.gap();
    if (!(cfg.oracle_eps < gap)) {
        throw DomainError("oracle_eps must be smaller than alpha* - d");
    }
    std::vector<OracleDraw> out(cfg.n_paths);
    parallel_for(cfg.n_paths, [&](std::size_t i) {
        RngStream rng(cfg.seed, i, kOracleChannel);
        const double clock = rng.exponential();
        // x is the distance alpha* - X of the normalized log-leverage from the
        // entrance boundary; its drift |m| coth(|m| x) pushes it away from 0.
        double x = cfg.oracle_eps;
        double t = 0.0;
        double occupied = 0.0;
        for (;;) {
            double h = cfg.oracle_dt;
            while (h > 0.05 * x * x && h > 1e-12) {
                h *= 0.5;
            }
            const double drift = am / std::tanh(am * x);
            double next = x + drift * h + std::sqrt(h) * rng.normal();
            for (int retry = 0; next <= 0.0 && retry < 30; ++retry) {
                h *= 0.5;
                next = x + drift * h + std::sqrt(h) * rng.normal();
            }
            if (x >= gap) {
                if (occupied + h >= clock) {
                    out[i] = {t + (clock - occupied), p.alpha * std::exp(-p.sigma * x)};
                    return;
                }
                occupied += h;
            }
            x = std::abs(next);
            t += h;
        }
    });
    return out;
}

}  // namespace lgd
