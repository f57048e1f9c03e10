#include "lgd/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "lgd/errors.hpp"

namespace lgd {

namespace {

template <class Fn>
auto stage(const std::string& name, Fn&& fn) {
    const std::string prefix = name + ": ";
    try {
        return fn();
    } catch (const InputError& e) {
        throw InputError(prefix + e.what());
    } catch (const CalibrationInfeasible& e) {
        throw CalibrationInfeasible(prefix + e.what());
    } catch (const InvalidParameters& e) {
        throw InvalidParameters(prefix + e.what());
    } catch (const DomainError& e) {
        throw DomainError(prefix + e.what());
    } catch (const NumericalFailure& e) {
        throw NumericalFailure(prefix + e.what());
    }
}

void price_and_report(RunArtifact& art, const std::vector<double>& w_grid) {
    const LeverageModel model(art.params);
    art.dp5 = default_probability(art.samples.samples, 5.0);
    const auto zeros = std::count_if(art.samples.samples.begin(), art.samples.samples.end(),
                                     [](const DefaultSample& s) { return s.l_alpha == 0.0; });
    art.atom_sample = static_cast<double>(zeros) / static_cast<double>(art.samples.samples.size());
    if (model.single_drift()) {
        art.atom_closed_form = LastPassageLaw(model).atom();
    }
    art.lalpha_density = stage("last passage density", [&] { return last_passage_density(model, art.samples.samples); });
    art.tau_density = stage("tau density", [&] { return tabulate_tau_density(model, art.sim.tau_grid); });
    art.lgd = stage("lgd distribution", [&] { return lgd_distribution(model); });
    art.cds = stage("cds pricing", [&] { return price_cds(art.samples.samples, art.terms); });
    std::vector<double> grid = w_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (double w : grid) {
        const auto shifted = with_long_share(art.samples.samples, w);
        art.w_sweep.push_back({w, stage("cds pricing", [&] { return price_cds(shifted, art.terms); })});
    }
}

}  // namespace

DensityTable last_passage_density(const LeverageModel& model, std::span<const DefaultSample> samples) {
    constexpr std::size_t kPoints = 2001;
    DensityTable out;
    if (model.single_drift()) {
        const LastPassageLaw law(model);
        const double positive = 1.0 - law.atom();
        if (!(positive > 0.0)) {
            throw NumericalFailure("last passage time is zero almost surely");
        }
        // Origin plus a geometric grid up to the 1 - 1e-6 quantile of the
        // positive part; the tail is long (thousands of years at the
        // published estimates) while the mass sits at a few years.
        const double t_hi = law.sample(law.atom() + positive * (1.0 - 1e-6));
        out.x.push_back(0.0);
        out.density.push_back(0.0);
        for (double t : geometric_grid(t_hi * 1e-6, t_hi, kPoints - 1)) {
            out.x.push_back(t);
            out.density.push_back(law.density(t) / positive);
        }
        return out;
    }
    std::vector<double> positive;
    for (const DefaultSample& s : samples) {
        if (s.l_alpha > 0.0) {
            positive.push_back(s.l_alpha);
        }
    }
    if (positive.size() < 2) {
        throw NumericalFailure("too few positive last passage samples for a histogram");
    }
    std::sort(positive.begin(), positive.end());
    const double t_hi = positive.back();
    const std::size_t bins = std::clamp<std::size_t>(static_cast<std::size_t>(std::sqrt(positive.size())), 10, 200);
    const double width = t_hi / static_cast<double>(bins);
    std::vector<double> counts(bins, 0.0);
    for (double t : positive) {
        counts[std::min(bins - 1, static_cast<std::size_t>(t / width))] += 1.0;
    }
    const double scale = 1.0 / (static_cast<double>(positive.size()) * width);
    for (std::size_t b = 0; b < bins; ++b) {
        out.x.push_back((static_cast<double>(b) + 0.5) * width);
        out.density.push_back(counts[b] * scale);
    }
    return out;
}

RunArtifact run_fixed(const ModelParams& params, const FixedRunOptions& options) {
    RunArtifact art;
    art.mode = "fixed";
    art.params = params;
    art.sim = options.sim;
    art.terms = options.terms;
    const LeverageModel model = stage("parameters", [&] { return LeverageModel(params); });
    art.samples = stage("default time sampling", [&] { return sample_default_times(model, art.sim); });
    price_and_report(art, options.w_grid);
    return art;
}

RunArtifact run_pipeline(const LoadedInputs& inputs) {
    const RunConfig& cfg = inputs.config;
    stage("configuration", [&] {
        validate(cfg);
        return 0;
    });
    CalibrationInput input;
    input.series = inputs.series;
    input.r = cfg.r;
    input.target_dp5 = cfg.target_dp5;
    input.alpha_grid = cfg.alpha_grid;
    input.sim.n_paths = cfg.n_paths;
    input.sim.seed = cfg.seed;
    input.sim.dt = cfg.sim_dt;
    input.t_m = cfg.t_m;
    input.dt_obs = cfg.dt_obs;
    stage("configuration", [&] {
        validate(input.sim);
        return 0;
    });

    CalibrationResult cal = stage("calibration", [&] { return select_alpha(input); });

    RunArtifact art;
    art.mode = "calibrate";
    art.params = cal.params;
    art.std_errors = cal.std_errors;
    art.sim = input.sim;
    art.terms = {cfg.r, cfg.cds_maturity, cfg.cds_frequency};
    CalibrationSummary summary;
    summary.target_dp5 = cfg.target_dp5;
    summary.window_start = format_date(inputs.series.dates.front());
    summary.window_end = format_date(inputs.series.dates.back());
    summary.observations = inputs.series.size();
    summary.loglik = cal.loglik;
    summary.single_drift = cal.single_drift;
    summary.candidates = cal.candidates;
    for (auto& c : summary.candidates) {
        c.rd.samples = {};
        c.mle.assets.clear();
    }
    art.calibration = std::move(summary);
    // The last bisection evaluation already holds the samples at the chosen r_d.
    art.samples = std::move(cal.samples);
    price_and_report(art, cfg.w_grid);
    return art;
}

}  // namespace lgd
