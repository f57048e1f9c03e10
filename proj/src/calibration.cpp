#include "lgd/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_linalg.h>
#include <gsl/gsl_multimin.h>

#include "lgd/errors.hpp"
#include "lgd/loss.hpp"
#include "lgd/parallel.hpp"

namespace lgd {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr std::size_t kMinObservations = 100;
constexpr double kPenaltyWeight = 1e6;
constexpr double kConstraintMargin = 1e-9;
constexpr double kHessianStep = 1e-4;

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double log_norm_cdf(double x) { return std::log(norm_cdf(x)); }

// Highest drift satisfying mu - sigma^2/2 - r < 0.
double drift_cap(double sigma, double r) { return 0.5 * sigma * sigma + r - kConstraintMargin; }

void check_constraints(const DriftParams& th, double r) {
    if (!(th.sigma > 0.0) || !std::isfinite(th.mu0) || !std::isfinite(th.mu)) {
        throw InvalidParameters("sigma must be positive and drifts finite");
    }
    const double half_var = 0.5 * th.sigma * th.sigma;
    if (!(th.mu0 >= th.mu) || !(th.mu0 - half_var - r < 0.0) || !(th.mu - half_var - r < 0.0)) {
        throw InvalidParameters("drifts violate mu0 >= mu and mu - sigma^2/2 - r < 0");
    }
}

struct Inversion {
    std::vector<double> assets;
    bool ok = true;
};

Inversion invert_series(std::span<const double> equity, std::span<const double> debt, double sigma, double t_m) {
    Inversion out;
    out.assets.resize(equity.size());
    for (std::size_t i = 0; i < equity.size(); ++i) {
        try {
            out.assets[i] = invert_equity_to_asset(equity[i], debt[i], sigma, t_m);
        } catch (const Error&) {
            out.ok = false;
            return out;
        }
    }
    return out;
}

// Likelihood without the constraint check, used inside the Hessian stencil.
double loglik_unchecked(std::span<const double> equity, std::span<const double> debt, const DriftParams& th,
                        const LikelihoodSetup& s) {
    if (!(th.sigma > 0.0)) {
        return -std::numeric_limits<double>::infinity();
    }
    const Inversion inv = invert_series(equity, debt, th.sigma, s.t_m);
    if (!inv.ok) {
        return -std::numeric_limits<double>::infinity();
    }
    const std::size_t n = equity.size();
    const double var_dt = th.sigma * th.sigma * s.dt_obs;
    const double nm1 = static_cast<double>(n - 1);
    double ll = -0.5 * nm1 * std::log(2.0 * M_PI) - 0.5 * nm1 * std::log(var_dt);
    double sq = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        const double v = inv.assets[t];
        const double prev = inv.assets[t - 1];
        ll -= std::log(v);
        ll -= log_norm_cdf(call_d(v, debt[t], th.sigma, s.t_m));
        const double drift = prev / debt[t - 1] > s.alpha ? th.mu0 : th.mu;
        const double resid = std::log(v / prev) - (drift - 0.5 * th.sigma * th.sigma) * s.dt_obs;
        sq += resid * resid;
    }
    ll -= sq / (2.0 * var_dt);
    return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
}

std::size_t count_above(std::span<const double> assets, std::span<const double> debt, double alpha) {
    std::size_t above = 0;
    for (std::size_t t = 0; t + 1 < assets.size(); ++t) {
        above += assets[t] / debt[t] > alpha ? 1 : 0;
    }
    return above;
}

// Search coordinates: (mu, ln sigma) or (mu0, mu, ln sigma).
struct Problem {
    std::span<const double> equity;
    std::span<const double> debt;
    LikelihoodSetup setup;
    bool single = true;

    std::size_t dim() const { return single ? 2 : 3; }

    DriftParams unpack(const double* x) const {
        if (single) {
            return {x[0], x[0], std::exp(x[1])};
        }
        return {x[0], x[1], std::exp(x[2])};
    }

    // Nearest point of the feasible set (coordinate-wise) and the squared
    // distance to it in search coordinates.
    std::pair<DriftParams, double> project(const DriftParams& th) const {
        DriftParams p = th;
        const double cap = drift_cap(p.sigma, setup.r);
        p.mu = std::min(p.mu, cap);
        p.mu0 = single ? p.mu : std::clamp(p.mu0, p.mu, cap);
        const double dist = (p.mu - th.mu) * (p.mu - th.mu) + (single ? 0.0 : (p.mu0 - th.mu0) * (p.mu0 - th.mu0));
        return {p, dist};
    }

    double objective(const double* x) const {
        const auto [p, dist] = project(unpack(x));
        const double ll = loglik_unchecked(equity, debt, p, setup);
        if (!std::isfinite(ll)) {
            return 1e100;
        }
        return -ll + kPenaltyWeight * dist;
    }
};

double gsl_objective(const gsl_vector* x, void* params) {
    return static_cast<const Problem*>(params)->objective(x->data);
}

struct SimplexResult {
    DriftParams theta;
    double loglik = -std::numeric_limits<double>::infinity();
};

SimplexResult run_simplex(const Problem& prob, const std::vector<double>& start, const std::vector<double>& step) {
    const std::size_t n = prob.dim();
    gsl_multimin_function fn{&gsl_objective, n, const_cast<Problem*>(&prob)};
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> solver(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), &gsl_multimin_fminimizer_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), &gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(n), &gsl_vector_free);
    for (std::size_t i = 0; i < n; ++i) {
        gsl_vector_set(x.get(), i, start[i]);
        gsl_vector_set(ss.get(), i, step[i]);
    }
    gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), ss.get());
    for (int iter = 0; iter < 5000; ++iter) {
        if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) {
            break;
        }
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver.get()), 1e-9) == GSL_SUCCESS) {
            break;
        }
    }
    SimplexResult out;
    out.theta = prob.project(prob.unpack(solver->x->data)).first;
    out.loglik = loglik_unchecked(prob.equity, prob.debt, out.theta, prob.setup);
    return out;
}

// Standard errors from the inverse of minus the central-difference Hessian
// in (mu0, mu, sigma), or (mu, sigma) for a single drift. NaN when the
// Hessian is not negative definite.
DriftParams hessian_std_errors(const Problem& prob, const DriftParams& est) {
    const std::size_t n = prob.dim();
    std::vector<double> theta = prob.single ? std::vector<double>{est.mu, est.sigma}
                                            : std::vector<double>{est.mu0, est.mu, est.sigma};
    const auto ll = [&](const std::vector<double>& th) {
        const DriftParams p = prob.single ? DriftParams{th[0], th[0], th[1]} : DriftParams{th[0], th[1], th[2]};
        return loglik_unchecked(prob.equity, prob.debt, p, prob.setup);
    };
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
        h[i] = kHessianStep * std::max(std::abs(theta[i]), 1.0);
    }
    const double f0 = ll(theta);
    std::unique_ptr<gsl_matrix, decltype(&gsl_matrix_free)> info(gsl_matrix_alloc(n, n), &gsl_matrix_free);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double value = 0.0;
            if (i == j) {
                auto up = theta;
                auto dn = theta;
                up[i] += h[i];
                dn[i] -= h[i];
                value = (ll(up) - 2.0 * f0 + ll(dn)) / (h[i] * h[i]);
            } else {
                std::array<double, 4> f{};
                const std::array<std::pair<double, double>, 4> signs{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
                for (std::size_t k = 0; k < 4; ++k) {
                    auto th = theta;
                    th[i] += signs[k].first * h[i];
                    th[j] += signs[k].second * h[j];
                    f[k] = ll(th);
                }
                value = (f[0] - f[1] - f[2] + f[3]) / (4.0 * h[i] * h[j]);
            }
            gsl_matrix_set(info.get(), i, j, -value);
            gsl_matrix_set(info.get(), j, i, -value);
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    DriftParams se{nan, nan, nan};
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    const int status = gsl_linalg_cholesky_decomp1(info.get());
    if (status == GSL_SUCCESS) {
        gsl_linalg_cholesky_invert(info.get());
        std::vector<double> sd(n);
        for (std::size_t i = 0; i < n; ++i) {
            sd[i] = std::sqrt(gsl_matrix_get(info.get(), i, i));
        }
        se = prob.single ? DriftParams{sd[0], sd[0], sd[1]} : DriftParams{sd[0], sd[1], sd[2]};
    }
    gsl_set_error_handler(old);
    return se;
}

struct FitAttempt {
    SimplexResult best;
    bool found = false;
};

FitAttempt multi_start(const Problem& prob, const DriftParams& guess, double horizon) {
    // Spread of the drift estimate over the sample span, used to place starts.
    const double drift_scale = guess.sigma / std::sqrt(horizon);
    const std::array<std::array<double, 3>, 5> offsets{{
        {0.0, 0.0, 1.0},
        {0.0, -1.0, 0.7},
        {1.0, -0.5, 1.4},
        {0.5, 1.0, 0.85},
        {2.0, -2.0, 1.2},
    }};
    FitAttempt out;
    for (const auto& o : offsets) {
        DriftParams th{guess.mu + o[0] * drift_scale, guess.mu + o[1] * drift_scale, guess.sigma * o[2]};
        if (prob.single) {
            th.mu0 = th.mu;
        }
        th = prob.project(th).first;
        std::vector<double> start = prob.single ? std::vector<double>{th.mu, std::log(th.sigma)}
                                                : std::vector<double>{th.mu0, th.mu, std::log(th.sigma)};
        std::vector<double> step = prob.single ? std::vector<double>{drift_scale, 0.1}
                                               : std::vector<double>{drift_scale, drift_scale, 0.1};
        const SimplexResult r = run_simplex(prob, start, step);
        if (std::isfinite(r.loglik) && (!out.found || r.loglik > out.best.loglik)) {
            out.best = r;
            out.found = true;
        }
    }
    return out;
}

// Rough sigma from iterating the implied-asset volatility, and the matching
// drift, as the centre of the multi-start.
DriftParams initial_guess(std::span<const double> equity, std::span<const double> debt, const LikelihoodSetup& s) {
    const std::size_t n = equity.size();
    std::vector<double> assets(n);
    for (std::size_t i = 0; i < n; ++i) {
        assets[i] = equity[i] + debt[i];
    }
    double sigma = 0.0;
    double mean = 0.0;
    for (int iter = 0; iter < 6; ++iter) {
        std::vector<double> ret(n - 1);
        for (std::size_t t = 1; t < n; ++t) {
            ret[t - 1] = std::log(assets[t] / assets[t - 1]);
        }
        mean = std::accumulate(ret.begin(), ret.end(), 0.0) / static_cast<double>(ret.size());
        double ss = 0.0;
        for (double x : ret) {
            ss += (x - mean) * (x - mean);
        }
        sigma = std::sqrt(ss / static_cast<double>(ret.size() - 1) / s.dt_obs);
        if (!(sigma > 0.0)) {
            throw InputError("implied asset returns have zero variance");
        }
        const Inversion inv = invert_series(equity, debt, sigma, s.t_m);
        if (!inv.ok) {
            break;
        }
        assets = inv.assets;
    }
    const double mu = mean / s.dt_obs + 0.5 * sigma * sigma;
    return {mu, mu, sigma};
}

}  // namespace

double call_d(double assets, double debt, double sigma, double t_m) {
    const double vol = sigma * std::sqrt(t_m);
    return (std::log(assets / debt) + 0.5 * vol * vol) / vol;
}

double call_value(double assets, double debt, double sigma, double t_m) {
    const double vol = sigma * std::sqrt(t_m);
    const double d = call_d(assets, debt, sigma, t_m);
    return assets * norm_cdf(d) - debt * norm_cdf(d - vol);
}

double invert_equity_to_asset(double equity, double debt, double sigma, double t_m) {
    if (!(equity > 0.0) || !(debt > 0.0) || !(sigma > 0.0) || !(t_m > 0.0)) {
        throw DomainError("equity inversion needs E > 0, B > 0, sigma > 0, t_m > 0");
    }
    // max(V - B, 0) <= C(V) <= V, so the root lies in [E, E + B].
    const auto f = [&](double v) { return call_value(v, debt, sigma, t_m) - equity; };
    double lo = equity;
    double hi = equity + debt;
    for (int k = 0; f(hi) < 0.0; ++k) {
        if (k > 60) {
            throw NumericalFailure("could not bracket the asset value");
        }
        hi = equity + debt * std::ldexp(1.0, k + 1);
    }
    while (f(lo) > 0.0) {
        lo *= 0.5;
        if (lo < 1e-300) {
            throw NumericalFailure("could not bracket the asset value");
        }
    }
    // Newton from the upper end (C is increasing and convex, dC/dV = N(d)),
    // kept inside the bracket with bisection as a fallback.
    const double vol = sigma * std::sqrt(t_m);
    double v = hi;
    for (int iter = 0; iter < 200; ++iter) {
        const double d = call_d(v, debt, sigma, t_m);
        const double fv = v * norm_cdf(d) - debt * norm_cdf(d - vol) - equity;
        if (fv > 0.0) {
            hi = v;
        } else {
            lo = v;
        }
        const double slope = norm_cdf(d);
        double next = slope > 0.0 ? v - fv / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - v) <= 1e-13 * v || hi - lo <= 1e-12 * hi) {
            return next;
        }
        v = next;
    }
    throw NumericalFailure("asset value iteration did not converge");
}

std::vector<double> implied_assets(std::span<const double> equity, std::span<const double> debt, double sigma,
                                   double t_m) {
    if (equity.size() != debt.size()) {
        throw DomainError("equity and debt series differ in length");
    }
    std::vector<double> out(equity.size());
    for (std::size_t i = 0; i < equity.size(); ++i) {
        out[i] = invert_equity_to_asset(equity[i], debt[i], sigma, t_m);
    }
    return out;
}

double log_likelihood(std::span<const double> equity, std::span<const double> debt, const DriftParams& theta,
                      const LikelihoodSetup& setup) {
    if (equity.size() != debt.size() || equity.size() < 2) {
        throw DomainError("likelihood needs matching equity and debt series of length >= 2");
    }
    check_constraints(theta, setup.r);
    return loglik_unchecked(equity, debt, theta, setup);
}

MleFit fit_mle(std::span<const double> equity, std::span<const double> debt, const LikelihoodSetup& setup) {
    if (equity.size() != debt.size()) {
        throw InputError("equity and debt series differ in length");
    }
    if (equity.size() < kMinObservations) {
        throw InputError("maximum likelihood needs at least 100 observations");
    }
    const auto [lo, hi] = std::minmax_element(equity.begin(), equity.end());
    if (*lo == *hi) {
        throw InputError("equity series is constant");
    }
    const double horizon = static_cast<double>(equity.size() - 1) * setup.dt_obs;
    const DriftParams guess = initial_guess(equity, debt, setup);

    Problem single{equity, debt, setup, true};
    const FitAttempt one = multi_start(single, guess, horizon);
    if (!one.found) {
        throw CalibrationInfeasible("no start produced a finite likelihood");
    }
    MleFit fit;
    fit.estimate = one.best.theta;
    fit.loglik = one.best.loglik;
    fit.single_drift = true;
    Problem chosen = single;

    const auto assets_single = implied_assets(equity, debt, fit.estimate.sigma, setup.t_m);
    const std::size_t above = count_above(assets_single, debt, setup.alpha);
    if (above > 0 && above + 1 < equity.size()) {
        Problem full{equity, debt, setup, false};
        const FitAttempt two = multi_start(full, fit.estimate, horizon);
        if (two.found && two.best.loglik >= fit.loglik) {
            const auto assets_full = implied_assets(equity, debt, two.best.theta.sigma, setup.t_m);
            const std::size_t above_full = count_above(assets_full, debt, setup.alpha);
            if (above_full > 0 && above_full + 1 < equity.size()) {
                fit.estimate = two.best.theta;
                fit.loglik = two.best.loglik;
                fit.single_drift = false;
                chosen = full;
            }
        }
    }
    fit.assets = implied_assets(equity, debt, fit.estimate.sigma, setup.t_m);
    fit.above_alpha = count_above(fit.assets, debt, setup.alpha);
    fit.std_error = hessian_std_errors(chosen, fit.estimate);
    check_constraints(fit.estimate, setup.r);
    return fit;
}

RdCalibration calibrate_rd(const LeverageModel& model, const SimConfig& cfg, double target_dp5,
                           const RdSearch& search) {
    if (!(target_dp5 > 0.0 && target_dp5 < 1.0)) {
        throw DomainError("target default probability must lie in (0, 1)");
    }
    const double alpha = model.params().alpha;
    const double w = model.params().w;
    const DefaultTimeSampler sampler(model, cfg);
    std::vector<double> l_alpha(cfg.n_paths);
    parallel_for(cfg.n_paths, [&](std::size_t i) { l_alpha[i] = sampler.sample_last_passage(i); });

    RdCalibration out;
    const auto evaluate = [&](double r_d) {
        RdCalibration c;
        const LeverageModel m = model.with_r_d(r_d);
        c.r_d = r_d;
        c.samples = sample_default_times(sampler, m, l_alpha);
        c.dp5 = default_probability(c.samples.samples, search.dp_horizon);
        c.kd_floor = kd_lower_bound(r_d, w);
        c.feasible = c.kd_floor >= 0.0;
        ++out.evaluations;
        return c;
    };
    const auto converged = [&](const RdCalibration& c) {
        return std::abs(c.dp5.value - target_dp5) < std::max(search.tolerance, c.dp5.std_error);
    };
    const auto finish = [&](RdCalibration c) {
        c.evaluations = out.evaluations;
        return c;
    };

    // Upper end just below alpha. Close to alpha the conditional clock law is
    // a narrow early spike the five-term inversion cannot resolve, so the end
    // backs off while clock sampling fails.
    double hi = 0.0;
    RdCalibration at_hi;
    for (const double gap : {1e-6, 0.01, 0.02, 0.04, 0.08}) {
        hi = alpha * (1.0 - gap);
        try {
            at_hi = evaluate(hi);
            break;
        } catch (const NumericalFailure&) {
            if (gap == 0.08) {
                throw;
            }
        }
    }
    if (converged(at_hi)) {
        return finish(std::move(at_hi));
    }
    if (at_hi.dp5.value < target_dp5) {
        throw CalibrationInfeasible("target DP " + std::to_string(target_dp5) + " exceeds the DP " +
                                    std::to_string(at_hi.dp5.value) + " reached at r_d -> alpha");
    }
    double lo = std::min(search.r_min, 0.5 * hi);
    RdCalibration at_lo = evaluate(lo);
    while (!converged(at_lo) && at_lo.dp5.value > target_dp5) {
        lo *= 0.5;
        if (lo < 1e-6) {
            throw CalibrationInfeasible("target DP " + std::to_string(target_dp5) +
                                        " lies below the DP range of the r_d bracket");
        }
        at_lo = evaluate(lo);
    }
    if (converged(at_lo)) {
        return finish(std::move(at_lo));
    }
    RdCalibration best = std::abs(at_lo.dp5.value - target_dp5) < std::abs(at_hi.dp5.value - target_dp5)
                             ? std::move(at_lo)
                             : std::move(at_hi);
    for (int iter = 0; iter < search.max_iterations; ++iter) {
        const double mid = 0.5 * (lo + hi);
        RdCalibration at_mid = evaluate(mid);
        const bool done = converged(at_mid);
        if (at_mid.dp5.value < target_dp5) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (done || std::abs(at_mid.dp5.value - target_dp5) < std::abs(best.dp5.value - target_dp5)) {
            best = std::move(at_mid);
        }
        if (done || hi - lo < 1e-10 * hi) {
            break;
        }
    }
    return finish(std::move(best));
}

AlphaCandidate calibrate_alpha(const CalibrationInput& input, double alpha) {
    AlphaCandidate c;
    c.alpha = alpha;
    const MarketSeries& s = input.series;
    try {
        c.mle = fit_mle(s.equity, s.debt_b, {input.r, alpha, input.t_m, input.dt_obs});
        c.params.mu0 = c.mle.estimate.mu0;
        c.params.mu = c.mle.estimate.mu;
        c.params.sigma = c.mle.estimate.sigma;
        c.params.r = input.r;
        c.params.alpha = alpha;
        c.params.x0 = c.mle.assets.back() / s.debt_b.back();
        c.params.w = s.long_share();
        c.params.r_d = 0.5 * alpha;  // replaced by the search
        c.rd = calibrate_rd(LeverageModel(c.params), input.sim, input.target_dp5);
        c.params.r_d = c.rd.r_d;
        c.residual = std::abs(c.rd.dp5.value - input.target_dp5);
        c.feasible = c.rd.feasible;
        if (!c.feasible) {
            c.failure = "loss lower bound " + std::to_string(c.rd.kd_floor) + " is negative at r_d = " +
                        std::to_string(c.rd.r_d);
        }
    } catch (const CalibrationInfeasible& e) {
        c.feasible = false;
        c.failure = e.what();
    } catch (const InvalidParameters& e) {
        c.feasible = false;
        c.failure = e.what();
    }
    return c;
}

CalibrationResult select_alpha(const CalibrationInput& input) {
    if (input.alpha_grid.empty()) {
        throw InputError("alpha grid is empty");
    }
    std::vector<double> grid = input.alpha_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (!(grid.front() > 1.0)) {
        throw InputError("alpha grid values must exceed 1");
    }
    CalibrationResult out;
    // Each alpha already runs its Monte Carlo in parallel, so the grid is
    // walked sequentially.
    for (double alpha : grid) {
        out.candidates.push_back(calibrate_alpha(input, alpha));
    }
    const AlphaCandidate* best = nullptr;
    for (const auto& c : out.candidates) {
        if (c.feasible && (best == nullptr || c.residual < best->residual)) {
            best = &c;
        }
    }
    if (best == nullptr) {
        std::string why = "no feasible alpha:";
        for (const auto& c : out.candidates) {
            why += " [alpha " + std::to_string(c.alpha) + ": " + c.failure + "]";
        }
        throw CalibrationInfeasible(why);
    }
    out.params = best->params;
    out.std_errors = best->mle.std_error;
    out.achieved_dp5 = best->rd.dp5;
    out.implied_assets = best->mle.assets;
    out.loglik = best->mle.loglik;
    out.feasible = true;
    out.single_drift = best->mle.single_drift;
    out.samples = best->rd.samples;
    return out;
}

}  // namespace lgd
