#include "lgd/laplace.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

#include <boost/math/tools/roots.hpp>

namespace lgd {

namespace {

using cplx = std::complex<double>;

constexpr double kMassTolerance = 1e-2;

std::vector<double> cumulative_trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    return out;
}

double interpolate_quantile(const std::vector<double>& grid, const std::vector<double>& cdf, double u) {
    if (u <= cdf.front()) {
        return grid.front();
    }
    if (u >= cdf.back()) {
        return grid.back();
    }
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const std::size_t hi = static_cast<std::size_t>(it - cdf.begin());
    const std::size_t lo = hi - 1;
    const double span = cdf[hi] - cdf[lo];
    if (span <= 0.0) {
        return grid[hi];
    }
    return grid[lo] + (grid[hi] - grid[lo]) * (u - cdf[lo]) / span;
}

// Origin followed by a geometric grid on [t_max*1e-4, t_max].
std::vector<double> tau_grid(double t_max, std::size_t points) {
    std::vector<double> grid = geometric_grid(t_max * 1e-4, t_max, points);
    grid.insert(grid.begin(), 0.0);
    return grid;
}

}  // namespace

const ZakianConstants& zakian_constants() {
    static const ZakianConstants constants{
        {cplx(12.83767675, 1.666063445), cplx(12.22613209, 5.012718792),
         cplx(10.93430308, 8.409673116), cplx(8.776434715, 11.92185389),
         cplx(5.225453361, 15.72952905)},
        {cplx(-36902.08210, 196990.4257), cplx(61277.02524, -95408.62551),
         cplx(-28916.56288, 18169.18531), cplx(4655.361138, -1.901528642),
         cplx(-118.7414011, -141.3036911)}};
    return constants;
}

TabulatedDistribution TabulatedDistribution::from_density(std::vector<double> grid, std::vector<double> pdf) {
    if (grid.size() < 2 || grid.size() != pdf.size()) {
        throw DomainError("tabulated distribution needs matching grid and density with >= 2 nodes");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw DomainError("tabulation grid must be strictly increasing");
        }
    }
    TabulatedDistribution out;
    out.cdf = cumulative_trapezoid(grid, pdf);
    out.raw_mass = out.cdf.back();
    if (!(out.raw_mass > 0.0)) {
        throw NumericalFailure("tabulated density has no mass");
    }
    for (double& c : out.cdf) {
        c /= out.raw_mass;
    }
    out.cdf.back() = 1.0;
    out.grid = std::move(grid);
    out.pdf = std::move(pdf);
    return out;
}

double TabulatedDistribution::cdf_at(double x) const {
    if (x <= grid.front()) {
        return cdf.front();
    }
    if (x >= grid.back()) {
        return 1.0;
    }
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    const std::size_t lo = hi - 1;
    // Exact integral of the linear interpolant of pdf over [grid[lo], x].
    const double h = x - grid[lo];
    const double slope = (pdf[hi] - pdf[lo]) / (grid[hi] - grid[lo]);
    const double partial = h * pdf[lo] + 0.5 * slope * h * h;
    return cdf[lo] + partial / raw_mass;
}

double TabulatedDistribution::quantile(double u) const { return interpolate_quantile(grid, cdf, u); }

double TabulatedDistribution::mean() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        acc += 0.5 * (grid[i] - grid[i - 1]) * (grid[i] * pdf[i] + grid[i - 1] * pdf[i - 1]);
    }
    return acc / raw_mass;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
        throw DomainError("geometric grid needs 0 < lo < hi and n >= 2");
    }
    std::vector<double> out(n);
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo * std::exp(step * static_cast<double>(i));
    }
    out.back() = hi;
    return out;
}

TabulatedDistribution tabulate_tau_density(const LeverageModel& model, const TauGridConfig& cfg) {
    double t_max = cfg.t_max;
    const double shift = kTiltFraction * tau_decay_rate(model);
    const auto transform = [&model](cplx s) { return tau_laplace(model, s); };
    const auto survival_transform = [&model](cplx s) { return (1.0 - tau_laplace(model, s)) / s; };
    for (int attempt = 0; attempt <= cfg.max_extensions; ++attempt, t_max *= 2.0) {
        const double residual = zakian_invert(survival_transform, t_max, shift);
        if (residual > cfg.residual_tolerance) {
            continue;
        }
        std::vector<double> grid = tau_grid(t_max, cfg.points);
        std::vector<double> pdf(grid.size(), 0.0);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double f = zakian_invert(transform, grid[i], shift);
            if (f < 0.0) {
                throw NumericalFailure("tau density inversion went negative at t = " +
                                       std::to_string(grid[i]));
            }
            pdf[i] = f;
        }
        return TabulatedDistribution::from_density(std::move(grid), std::move(pdf));
    }
    throw NumericalFailure("tau density truncated: residual mass above tolerance at t_max = " +
                           std::to_string(t_max / 2.0));
}

RecoveryRatio sample_recovery(const LeverageModel& model, double u) {
    if (!(u > 0.0) || !(u <= 1.0)) {
        throw DomainError("uniform draw must lie in (0, 1]");
    }
    const double r_d = model.params().r_d;
    const double log_u = std::log(u);
    if (log_u == 0.0) {
        return {r_d};
    }
    // Solve in x = ln R where the log-cdf is smooth and increasing.
    // exp(log(r_d)) can round above r_d.
    const auto f = [&](double x) { return log_recovery_cdf(model, std::min(std::exp(x), r_d)) - log_u; };
    const double hi = std::log(r_d);
    double lo = hi - 1.0;
    while (f(lo) > 0.0) {
        lo = hi - 2.0 * (hi - lo);
        if (hi - lo > 1e3) {
            throw NumericalFailure("could not bracket the recovery quantile");
        }
    }
    std::uintmax_t max_iter = 200;
    const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12; };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f(lo), f(hi), tol, max_iter);
    return {std::min(std::exp(0.5 * (a + b)), r_d)};
}

double ConditionalTauLaw::quantile(double u) const { return interpolate_quantile(grid, cdf, u); }

ConditionalTauLaw conditional_tau_law(const LeverageModel& model, double ratio, const TauGridConfig& cfg) {
    const double marginal = recovery_pdf(model, ratio);
    if (!(marginal > 0.0)) {
        throw NumericalFailure("recovery density vanishes at the conditioning value");
    }
    const double shift = kTiltFraction * tau_decay_rate(model);
    const auto transform = [&model, ratio](cplx s) { return joint_density_laplace(model, s, ratio); };
    double t_max = cfg.t_max;
    for (int attempt = 0; attempt <= cfg.max_extensions; ++attempt, t_max *= 2.0) {
        ConditionalTauLaw law;
        law.grid = tau_grid(t_max, cfg.points);
        law.density.assign(law.grid.size(), 0.0);
        for (std::size_t i = 1; i < law.grid.size(); ++i) {
            const double f = zakian_invert(transform, law.grid[i], shift) / marginal;
            if (f < -kClampTolerance) {
                throw NumericalFailure("conditional tau density inversion went negative");
            }
            law.density[i] = std::max(f, 0.0);
        }
        law.cdf = cumulative_trapezoid(law.grid, law.density);
        law.mass = law.cdf.back();
        if (law.mass > 1.0 + kMassTolerance) {
            throw NumericalFailure("conditional tau density integrates above one");
        }
        if (law.mass >= 1.0 - kMassTolerance) {
            return law;
        }
    }
    throw NumericalFailure("conditional tau density truncated at R = " + std::to_string(ratio));
}

double sample_tau_given_recovery(const LeverageModel& model, RecoveryRatio recovery, double u,
                                 const TauGridConfig& cfg) {
    if (!(u > 0.0) || !(u < 1.0)) {
        throw DomainError("uniform draw must lie in (0, 1)");
    }
    return conditional_tau_law(model, recovery.value, cfg).quantile(u);
}

}  // namespace lgd
