#include "lgd/pricing.hpp"

#include <algorithm>
#include <cmath>

#include "lgd/errors.hpp"

namespace lgd {

LgdReport lgd_distribution(const LeverageModel& model, std::size_t points) {
    if (points < 3) {
        throw DomainError("lgd_distribution needs at least 3 grid points");
    }
    const double r_d = model.params().r_d;
    const double w = model.params().w;
    const double slope = 1.0 - 0.5 * w;  // dK^D/dR = -slope
    // Ascending K^D corresponds to descending R; the end points R = 0 and
    // R = r_d are taken as limits.
    std::vector<double> grid(points);
    std::vector<double> pdf(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double ratio = r_d * static_cast<double>(points - 1 - i) / static_cast<double>(points - 1);
        grid[i] = 1.0 - slope * ratio;
        double f = 0.0;
        if (ratio <= 0.0) {
            f = 0.0;
        } else if (ratio >= r_d) {
            f = recovery_pdf(model, r_d * (1.0 - 1e-12));
        } else {
            f = recovery_pdf(model, ratio);
        }
        pdf[i] = f / slope;
    }
    LgdReport out;
    out.support_lo = kd_lower_bound(r_d, w);
    out.support_hi = 1.0;
    grid.front() = out.support_lo;
    grid.back() = out.support_hi;
    out.kd_density = TabulatedDistribution::from_density(std::move(grid), std::move(pdf));
    out.mean = out.kd_density.mean();
    return out;
}

CdsQuote price_cds(std::span<const DefaultSample> samples, const CdsTerms& terms) {
    if (samples.empty()) {
        throw DomainError("price_cds needs at least one sample");
    }
    if (!(terms.maturity > 0.0) || terms.frequency < 1) {
        throw DomainError("price_cds needs maturity > 0 and frequency >= 1");
    }
    const double period = 1.0 / terms.frequency;
    const auto n_pay = static_cast<std::size_t>(std::floor(terms.maturity * terms.frequency + 1e-9));
    // cumulative[k] = sum of period * exp(-r t_i) over the first k payments.
    std::vector<double> cumulative(n_pay + 1, 0.0);
    for (std::size_t i = 1; i <= n_pay; ++i) {
        cumulative[i] = cumulative[i - 1] + period * std::exp(-terms.r * period * static_cast<double>(i));
    }
    double annuity = 0.0;
    double default_leg = 0.0;
    double loss_sum = 0.0;
    CdsQuote q;
    for (const DefaultSample& s : samples) {
        const double stop = std::min(s.xi, terms.maturity);
        const auto paid = std::min(n_pay, static_cast<std::size_t>(std::floor(stop * terms.frequency + 1e-9)));
        annuity += cumulative[paid];
        if (s.xi <= terms.maturity) {
            default_leg += std::exp(-terms.r * s.xi) * s.kd;
            loss_sum += s.kd;
            ++q.defaults;
        }
    }
    const double n = static_cast<double>(samples.size());
    q.premium_leg = annuity / n;
    q.default_leg = default_leg / n;
    if (!(q.premium_leg > 0.0)) {
        throw NumericalFailure("premium leg is zero: every path defaults before the first payment");
    }
    q.spread_bps = 1e4 * q.default_leg / q.premium_leg;
    if (q.defaults > 0) {
        q.mean_lgd = loss_sum / static_cast<double>(q.defaults);
        if (q.mean_lgd > 0.0) {
            q.rho = rho_metric(q.spread_bps, q.mean_lgd);
        }
    }
    return q;
}

std::vector<DefaultSample> with_long_share(std::span<const DefaultSample> samples, double w) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw DomainError("w must lie in [0, 1]");
    }
    std::vector<DefaultSample> out(samples.begin(), samples.end());
    for (DefaultSample& s : out) {
        s.kd = loss_kd(loss_kb(s.recovery.value), w);
    }
    return out;
}

double rho_metric(double spread_bps, double mean_lgd) {
    if (!(mean_lgd > 0.0)) {
        throw DomainError("rho needs a positive mean loss given default");
    }
    return spread_bps / mean_lgd;
}

}  // namespace lgd
