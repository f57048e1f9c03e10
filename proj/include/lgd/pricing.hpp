#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lgd/laplace.hpp"
#include "lgd/loss.hpp"
#include "lgd/model.hpp"
#include "lgd/simulation.hpp"

namespace lgd {

struct LgdReport {
    TabulatedDistribution kd_density;  // on [support_lo, support_hi]
    double support_lo = 0.0;           // kd_lower_bound(r_d, w)
    double support_hi = 1.0;
    double mean = 0.0;                 // E[K^D] under the closed-form law
};

// Push-forward of recovery_pdf through K^D = 1 - (1 - 0.5w) R on a uniform
// grid of `points` nodes in R.
LgdReport lgd_distribution(const LeverageModel& model, std::size_t points = 4001);

struct CdsQuote {
    double spread_bps = 0.0;
    double premium_leg = 0.0;  // annuity: PV of 1 per year of spread
    double default_leg = 0.0;
    double mean_lgd = 0.0;     // sample mean of K^D given xi <= maturity
    std::size_t defaults = 0;  // samples with xi <= maturity
    double rho = 0.0;          // spread_bps / mean_lgd, 0 without defaults
};

struct CdsTerms {
    double r = 0.0;
    double maturity = 5.0;
    int frequency = 4;
};

// Premium leg pays 1/frequency at each t_i = i/frequency up to
// min(xi, maturity), without accrual; the default leg pays K^D at xi when
// xi <= maturity. Throws DomainError on bad terms or empty samples and
// NumericalFailure when the annuity is zero.
CdsQuote price_cds(std::span<const DefaultSample> samples, const CdsTerms& terms);

// Same samples with K^D recomputed for another long-term share w.
std::vector<DefaultSample> with_long_share(std::span<const DefaultSample> samples, double w);

// spread_bps / mean_lgd. Throws DomainError for mean_lgd <= 0.
double rho_metric(double spread_bps, double mean_lgd);

}  // namespace lgd
