#pragma once

#include <array>
#include <complex>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lgd/errors.hpp"
#include "lgd/model.hpp"

namespace lgd {

// Five-term Zakian inversion: f(t) ~ (2/t) * sum_i Re(K_i * F(a_i / t)).
struct ZakianConstants {
    std::array<std::complex<double>, 5> poles;
    std::array<std::complex<double>, 5> weights;
};

const ZakianConstants& zakian_constants();

// Results in (-1e-6, 0) are clamped to zero.
inline constexpr double kClampTolerance = 1e-6;

// Inverts the Laplace transform `transform` (callable on std::complex<double>)
// at time t > 0. With shift c > 0 the transform is evaluated at a_i/t - c and
// the result multiplied by exp(-c t), i.e. exp(c t) f(t) is inverted instead
// of f. Throws DomainError for t <= 0 and NumericalFailure when the transform
// returns a non-finite value.
template <class Transform>
double zakian_invert(Transform&& transform, double t, double shift = 0.0) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("zakian_invert requires t > 0");
    }
    const ZakianConstants& zc = zakian_constants();
    double acc = 0.0;
    for (std::size_t i = 0; i < zc.poles.size(); ++i) {
        const std::complex<double> value = transform(zc.poles[i] / t - shift);
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
            throw NumericalFailure("Laplace transform returned a non-finite value");
        }
        acc += (zc.weights[i] * value).real();
    }
    const double f = 2.0 * acc / t * std::exp(-shift * t);
    if (f < 0.0 && f > -kClampTolerance) {
        return 0.0;
    }
    return f;
}

// Density tabulated on a strictly increasing grid. cdf is the running
// trapezoid integral of pdf divided by raw_mass, so cdf.back() == 1.
struct TabulatedDistribution {
    std::vector<double> grid;
    std::vector<double> pdf;
    std::vector<double> cdf;
    double raw_mass = 0.0;

    static TabulatedDistribution from_density(std::vector<double> grid, std::vector<double> pdf);

    double cdf_at(double x) const;
    // Inverse transform with linear interpolation between grid nodes.
    double quantile(double u) const;
    // Mean of the renormalized trapezoid density.
    double mean() const;
};

// Geometric grid with n points from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, std::size_t n);

// Shift used for the clock densities, as a fraction of tau_decay_rate. The
// plain five-term rule leaks the early peak of the density into its tail;
// inverting the tilted density exp(c t) f(t), which is nearly flat there,
// keeps the tail error relative instead of absolute.
inline constexpr double kTiltFraction = 0.95;

struct TauGridConfig {
    double t_max = 50.0;        // initial horizon in years
    std::size_t points = 512;   // geometric points on [t_max*1e-4, t_max]
    int max_extensions = 6;     // horizon doublings before giving up
    double residual_tolerance = 1e-4;
};

// Density of the default clock tau^alpha by inversion of its Laplace
// transform. The horizon is doubled until the mass beyond it (obtained by
// inverting (1 - F(s))/s at t_max) falls under residual_tolerance.
TabulatedDistribution tabulate_tau_density(const LeverageModel& model, const TauGridConfig& cfg = {});

// Solves recovery_cdf(R) = u on (0, r_d].
RecoveryRatio sample_recovery(const LeverageModel& model, double u);

// Conditional law of tau given (Y/B)_tau = R: the inverted joint density
// f(t, R) divided by recovery_pdf(R). The cdf is not renormalized; `mass`
// is its last value.
struct ConditionalTauLaw {
    std::vector<double> grid;
    std::vector<double> density;
    std::vector<double> cdf;
    double mass = 0.0;

    double quantile(double u) const;
};

// Throws NumericalFailure when the inverted density dips below -1e-6 or the
// mass stays outside 1 +- 1e-2 after the allowed horizon extensions.
ConditionalTauLaw conditional_tau_law(const LeverageModel& model, double ratio,
                                      const TauGridConfig& cfg = {});

double sample_tau_given_recovery(const LeverageModel& model, RecoveryRatio recovery, double u,
                                 const TauGridConfig& cfg = {});

}  // namespace lgd
