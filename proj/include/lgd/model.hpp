#pragma once

#include <complex>

namespace lgd {

// Parameters of the switching leverage model. Rates are per year, sigma is
// per square-root year, everything else is dimensionless.
struct ModelParams {
    double mu0 = 0.0;    // asset drift while leverage > alpha
    double mu = 0.0;     // asset drift while leverage <= alpha
    double sigma = 0.0;  // asset volatility (shared by both regimes)
    double r = 0.0;      // debt growth / discount rate
    double alpha = 0.0;  // distress level, > 1
    double r_d = 0.0;    // danger threshold, 0 < r_d < alpha
    double x0 = 0.0;     // initial leverage V0/B0
    double w = 0.0;      // long-term share of total debt, in [0, 1]
};

// Constants of the normalized log-leverage X = ln(Y/B)/sigma.
struct DerivedParams {
    double m = 0.0;           // (mu - sigma^2/2 - r) / sigma, negative
    double alpha_star = 0.0;  // ln(alpha) / sigma
    double d = 0.0;           // ln(r_d) / sigma
    double b = 0.0;           // sqrt(1 + 2/m^2)

    // b1(g) = sqrt(1 + 2(1+g)/m^2), b2(g) = sqrt(1 + 2g/m^2).
    double b1(double gamma) const;
    double b2(double gamma) const;
    std::complex<double> b1(std::complex<double> gamma) const;
    std::complex<double> b2(std::complex<double> gamma) const;
};

// Throws InvalidParameters when any structural constraint fails.
void validate(const ModelParams& p);

// Validates p and computes the transformed constants.
DerivedParams derive_params(const ModelParams& p);

// Validated parameter set together with its derived constants. Every
// closed-form evaluator takes one of these, so an instance is proof that the
// invariants hold.
class LeverageModel {
public:
    explicit LeverageModel(const ModelParams& p);

    const ModelParams& params() const { return params_; }
    const DerivedParams& derived() const { return derived_; }

    double abs_m() const;
    // alpha* - d = ln(alpha / r_d) / sigma, strictly positive.
    double gap() const { return derived_.alpha_star - derived_.d; }
    // Log-leverage drifts of the two regimes.
    double drift_above() const;
    double drift_below() const;
    bool single_drift() const { return params_.mu0 == params_.mu; }

    LeverageModel with_r_d(double r_d) const;
    LeverageModel with_w(double w) const;

private:
    ModelParams params_;
    DerivedParams derived_;
};

// Leverage ratio V/B observed at the default time.
struct RecoveryRatio {
    double value = 0.0;
};

// Drift m*coth(m(x - alpha*)) of the post-last-passage process in the
// normalized coordinate. Requires x < alpha*.
double conditioned_drift(double x, const DerivedParams& dp);

// E_alpha[exp(-gamma tau) 1{(Y/B)_tau <= ratio}] for gamma > 0, 0 < ratio <= r_d.
double joint_laplace(const LeverageModel& model, double gamma, double ratio);

// E_alpha[exp(-gamma tau)], the Laplace transform of the default clock.
double tau_laplace(const LeverageModel& model, double gamma);
// Complex-argument version used by numerical inversion; requires Re(s) > -1.
std::complex<double> tau_laplace(const LeverageModel& model, std::complex<double> s);

// Exponential decay rate of the tau density (and of the joint density in t):
// distance from the origin to the nearest singularity of the transforms.
double tau_decay_rate(const LeverageModel& model);

// P(V_xi/B_xi <= ratio). Equal to 1 above r_d.
double recovery_cdf(const LeverageModel& model, double ratio);
// ln P(V_xi/B_xi <= ratio) for 0 < ratio <= r_d; finite where the cdf underflows.
double log_recovery_cdf(const LeverageModel& model, double ratio);

// Density of V_xi/B_xi on (0, r_d). This is the gamma -> 0 limit of
// joint_density_laplace, checked against the derivative of recovery_cdf.
double recovery_pdf(const LeverageModel& model, double ratio);

// Laplace transform in t of the joint density f(t, R) of (tau, (Y/B)_tau).
double joint_density_laplace(const LeverageModel& model, double gamma, double ratio);
std::complex<double> joint_density_laplace(const LeverageModel& model, std::complex<double> s,
                                           double ratio);

}  // namespace lgd
