#include "lgd/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "lgd/errors.hpp"

namespace lgd {

namespace {

using cplx = std::complex<double>;

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw InvalidParameters(what);
    }
}

// cosh(x) + c*sinh(x) = exp(x) * ((1+c) + (1-c)exp(-2x)) / 2. The helpers
// below return the bracket only; the exp(x) factors of numerator and
// denominator are collected into a single exponent so that nothing
// overflows when |m|(alpha* - d) is large.

template <class T>
T joint_laplace_impl(const LeverageModel& model, T gamma, double ratio) {
    const ModelParams& p = model.params();
    const DerivedParams& dp = model.derived();
    const double am = model.abs_m();
    const double k = am / p.sigma;
    const double lr = k * std::log(p.alpha / ratio);
    const T b1 = dp.b1(gamma);
    const T b2 = dp.b2(gamma);
    const T y = b2 * (am * model.gap());
    const T num = b2 * ((1.0 + b1) + (1.0 - b1) * std::exp(-2.0 * lr));
    const T den = (1.0 + gamma) * ((b2 + b1) + (b2 - b1) * std::exp(-2.0 * y));
    const T expo = lr - y + b1 * (k * std::log(ratio / p.r_d));
    return num / den * std::exp(expo);
}

// ratio -> r_d limit of joint_laplace_impl, written out so that no
// logarithm of a ratio close to one is formed.
template <class T>
T tau_laplace_impl(const LeverageModel& model, T gamma) {
    const DerivedParams& dp = model.derived();
    const double x = model.abs_m() * model.gap();
    const T b1 = dp.b1(gamma);
    const T b2 = dp.b2(gamma);
    const T y = b2 * x;
    const T num = b2 * ((1.0 + b1) + (1.0 - b1) * std::exp(-2.0 * x));
    const T den = (1.0 + gamma) * ((b2 + b1) + (b2 - b1) * std::exp(-2.0 * y));
    return num / den * std::exp(x - y);
}

template <class T>
T joint_density_impl(const LeverageModel& model, T gamma, double ratio) {
    const ModelParams& p = model.params();
    const DerivedParams& dp = model.derived();
    const double am = model.abs_m();
    const double k = am / p.sigma;
    const double lr = k * std::log(p.alpha / ratio);
    const T b1 = dp.b1(gamma);
    const T b2 = dp.b2(gamma);
    const T y = b2 * (am * model.gap());
    // b1^2 - 1 without cancellation.
    const T b1sq_minus_one = 2.0 * (1.0 + gamma) / (dp.m * dp.m);
    const T num = b2 * b1sq_minus_one * (1.0 - std::exp(-2.0 * lr)) * (k / ratio);
    const T den = (1.0 + gamma) * ((b2 + b1) + (b2 - b1) * std::exp(-2.0 * y));
    const T expo = lr - y + b1 * (k * std::log(ratio / p.r_d));
    return num / den * std::exp(expo);
}

void check_rate(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw DomainError("Laplace argument must be positive and finite, got " +
                          std::to_string(gamma));
    }
}

// Complex arguments may sit left of the origin (shifted inversion); the
// transforms are analytic there up to the pole at -1.
void check_rate(cplx s) {
    if (!(s.real() > -1.0) || !std::isfinite(s.imag())) {
        throw DomainError("complex Laplace argument must satisfy Re(s) > -1");
    }
}

}  // namespace

double DerivedParams::b1(double gamma) const { return std::sqrt(1.0 + 2.0 * (1.0 + gamma) / (m * m)); }
double DerivedParams::b2(double gamma) const { return std::sqrt(1.0 + 2.0 * gamma / (m * m)); }
cplx DerivedParams::b1(cplx gamma) const { return std::sqrt(1.0 + 2.0 * (1.0 + gamma) / (m * m)); }
cplx DerivedParams::b2(cplx gamma) const { return std::sqrt(1.0 + 2.0 * gamma / (m * m)); }

void validate(const ModelParams& p) {
    require(std::isfinite(p.mu0) && std::isfinite(p.mu) && std::isfinite(p.sigma) &&
                std::isfinite(p.r) && std::isfinite(p.alpha) && std::isfinite(p.r_d) &&
                std::isfinite(p.x0) && std::isfinite(p.w),
            "model parameters must be finite");
    require(p.sigma > 0.0, "sigma must be positive");
    require(p.alpha > 1.0, "alpha must exceed 1");
    require(p.r_d > 0.0 && p.r_d < p.alpha, "r_d must lie in (0, alpha)");
    require(p.x0 > 0.0, "x0 must be positive");
    require(p.w >= 0.0 && p.w <= 1.0, "w must lie in [0, 1]");
    require(p.mu0 >= p.mu, "mu0 must be at least mu");
    const double half_var = 0.5 * p.sigma * p.sigma;
    require(p.mu0 - half_var - p.r < 0.0, "mu0 - sigma^2/2 - r must be negative");
    require(p.mu - half_var - p.r < 0.0, "mu - sigma^2/2 - r must be negative");
}

DerivedParams derive_params(const ModelParams& p) {
    validate(p);
    DerivedParams dp;
    dp.m = (p.mu - 0.5 * p.sigma * p.sigma - p.r) / p.sigma;
    dp.alpha_star = std::log(p.alpha) / p.sigma;
    dp.d = std::log(p.r_d) / p.sigma;
    dp.b = std::sqrt(1.0 + 2.0 / (dp.m * dp.m));
    return dp;
}

LeverageModel::LeverageModel(const ModelParams& p) : params_(p), derived_(derive_params(p)) {}

double LeverageModel::abs_m() const { return std::abs(derived_.m); }

double LeverageModel::drift_above() const {
    return params_.mu0 - 0.5 * params_.sigma * params_.sigma - params_.r;
}

double LeverageModel::drift_below() const {
    return params_.mu - 0.5 * params_.sigma * params_.sigma - params_.r;
}

LeverageModel LeverageModel::with_r_d(double r_d) const {
    ModelParams p = params_;
    p.r_d = r_d;
    return LeverageModel(p);
}

LeverageModel LeverageModel::with_w(double w) const {
    ModelParams p = params_;
    p.w = w;
    return LeverageModel(p);
}

double tau_decay_rate(const LeverageModel& model) {
    // Zeros of the shared denominator on the negative axis: with b2 = i*beta
    // and theta = beta*x they solve theta*cos(theta) + x*b1*sin(theta) = 0,
    // where b1 = sqrt(2/m^2 - beta^2). The pole at gamma = -1 caps the rate.
    const double m2 = model.derived().m * model.derived().m;
    const double x = model.abs_m() * model.gap();
    const double theta_cap = x * std::sqrt(2.0 / m2);
    const double lo = 0.5 * M_PI;
    const double hi = std::min(M_PI, theta_cap);
    if (!(hi > lo)) {
        return 1.0;
    }
    const auto g = [&](double theta) {
        const double beta = theta / x;
        const double b1 = std::sqrt(std::max(2.0 / m2 - beta * beta, 0.0));
        return theta * std::cos(theta) + x * b1 * std::sin(theta);
    };
    if (g(hi) >= 0.0) {
        return 1.0;
    }
    std::uintmax_t max_iter = 200;
    const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::abs(b); };
    const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, tol, max_iter);
    const double beta = 0.5 * (a + b) / x;
    return std::min(0.5 * m2 * (1.0 + beta * beta), 1.0);
}

double conditioned_drift(double x, const DerivedParams& dp) {
    if (!(x < dp.alpha_star)) {
        throw DomainError("conditioned drift is only defined strictly below alpha*");
    }
    return dp.m / std::tanh(dp.m * (x - dp.alpha_star));
}

double joint_laplace(const LeverageModel& model, double gamma, double ratio) {
    check_rate(gamma);
    if (!(ratio > 0.0) || ratio > model.params().r_d) {
        throw DomainError("joint_laplace requires 0 < R <= r_d");
    }
    if (ratio == model.params().r_d) {
        return tau_laplace_impl(model, gamma);
    }
    return joint_laplace_impl(model, gamma, ratio);
}

double tau_laplace(const LeverageModel& model, double gamma) {
    check_rate(gamma);
    return tau_laplace_impl(model, gamma);
}

cplx tau_laplace(const LeverageModel& model, cplx s) {
    check_rate(s);
    return tau_laplace_impl(model, s);
}

double log_recovery_cdf(const LeverageModel& model, double ratio) {
    const ModelParams& p = model.params();
    const DerivedParams& dp = model.derived();
    if (!(ratio > 0.0) || ratio > p.r_d) {
        throw DomainError("log_recovery_cdf requires 0 < R <= r_d");
    }
    const double am = model.abs_m();
    const double k = am / p.sigma;
    const double x = am * model.gap();
    const double lr = ratio == p.r_d ? x : k * std::log(p.alpha / ratio);
    const double num = (1.0 + dp.b) + (1.0 - dp.b) * std::exp(-2.0 * lr);
    const double den = (1.0 + dp.b) + (1.0 - dp.b) * std::exp(-2.0 * x);
    return std::log(num / den) + (lr - x) + dp.b * k * std::log(ratio / p.r_d);
}

double recovery_cdf(const LeverageModel& model, double ratio) {
    if (!(ratio > 0.0)) {
        throw DomainError("recovery_cdf requires R > 0");
    }
    if (ratio >= model.params().r_d) {
        return 1.0;
    }
    return std::exp(log_recovery_cdf(model, ratio));
}

double recovery_pdf(const LeverageModel& model, double ratio) {
    const ModelParams& p = model.params();
    const DerivedParams& dp = model.derived();
    if (!(ratio > 0.0) || !(ratio < p.r_d)) {
        throw DomainError("recovery_pdf requires 0 < R < r_d");
    }
    const double am = model.abs_m();
    const double k = am / p.sigma;
    const double x = am * model.gap();
    const double lr = k * std::log(p.alpha / ratio);
    const double bsq_minus_one = 2.0 / (dp.m * dp.m);
    const double num = bsq_minus_one * (1.0 - std::exp(-2.0 * lr)) * (k / ratio);
    const double den = (1.0 + dp.b) + (1.0 - dp.b) * std::exp(-2.0 * x);
    return num / den * std::exp((lr - x) + dp.b * k * std::log(ratio / p.r_d));
}

double joint_density_laplace(const LeverageModel& model, double gamma, double ratio) {
    check_rate(gamma);
    if (!(ratio > 0.0) || !(ratio < model.params().r_d)) {
        throw DomainError("joint_density_laplace requires 0 < R < r_d");
    }
    return joint_density_impl(model, gamma, ratio);
}

cplx joint_density_laplace(const LeverageModel& model, cplx s, double ratio) {
    check_rate(s);
    if (!(ratio > 0.0) || !(ratio < model.params().r_d)) {
        throw DomainError("joint_density_laplace requires 0 < R < r_d");
    }
    return joint_density_impl(model, s, ratio);
}

}  // namespace lgd
