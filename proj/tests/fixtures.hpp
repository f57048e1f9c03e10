#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lgd/calibration.hpp"
#include "lgd/market.hpp"
#include "lgd/model.hpp"
#include "lgd/rng.hpp"

namespace lgd::testing {

// Published single-drift estimates with r_d = 1.32, x0 = 1.4674, w = 0.5858.
inline ModelParams published_estimates() { return {0.0102, 0.0102, 0.1182, 0.0093, 1.8, 1.32, 1.4674, 0.5858}; }

struct SyntheticSpec {
    double mu0 = 0.01;
    double mu = 0.01;
    double sigma = 0.12;
    double r = 0.0093;
    double alpha = 3.0;
    double x0 = 1.5;
    double b0 = 100.0;
    double long_share = 0.6;  // of total debt
    std::size_t n = 1000;
    double dt = 1.0 / 250.0;
    double t_m = 1.0;
};

// Assets follow the switching GBM, B grows at rate r, equity is the call
// value. Dates are consecutive calendar days from 2017-01-02.
inline MarketSeries synthetic_series(const SyntheticSpec& s, std::uint64_t seed) {
    RngStream rng(seed, 0, 7);
    MarketSeries out;
    const Date start = parse_date("2017-01-02");
    double log_v = std::log(s.x0 * s.b0);
    for (std::size_t i = 0; i < s.n; ++i) {
        const double t = static_cast<double>(i) * s.dt;
        const double b = s.b0 * std::exp(s.r * t);
        const double v = std::exp(log_v);
        out.dates.push_back(start + std::chrono::days(static_cast<int>(i)));
        out.equity.push_back(call_value(v, b, s.sigma, s.t_m));
        out.debt_b.push_back(b);
        // B = short + 0.5 long with long = share * total.
        const double total = b / (1.0 - 0.5 * s.long_share);
        out.debt_total.push_back(total);
        out.debt_long.push_back(s.long_share * total);
        const double drift = v / b > s.alpha ? s.mu0 : s.mu;
        log_v += (drift - 0.5 * s.sigma * s.sigma) * s.dt + s.sigma * std::sqrt(s.dt) * rng.normal();
    }
    return out;
}

}  // namespace lgd::testing
