#include "lgd/validation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

#include "lgd/laplace.hpp"

namespace lgd {

std::vector<ZakianCase> zakian_suite() {
    using cplx = std::complex<double>;
    struct Case {
        const char* name;
        std::function<cplx(cplx)> transform;
        std::function<double(double)> exact;
        double tolerance;
    };
    const std::vector<Case> cases{
        {"1/s", [](cplx s) { return 1.0 / s; }, [](double) { return 1.0; }, 1e-4},
        {"1/(s+1)", [](cplx s) { return 1.0 / (s + 1.0); }, [](double t) { return std::exp(-t); }, 1e-4},
        {"1/s^2", [](cplx s) { return 1.0 / (s * s); }, [](double t) { return t; }, 1e-4},
        {"s/(s^2+1)", [](cplx s) { return s / (s * s + 1.0); }, [](double t) { return std::cos(t); }, 1e-3},
    };
    std::vector<ZakianCase> out;
    for (const Case& c : cases) {
        ZakianCase r{c.name, 0.0, c.tolerance};
        for (int i = 0; i < 200; ++i) {
            const double t = 0.1 + (10.0 - 0.1) * i / 199.0;
            r.max_error = std::max(r.max_error, std::abs(zakian_invert(c.transform, t) - c.exact(t)));
        }
        out.push_back(r);
    }
    return out;
}

OracleComparison compare_with_oracle(const LeverageModel& model, const SimConfig& cfg,
                                     const std::vector<double>& gammas) {
    const std::vector<OracleDraw> draws = oracle_occupation_time(model, cfg);
    OracleComparison out;
    out.paths = draws.size();
    std::vector<double> ratios;
    ratios.reserve(draws.size());
    for (const OracleDraw& d : draws) {
        ratios.push_back(d.ratio);
    }
    std::sort(ratios.begin(), ratios.end());
    const double n = static_cast<double>(ratios.size());
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const double f = recovery_cdf(model, ratios[i]);
        out.ks = std::max({out.ks, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
    }
    for (double g : gammas) {
        double sum = 0.0;
        double sq = 0.0;
        for (const OracleDraw& d : draws) {
            const double v = std::exp(-g * d.tau);
            sum += v;
            sq += v * v;
        }
        const double mean = sum / n;
        const double var = std::max(sq / n - mean * mean, 0.0);
        out.transforms.push_back({g, tau_laplace(model, g), mean, std::sqrt(var / n)});
    }
    return out;
}

}  // namespace lgd
