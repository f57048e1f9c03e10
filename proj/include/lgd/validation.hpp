#pragma once

#include <string>
#include <vector>

#include "lgd/model.hpp"
#include "lgd/simulation.hpp"

namespace lgd {

struct ZakianCase {
    std::string name;
    double max_error = 0.0;  // over t in [0.1, 10]
    double tolerance = 0.0;
    bool pass() const { return max_error < tolerance; }
};

// 1/s, 1/(s+1), 1/s^2 (tolerance 1e-4) and s/(s^2+1) (1e-3) against their
// known inverses on 200 points in [0.1, 10].
std::vector<ZakianCase> zakian_suite();

struct TransformCheck {
    double gamma = 0.0;
    double closed_form = 0.0;
    double oracle = 0.0;
    double std_error = 0.0;
};

struct OracleComparison {
    std::size_t paths = 0;
    double ks = 0.0;  // sup |empirical cdf - recovery_cdf| of the ratio at default
    std::vector<TransformCheck> transforms;
};

// Runs oracle_occupation_time and compares it with recovery_cdf and
// tau_laplace at the given rates.
OracleComparison compare_with_oracle(const LeverageModel& model, const SimConfig& cfg,
                                     const std::vector<double>& gammas = {0.5, 1.0, 2.0});

}  // namespace lgd
