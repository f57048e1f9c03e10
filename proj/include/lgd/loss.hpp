#pragma once

namespace lgd {

// Loss on the default-barrier debt B: 1 - V/B. Negative when the firm
// defaults with assets above B, which happens whenever r_d > 1.
constexpr double loss_kb(double recovery) { return 1.0 - recovery; }

// Loss rate of total debt given the B-level loss and the long-term share w.
constexpr double loss_kd(double kb, double w) { return kb + 0.5 * w * (1.0 - kb); }

// Smallest attainable total-debt loss, reached at recovery == r_d.
constexpr double kd_lower_bound(double r_d, double w) { return 0.5 * w + (1.0 - 0.5 * w) * (1.0 - r_d); }

}  // namespace lgd
