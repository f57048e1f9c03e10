#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lgd {

using Date = std::chrono::sys_days;

// ISO-8601 calendar date (YYYY-MM-DD). Throws InputError.
Date parse_date(std::string_view text);
std::string format_date(Date date);

struct EquityRow {
    Date date;
    double market_cap = 0.0;
};

struct BalanceRow {
    Date date;
    double short_term_debt = 0.0;
    double long_term_debt = 0.0;
};

// CSV readers: a header line, then `date,market_cap` or
// `date,short_term_debt,long_term_debt`. Dates must be strictly increasing
// and values positive (long-term debt may be zero).
std::vector<EquityRow> read_equity_csv(std::istream& in);
std::vector<BalanceRow> read_balance_csv(std::istream& in);
std::vector<EquityRow> read_equity_csv(const std::filesystem::path& path);
std::vector<BalanceRow> read_balance_csv(const std::filesystem::path& path);

enum class DebtInterpolation { linear, step };

// Daily equity and debt on the estimation window.
struct MarketSeries {
    std::vector<Date> dates;
    std::vector<double> equity;
    std::vector<double> debt_b;      // short + 0.5 * long
    std::vector<double> debt_total;  // short + long
    std::vector<double> debt_long;

    std::size_t size() const { return equity.size(); }
    // Window average of long / total.
    double long_share() const;
};

// Balance sheet items at `date`, interpolated between reporting dates and
// held flat after the last one. Throws InputError before the first.
BalanceRow debt_at(const std::vector<BalanceRow>& balance, Date date, DebtInterpolation how);

// The last `lookback` equity rows dated on or before `as_of` (default: the
// last row), paired with interpolated debt.
MarketSeries build_market_series(const std::vector<EquityRow>& equity, const std::vector<BalanceRow>& balance,
                                 std::optional<Date> as_of, std::size_t lookback,
                                 DebtInterpolation how = DebtInterpolation::linear);

struct RunConfig {
    std::optional<Date> as_of;
    std::size_t lookback = 1000;
    double r = 0.0093;
    double target_dp5 = 0.0;
    std::vector<double> alpha_grid{1.8};
    std::uint64_t seed = 20211001;
    std::size_t n_paths = 10000;
    double dt_obs = 1.0 / 250.0;
    double t_m = 1.0;
    double sim_dt = 1e-3;
    DebtInterpolation interpolation = DebtInterpolation::linear;
    double cds_maturity = 5.0;
    int cds_frequency = 4;
    std::vector<double> w_grid;  // extra w values priced on the same samples
    bool write_samples = false;
};

// `key = value` lines; '#' starts a comment; lists are comma separated.
// Unknown keys and malformed values throw InputError.
RunConfig parse_run_config(std::istream& in);
RunConfig read_run_config(const std::filesystem::path& path);
void validate(const RunConfig& cfg);

struct LoadedInputs {
    MarketSeries series;
    RunConfig config;
};

LoadedInputs load_inputs(const std::filesystem::path& equity_csv, const std::filesystem::path& balance_csv,
                         const std::filesystem::path& config);

}  // namespace lgd
