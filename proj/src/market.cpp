#include "lgd/market.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <functional>

#include "lgd/errors.hpp"

namespace lgd {

namespace {

std::string_view trim(std::string_view s) {
    const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
    while (!s.empty() && !not_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && !not_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

double parse_number(std::string_view text, const std::string& where) {
    const std::string s(trim(text));
    if (s.empty()) {
        throw InputError(where + ": empty number");
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InputError(where + ": not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) {
        throw InputError(where + ": not a finite number: '" + s + "'");
    }
    return v;
}

std::uint64_t parse_unsigned(std::string_view text, const std::string& where) {
    const std::string_view s = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw InputError(where + ": not a non-negative integer: '" + std::string(s) + "'");
    }
    return v;
}

bool parse_bool(std::string_view text, const std::string& where) {
    const std::string_view s = trim(text);
    if (s == "true" || s == "1") {
        return true;
    }
    if (s == "false" || s == "0") {
        return false;
    }
    throw InputError(where + ": expected true or false");
}

std::vector<double> parse_list(std::string_view text, const std::string& where) {
    std::vector<double> out;
    for (std::string_view item : split(text, ',')) {
        out.push_back(parse_number(item, where));
    }
    return out;
}

// Rows after the header, with line numbers for messages.
template <class Row>
std::vector<Row> read_rows(std::istream& in, std::size_t columns, const char* what,
                           const std::function<Row(const std::vector<std::string_view>&, const std::string&)>& make) {
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        const std::string where = std::string(what) + " line " + std::to_string(line_no);
        const auto fields = split(line, ',');
        if (fields.size() != columns) {
            throw InputError(where + ": expected " + std::to_string(columns) + " columns");
        }
        Row row = make(fields, where);
        if (!rows.empty() && !(row.date > rows.back().date)) {
            throw InputError(where + ": dates must be strictly increasing");
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw InputError(std::string(what) + ": no data rows");
    }
    return rows;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    return in;
}

}  // namespace

Date parse_date(std::string_view text) {
    const std::string_view s = trim(text);
    const auto fail = [&] { return InputError("invalid ISO date '" + std::string(s) + "'"); };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        throw fail();
    }
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const char* b = s.data();
    if (std::from_chars(b, b + 4, y).ptr != b + 4 || std::from_chars(b + 5, b + 7, m).ptr != b + 7 ||
        std::from_chars(b + 8, b + 10, d).ptr != b + 10) {
        throw fail();
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) {
        throw fail();
    }
    return Date{ymd};
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::vector<EquityRow> read_equity_csv(std::istream& in) {
    return read_rows<EquityRow>(in, 2, "equity csv", [](const auto& f, const std::string& where) {
        EquityRow row{parse_date(f[0]), parse_number(f[1], where)};
        if (!(row.market_cap > 0.0)) {
            throw InputError(where + ": market cap must be positive");
        }
        return row;
    });
}

std::vector<BalanceRow> read_balance_csv(std::istream& in) {
    return read_rows<BalanceRow>(in, 3, "balance csv", [](const auto& f, const std::string& where) {
        BalanceRow row{parse_date(f[0]), parse_number(f[1], where), parse_number(f[2], where)};
        if (row.short_term_debt < 0.0 || row.long_term_debt < 0.0 ||
            !(row.short_term_debt + row.long_term_debt > 0.0)) {
            throw InputError(where + ": debt must be non-negative with a positive total");
        }
        if (!(row.short_term_debt + 0.5 * row.long_term_debt > 0.0)) {
            throw InputError(where + ": default barrier must be positive");
        }
        return row;
    });
}

std::vector<EquityRow> read_equity_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_equity_csv(in);
}

std::vector<BalanceRow> read_balance_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_balance_csv(in);
}

double MarketSeries::long_share() const {
    if (debt_total.empty()) {
        throw InputError("empty market series");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < debt_total.size(); ++i) {
        acc += debt_long[i] / debt_total[i];
    }
    return acc / static_cast<double>(debt_total.size());
}

BalanceRow debt_at(const std::vector<BalanceRow>& balance, Date date, DebtInterpolation how) {
    if (balance.empty() || date < balance.front().date) {
        throw InputError("no balance sheet on or before " + format_date(date));
    }
    const auto it = std::upper_bound(balance.begin(), balance.end(), date,
                                     [](Date d, const BalanceRow& row) { return d < row.date; });
    const BalanceRow& lo = *(it - 1);
    if (it == balance.end() || how == DebtInterpolation::step || lo.date == date) {
        return {date, lo.short_term_debt, lo.long_term_debt};
    }
    const BalanceRow& hi = *it;
    const double span = static_cast<double>((hi.date - lo.date).count());
    const double frac = static_cast<double>((date - lo.date).count()) / span;
    return {date, lo.short_term_debt + frac * (hi.short_term_debt - lo.short_term_debt),
            lo.long_term_debt + frac * (hi.long_term_debt - lo.long_term_debt)};
}

MarketSeries build_market_series(const std::vector<EquityRow>& equity, const std::vector<BalanceRow>& balance,
                                 std::optional<Date> as_of, std::size_t lookback, DebtInterpolation how) {
    if (equity.empty()) {
        throw InputError("no equity rows");
    }
    if (balance.size() < 2) {
        throw InputError("need at least two balance sheet rows");
    }
    const Date cutoff = as_of.value_or(equity.back().date);
    const auto end = std::upper_bound(equity.begin(), equity.end(), cutoff,
                                      [](Date d, const EquityRow& row) { return d < row.date; });
    const auto available = static_cast<std::size_t>(end - equity.begin());
    if (available < lookback) {
        throw InputError("only " + std::to_string(available) + " equity rows on or before " +
                         format_date(cutoff) + ", need " + std::to_string(lookback));
    }
    MarketSeries out;
    for (auto it = end - static_cast<std::ptrdiff_t>(lookback); it != end; ++it) {
        const BalanceRow debt = debt_at(balance, it->date, how);
        out.dates.push_back(it->date);
        out.equity.push_back(it->market_cap);
        out.debt_b.push_back(debt.short_term_debt + 0.5 * debt.long_term_debt);
        out.debt_total.push_back(debt.short_term_debt + debt.long_term_debt);
        out.debt_long.push_back(debt.long_term_debt);
    }
    return out;
}

RunConfig parse_run_config(std::istream& in) {
    RunConfig cfg;
    using Setter = std::function<void(std::string_view, const std::string&)>;
    const std::map<std::string, Setter, std::less<>> setters{
        {"as_of", [&](auto v, auto&) { cfg.as_of = parse_date(v); }},
        {"lookback", [&](auto v, auto& w) { cfg.lookback = parse_unsigned(v, w); }},
        {"r", [&](auto v, auto& w) { cfg.r = parse_number(v, w); }},
        {"target_dp5", [&](auto v, auto& w) { cfg.target_dp5 = parse_number(v, w); }},
        {"alpha_grid", [&](auto v, auto& w) { cfg.alpha_grid = parse_list(v, w); }},
        {"seed", [&](auto v, auto& w) { cfg.seed = parse_unsigned(v, w); }},
        {"n_paths", [&](auto v, auto& w) { cfg.n_paths = parse_unsigned(v, w); }},
        {"dt_obs", [&](auto v, auto& w) { cfg.dt_obs = parse_number(v, w); }},
        {"t_m", [&](auto v, auto& w) { cfg.t_m = parse_number(v, w); }},
        {"sim_dt", [&](auto v, auto& w) { cfg.sim_dt = parse_number(v, w); }},
        {"interpolation",
         [&](auto v, auto& w) {
             if (v == "linear") {
                 cfg.interpolation = DebtInterpolation::linear;
             } else if (v == "step") {
                 cfg.interpolation = DebtInterpolation::step;
             } else {
                 throw InputError(w + ": interpolation must be linear or step");
             }
         }},
        {"cds_maturity", [&](auto v, auto& w) { cfg.cds_maturity = parse_number(v, w); }},
        {"cds_frequency", [&](auto v, auto& w) { cfg.cds_frequency = static_cast<int>(parse_unsigned(v, w)); }},
        {"w_grid", [&](auto v, auto& w) { cfg.w_grid = parse_list(v, w); }},
        {"write_samples", [&](auto v, auto& w) { cfg.write_samples = parse_bool(v, w); }},
    };
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const std::string where = "config line " + std::to_string(line_no);
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw InputError(where + ": expected key = value");
        }
        const std::string_view key = trim(view.substr(0, eq));
        std::string_view value = trim(view.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw InputError(where + ": unknown key '" + std::string(key) + "'");
        }
        it->second(value, where);
    }
    validate(cfg);
    return cfg;
}

RunConfig read_run_config(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_run_config(in);
}

void validate(const RunConfig& cfg) {
    if (cfg.lookback < 100) {
        throw InputError("lookback must be at least 100 observations");
    }
    if (!(cfg.target_dp5 > 0.0 && cfg.target_dp5 < 1.0)) {
        throw InputError("target_dp5 must lie in (0, 1)");
    }
    if (cfg.alpha_grid.empty()) {
        throw InputError("alpha_grid must not be empty");
    }
    for (double a : cfg.alpha_grid) {
        if (!(a > 1.0)) {
            throw InputError("alpha_grid values must exceed 1");
        }
    }
    for (double w : cfg.w_grid) {
        if (!(w >= 0.0 && w <= 1.0)) {
            throw InputError("w_grid values must lie in [0, 1]");
        }
    }
    if (!std::isfinite(cfg.r) || !(cfg.dt_obs > 0.0) || !(cfg.t_m > 0.0) || !(cfg.sim_dt > 0.0) ||
        !(cfg.cds_maturity > 0.0) || cfg.cds_frequency < 1 || cfg.n_paths < 1) {
        throw InputError("r, dt_obs, t_m, sim_dt, cds_maturity, cds_frequency and n_paths must be valid");
    }
}

LoadedInputs load_inputs(const std::filesystem::path& equity_csv, const std::filesystem::path& balance_csv,
                         const std::filesystem::path& config) {
    LoadedInputs out;
    out.config = read_run_config(config);
    out.series = build_market_series(read_equity_csv(equity_csv), read_balance_csv(balance_csv), out.config.as_of,
                                     out.config.lookback, out.config.interpolation);
    return out;
}

}  // namespace lgd
