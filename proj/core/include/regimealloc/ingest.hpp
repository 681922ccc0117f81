#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regimealloc/date.hpp"

namespace regimealloc {

/// Date-aligned panel of positive adjusted close prices.
/// Invariants: dates strictly increasing, prices fully populated and > 0.
struct PricePanel {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd prices;  // dates x tickers
};

/// Daily simple returns plus an aligned daily risk-free rate (decimal units).
/// Row t is the return realized on dates[t]; every return is > -1.
struct ReturnPanel {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd returns;  // dates x tickers
    Eigen::VectorXd rf;       // one value per date

    Eigen::Index n_days() const { return returns.rows(); }
    Eigen::Index n_assets() const { return returns.cols(); }
};

/// Contiguous block of daily return rows belonging to one calendar month.
struct MonthSlice {
    MonthKey month;
    Eigen::Index first_row = 0;
    Eigen::Index row_count = 0;
};

/// Ordered, disjoint monthly partition of a ReturnPanel's rows.
struct MonthlySlices {
    std::vector<MonthSlice> slices;

    std::size_t size() const { return slices.size(); }
    std::vector<MonthKey> months() const;
};

/// Per-month binary recession indicator; months absent from the source file
/// are reported as unknown.
struct RecessionLabels {
    std::map<MonthKey, bool> by_month;

    std::optional<bool> lookup(const MonthKey& m) const;
};

/// One (date, value) observation of a risk-free rate series, value in percent
/// per day (daily Fama-French convention).
using RfObservation = std::pair<Date, double>;

/// Loads a wide delimited price file (header `date,<ticker1>,...`). Rows with
/// any blank asset cell are dropped; duplicate dates and non-positive prices
/// are rejected; dates are sorted ascending.
PricePanel load_price_panel(const std::string& path,
                            const std::string& date_column = "date");

/// Simple returns prices[t+1]/prices[t] - 1 with the risk-free series
/// forward-filled onto the return dates and converted from percent to
/// decimal. Observations must start on or before the first return date.
ReturnPanel compute_returns(const PricePanel& panel,
                            const std::vector<RfObservation>& rf);

/// File-based variant; reads a two-column `date,rf` file (rf in percent/day).
ReturnPanel compute_returns(const PricePanel& panel, const std::string& rf_path);

/// Reads a two-column `date,rf` file (rf in percent/day, unconverted).
std::vector<RfObservation> load_rf_observations(const std::string& path);

/// Forward-fills the observations onto the given dates and converts percent
/// to decimal. The first date must have an observation at or before it.
Eigen::VectorXd forward_fill_rf(const std::vector<RfObservation>& rf,
                                const std::vector<Date>& dates);

/// Partitions the panel's rows into calendar months. A month with fewer than
/// two trading days is a degenerate-month error.
MonthlySlices group_by_month(const ReturnPanel& panel);

/// Reads a two-column `date,indicator` file with indicator in {0,1} and date
/// the first day of the month.
RecessionLabels load_recession_labels(const std::string& path);

}  // namespace regimealloc
