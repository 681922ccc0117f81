#include "regimealloc/ingest.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "csv.hpp"
#include "regimealloc/errors.hpp"

namespace regimealloc {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Argument: return "argument";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Coverage: return "coverage";
        case ErrorKind::Degenerate: return "degenerate";
        case ErrorKind::LinearAlgebra: return "linear-algebra";
        case ErrorKind::NumericalConsistency: return "numerical-consistency";
        case ErrorKind::ReducibleChain: return "reducible-chain";
    }
    return "unknown";
}

std::vector<MonthKey> MonthlySlices::months() const {
    std::vector<MonthKey> out;
    out.reserve(slices.size());
    for (const auto& s : slices) out.push_back(s.month);
    return out;
}

std::optional<bool> RecessionLabels::lookup(const MonthKey& m) const {
    auto it = by_month.find(m);
    if (it == by_month.end()) return std::nullopt;
    return it->second;
}

PricePanel load_price_panel(const std::string& path, const std::string& date_column) {
    csv::Table table = csv::read_table(path);
    if (table.header.empty() || table.header.front() != date_column) {
        throw Error(ErrorKind::Parse, path + ": first column must be '" + date_column +
                                          "', found '" +
                                          (table.header.empty() ? "" : table.header.front()) +
                                          "'");
    }
    const std::size_t n_assets = table.header.size() - 1;
    if (n_assets < 2) {
        throw Error(ErrorKind::Validation,
                    path + ": need at least 2 asset columns, found " +
                        std::to_string(n_assets));
    }

    struct Row {
        Date date;
        std::vector<double> prices;
    };
    std::vector<Row> rows;
    rows.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& cells = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        if (cells.size() != table.header.size()) {
            throw Error(ErrorKind::Parse,
                        path + ": line " + std::to_string(line) + ": expected " +
                            std::to_string(table.header.size()) + " fields, found " +
                            std::to_string(cells.size()));
        }
        // Inner-join alignment: a blank asset cell drops the whole date.
        bool any_blank = std::any_of(cells.begin() + 1, cells.end(),
                                     [](const std::string& c) { return c.empty(); });
        if (any_blank) continue;

        Row row;
        try {
            row.date = Date::parse(cells.front());
        } catch (const Error& e) {
            throw Error(ErrorKind::Parse,
                        path + ": line " + std::to_string(line) + ": " + e.what());
        }
        row.prices.reserve(n_assets);
        for (std::size_t a = 1; a < cells.size(); ++a) {
            double p = csv::parse_double(cells[a], line);
            if (!(p > 0.0)) {
                throw Error(ErrorKind::Validation,
                            path + ": line " + std::to_string(line) +
                                ": non-positive price " + cells[a] + " for " +
                                table.header[a]);
            }
            row.prices.push_back(p);
        }
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& l, const Row& r) { return l.date < r.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            throw Error(ErrorKind::Validation,
                        path + ": duplicate date " + rows[i].date.to_string());
        }
    }

    PricePanel panel;
    panel.tickers.assign(table.header.begin() + 1, table.header.end());
    panel.dates.reserve(rows.size());
    panel.prices.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(n_assets));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        panel.dates.push_back(rows[i].date);
        for (std::size_t a = 0; a < n_assets; ++a) {
            panel.prices(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) =
                rows[i].prices[a];
        }
    }
    return panel;
}

ReturnPanel compute_returns(const PricePanel& panel,
                            const std::vector<RfObservation>& rf) {
    if (panel.dates.size() < 2) {
        throw Error(ErrorKind::Degenerate,
                    "need at least 2 price dates to compute returns, have " +
                        std::to_string(panel.dates.size()));
    }
    ReturnPanel out;
    out.tickers = panel.tickers;
    const Eigen::Index n_ret = panel.prices.rows() - 1;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    out.returns = panel.prices.bottomRows(n_ret).array() /
                      panel.prices.topRows(n_ret).array() -
                  1.0;

    out.rf = forward_fill_rf(rf, out.dates);
    return out;
}

Eigen::VectorXd forward_fill_rf(const std::vector<RfObservation>& rf,
                                const std::vector<Date>& dates) {
    std::vector<RfObservation> sorted = rf;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const RfObservation& l, const RfObservation& r) {
                         return l.first < r.first;
                     });
    if (dates.empty()) return Eigen::VectorXd();
    if (sorted.empty() || dates.front() < sorted.front().first) {
        throw Error(ErrorKind::Coverage,
                    "risk-free series has no observation on or before " +
                        dates.front().to_string());
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(dates.size()));
    std::size_t j = 0;
    for (std::size_t t = 0; t < dates.size(); ++t) {
        // Forward fill: most recent observation at or before the date.
        while (j + 1 < sorted.size() && !(dates[t] < sorted[j + 1].first)) {
            ++j;
        }
        out(static_cast<Eigen::Index>(t)) = sorted[j].second / 100.0;
    }
    return out;
}

ReturnPanel compute_returns(const PricePanel& panel, const std::string& rf_path) {
    return compute_returns(panel, load_rf_observations(rf_path));
}

std::vector<RfObservation> load_rf_observations(const std::string& path) {
    csv::Table table = csv::read_table(path);
    if (table.header.size() != 2 || table.header[0] != "date" ||
        table.header[1] != "rf") {
        throw Error(ErrorKind::Parse, path + ": expected header 'date,rf'");
    }
    std::vector<RfObservation> rf;
    rf.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& cells = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        if (cells.size() != 2) {
            throw Error(ErrorKind::Parse,
                        path + ": line " + std::to_string(line) + ": expected 2 fields");
        }
        try {
            rf.emplace_back(Date::parse(cells[0]), csv::parse_double(cells[1], line));
        } catch (const Error& e) {
            throw Error(e.kind(),
                        path + ": line " + std::to_string(line) + ": " + e.what());
        }
    }
    return rf;
}

MonthlySlices group_by_month(const ReturnPanel& panel) {
    if (panel.dates.empty()) {
        throw Error(ErrorKind::Degenerate, "return panel is empty");
    }
    MonthlySlices out;
    Eigen::Index start = 0;
    MonthKey current = month_of(panel.dates.front());
    for (Eigen::Index t = 1; t <= panel.n_days(); ++t) {
        bool boundary = t == panel.n_days() ||
                        !(month_of(panel.dates[static_cast<std::size_t>(t)]) == current);
        if (!boundary) continue;
        MonthSlice slice{current, start, t - start};
        if (slice.row_count < 2) {
            throw Error(ErrorKind::Degenerate,
                        "month " + current.to_string() + " has " +
                            std::to_string(slice.row_count) +
                            " trading day(s), need at least 2");
        }
        out.slices.push_back(slice);
        if (t < panel.n_days()) {
            start = t;
            current = month_of(panel.dates[static_cast<std::size_t>(t)]);
        }
    }
    return out;
}

RecessionLabels load_recession_labels(const std::string& path) {
    csv::Table table = csv::read_table(path);
    if (table.header.size() != 2 || table.header[0] != "date" ||
        table.header[1] != "indicator") {
        throw Error(ErrorKind::Parse, path + ": expected header 'date,indicator'");
    }
    RecessionLabels out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& cells = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        if (cells.size() != 2) {
            throw Error(ErrorKind::Parse,
                        path + ": line " + std::to_string(line) + ": expected 2 fields");
        }
        Date d;
        try {
            d = Date::parse(cells[0]);
        } catch (const Error& e) {
            throw Error(ErrorKind::Parse,
                        path + ": line " + std::to_string(line) + ": " + e.what());
        }
        const std::string& value = cells[1];
        if (value != "0" && value != "1") {
            throw Error(ErrorKind::Validation,
                        path + ": line " + std::to_string(line) +
                            ": indicator must be 0 or 1, found '" + value + "'");
        }
        out.by_month[month_of(d)] = value == "1";
    }
    return out;
}

}  // namespace regimealloc
