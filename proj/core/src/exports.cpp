#include "regimealloc/exports.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "csv.hpp"
#include "regimealloc/errors.hpp"

namespace regimealloc {

void write_coefficient_series_csv(const std::string& path,
                                  const EfCoefficientSeries& series) {
    csv::Writer out(path);
    for (const char* name : {"year", "month", "A", "B", "C", "r_mvp", "sigma_mvp", "u"}) {
        out.field(std::string(name));
    }
    out.endrow();
    for (std::size_t i = 0; i < series.size(); ++i) {
        const MonthKey& m = series.months[i];
        const EfCoefficients& c = series.coeffs[i];
        out.field(m.year);
        out.field(m.month);
        out.field(c.a);
        out.field(c.b);
        out.field(c.c);
        out.field(c.r_mvp);
        out.field(c.sigma_mvp);
        out.field(c.u);
        out.endrow();
    }
}

void write_state_sequence_csv(const std::string& path, const StateSequence& states) {
    csv::Writer out(path);
    out.field(std::string("year"));
    out.field(std::string("month"));
    out.field(std::string("state"));
    out.endrow();
    for (std::size_t i = 0; i < states.months.size(); ++i) {
        out.field(states.months[i].year);
        out.field(states.months[i].month);
        out.field(states.labels[i]);
        out.endrow();
    }
}

void write_dendrogram_csv(const std::string& path, const Dendrogram& dendrogram) {
    csv::Writer out(path);
    out.field(std::string("left_id"));
    out.field(std::string("right_id"));
    out.field(std::string("height"));
    out.field(std::string("size"));
    out.endrow();
    for (const DendrogramMerge& m : dendrogram.merges) {
        out.field(m.left);
        out.field(m.right);
        out.field(m.height);
        out.field(m.size);
        out.endrow();
    }
}

namespace {

void write_state_header(csv::Writer& out, int k) {
    for (int j = 1; j <= k; ++j) {
        out.field("state_" + std::to_string(j));
    }
    out.endrow();
}

}  // namespace

void write_transition_matrix_csv(const std::string& path, const TransitionMatrix& p) {
    csv::Writer out(path);
    write_state_header(out, p.k);
    for (int i = 0; i < p.k; ++i) {
        for (int j = 0; j < p.k; ++j) {
            out.field(p.p(i, j));
        }
        out.endrow();
    }
}

void write_steady_state_csv(const std::string& path, const SteadyState& pi) {
    csv::Writer out(path);
    const int k = static_cast<int>(pi.pi.size());
    write_state_header(out, k);
    for (int j = 0; j < k; ++j) {
        out.field(pi.pi(j));
    }
    out.endrow();
}

void write_state_weight_matrix_csv(const std::string& path,
                                   const StateWeightMatrix& w,
                                   const std::vector<std::string>& tickers) {
    csv::Writer out(path);
    out.field(std::string("state"));
    out.field(std::string("budget"));
    out.field(std::string("sharpe"));
    for (const std::string& t : tickers) out.field(t);
    out.endrow();
    for (Eigen::Index s = 0; s < w.w.rows(); ++s) {
        out.field(static_cast<int>(s) + 1);
        out.field(w.budgets[static_cast<std::size_t>(s)]);
        out.field(w.sharpes[static_cast<std::size_t>(s)]);
        for (Eigen::Index a = 0; a < w.w.cols(); ++a) {
            out.field(w.w(s, a));
        }
        out.endrow();
    }
}

namespace {

void write_named_series(const std::string& path, const BacktestResult& result,
                        const std::vector<std::pair<std::string, Eigen::VectorXd>>& columns) {
    csv::Writer out(path);
    out.field(std::string("date"));
    for (const auto& [name, series] : columns) out.field(name);
    out.endrow();
    for (std::size_t t = 0; t < result.dates.size(); ++t) {
        out.field(result.dates[t].to_string());
        for (const auto& [name, series] : columns) {
            out.field(series(static_cast<Eigen::Index>(t)));
        }
        out.endrow();
    }
}

}  // namespace

void write_daily_returns_csv(const std::string& path, const BacktestResult& result) {
    write_named_series(path, result, result.net_returns);
}

void write_wealth_csv(const std::string& path, const BacktestResult& result) {
    write_named_series(path, result, result.wealth);
}

void write_weights_csv(const std::string& path, const BacktestResult& result) {
    csv::Writer out(path);
    out.field(std::string("year"));
    out.field(std::string("month"));
    for (const std::string& t : result.tickers) out.field(t);
    out.endrow();
    for (std::size_t m = 0; m < result.weight_months.size(); ++m) {
        out.field(result.weight_months[m].year);
        out.field(result.weight_months[m].month);
        for (Eigen::Index a = 0; a < result.weight_history.cols(); ++a) {
            out.field(result.weight_history(static_cast<Eigen::Index>(m), a));
        }
        out.endrow();
    }
}

namespace {

nlohmann::json json_number(double v) {
    // JSON has no NaN/inf literals; encode them as null.
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

void write_metrics_json(const std::string& path, const BacktestResult& result,
                        const BacktestConfig& cfg,
                        const std::vector<std::pair<std::string, std::string>>& inputs) {
    nlohmann::json doc;

    nlohmann::json config;
    config["k"] = cfg.k;
    config["test_start"] = cfg.test_start.to_string();
    config["gross_cap"] = cfg.gross_cap;
    config["fee_rate"] = cfg.fee_rate;
    config["ridge"] = cfg.ridge;
    config["standardize"] = cfg.standardize;
    config["linkage"] = to_string(cfg.linkage);
    config["rf_aggregation"] = to_string(cfg.rf_aggregation);
    config["subtract_rf_zero_budget"] = cfg.subtract_rf_zero_budget;
    config["seed"] = cfg.seed;
    config["benchmarks"] = cfg.benchmarks;
    doc["config"] = config;

    nlohmann::json inputs_json = nlohmann::json::object();
    for (const auto& [key, value] : inputs) inputs_json[key] = value;
    doc["inputs"] = inputs_json;

    if (!result.dates.empty()) {
        doc["test_window"] = {{"first_date", result.dates.front().to_string()},
                              {"last_date", result.dates.back().to_string()},
                              {"days", result.dates.size()},
                              {"months", result.weight_months.size()}};
    }

    nlohmann::json series = nlohmann::json::object();
    for (const auto& [name, metrics] : result.metrics.per_series) {
        series[name] = {{"sharpe", json_number(metrics.sharpe)},
                        {"annualized_return", json_number(metrics.ann_return)},
                        {"max_drawdown", json_number(metrics.mdd)}};
    }
    doc["metrics"] = series;

    nlohmann::json alphas = nlohmann::json::object();
    for (const auto& [name, alpha] : result.metrics.alphas) {
        alphas[name] = {{"annual_alpha", json_number(alpha.annual_alpha)},
                        {"p_value", json_number(alpha.p_value)},
                        {"beta", json_number(alpha.beta)},
                        {"daily_alpha", json_number(alpha.daily_alpha)}};
    }
    doc["alpha_regressions"] = alphas;

    doc["warnings"] = result.warnings;

    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Argument, "cannot open for writing: " + path);
    }
    out << doc.dump(2) << '\n';
}

NamedSeries read_daily_returns_csv(const std::string& path) {
    csv::Table table = csv::read_table(path);
    if (table.header.size() < 2 || table.header.front() != "date") {
        throw Error(ErrorKind::Parse,
                    path + ": expected header 'date,<series>...'");
    }
    NamedSeries out;
    const std::size_t n_series = table.header.size() - 1;
    const Eigen::Index n_rows = static_cast<Eigen::Index>(table.rows.size());
    for (std::size_t s = 0; s < n_series; ++s) {
        out.series.emplace_back(table.header[s + 1], Eigen::VectorXd(n_rows));
    }
    out.dates.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& cells = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        if (cells.size() != table.header.size()) {
            throw Error(ErrorKind::Parse, path + ": line " + std::to_string(line) +
                                              ": expected " +
                                              std::to_string(table.header.size()) +
                                              " fields");
        }
        try {
            out.dates.push_back(Date::parse(cells.front()));
        } catch (const Error& e) {
            throw Error(ErrorKind::Parse,
                        path + ": line " + std::to_string(line) + ": " + e.what());
        }
        for (std::size_t s = 0; s < n_series; ++s) {
            out.series[s].second(static_cast<Eigen::Index>(i)) =
                csv::parse_double(cells[s + 1], line);
        }
    }
    return out;
}

}  // namespace regimealloc
