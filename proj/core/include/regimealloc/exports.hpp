#pragma once

#include <string>
#include <vector>

#include "regimealloc/backtest.hpp"
#include "regimealloc/frontier.hpp"
#include "regimealloc/markov.hpp"
#include "regimealloc/regime.hpp"

namespace regimealloc {

/// Plot-ready delimited-text and JSON writers for every pipeline artifact.
/// Numbers are written with enough digits to round-trip exactly.

// `year,month,A,B,C,r_mvp,sigma_mvp,u`
void write_coefficient_series_csv(const std::string& path,
                                  const EfCoefficientSeries& series);

// `year,month,state`
void write_state_sequence_csv(const std::string& path, const StateSequence& states);

// One merge per line: `left_id,right_id,height,size`, preceded by a header.
void write_dendrogram_csv(const std::string& path, const Dendrogram& dendrogram);

// K-column header row, then K data rows.
void write_transition_matrix_csv(const std::string& path, const TransitionMatrix& p);

// K-column header row, then pi as a single row.
void write_steady_state_csv(const std::string& path, const SteadyState& pi);

// `state,budget,sharpe,<ticker1>,...`
void write_state_weight_matrix_csv(const std::string& path,
                                   const StateWeightMatrix& w,
                                   const std::vector<std::string>& tickers);

// `date,<series1>,<series2>,...` in result order.
void write_daily_returns_csv(const std::string& path, const BacktestResult& result);

void write_wealth_csv(const std::string& path, const BacktestResult& result);

// `year,month,<ticker1>,...`
void write_weights_csv(const std::string& path, const BacktestResult& result);

/// Nested metrics report with the exact resolved configuration (seed
/// included) needed to reproduce the run.
void write_metrics_json(const std::string& path, const BacktestResult& result,
                        const BacktestConfig& cfg,
                        const std::vector<std::pair<std::string, std::string>>& inputs);

/// Reads a `date,<name>...` file written by write_daily_returns_csv.
struct NamedSeries {
    std::vector<Date> dates;
    std::vector<std::pair<std::string, Eigen::VectorXd>> series;
};
NamedSeries read_daily_returns_csv(const std::string& path);

}  // namespace regimealloc
