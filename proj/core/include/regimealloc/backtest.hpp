#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "regimealloc/allocation.hpp"
#include "regimealloc/date.hpp"
#include "regimealloc/ingest.hpp"
#include "regimealloc/markov.hpp"
#include "regimealloc/regime.hpp"

namespace regimealloc {

inline constexpr int kMinTrainingMonths = 24;
inline constexpr double kTradingDaysPerYear = 252.0;

struct BacktestConfig {
    int k = 4;
    MonthKey test_start;
    double gross_cap = 1.5;
    double fee_rate = 0.01;  // cost per unit of traded notional
    double ridge = kDefaultRidge;
    bool standardize = true;
    Linkage linkage = Linkage::Average;
    RfAggregation rf_aggregation = RfAggregation::Mean;
    bool subtract_rf_zero_budget = true;
    std::uint64_t seed = 0;
    /// "tangency", "equal_weight", or a ticker held buy-and-hold.
    std::vector<std::string> benchmarks{"tangency", "equal_weight"};
};

struct SeriesMetrics {
    double sharpe = 0.0;      // annualized
    double ann_return = 0.0;
    double mdd = 0.0;         // in [-1, 0]
};

struct AlphaResult {
    double annual_alpha = 0.0;
    double p_value = 1.0;
    double beta = 0.0;
    double daily_alpha = 0.0;
};

struct MetricsReport {
    std::vector<std::pair<std::string, SeriesMetrics>> per_series;
    std::vector<std::pair<std::string, AlphaResult>> alphas;  // strategy vs each benchmark
};

/// What each monthly iteration saw when it decided its weights: the state
/// labels and transition matrix fitted on the training months, and the state
/// the model was in.
struct IterationSnapshot {
    MonthKey month;
    int current_state = 0;
    Eigen::VectorXd transition_probs;
    StateSequence states;
    TransitionMatrix transitions;
};

struct BacktestResult {
    std::vector<Date> dates;  // test-window daily dates
    std::vector<std::string> tickers;
    Eigen::VectorXd rf;       // aligned to dates
    /// "strategy" first, then benchmarks in configuration order.
    std::vector<std::pair<std::string, Eigen::VectorXd>> net_returns;
    std::vector<std::pair<std::string, Eigen::VectorXd>> wealth;
    std::vector<MonthKey> weight_months;
    Eigen::MatrixXd weight_history;  // one row per test month
    std::vector<IterationSnapshot> iterations;
    MetricsReport metrics;
    std::vector<std::string> warnings;
};

struct HoldingSimulation {
    Eigen::VectorXd net_returns;
    Eigen::VectorXd turnover;  // per day; day 1 includes the entry shift
};

/// Holds w_target through one month of daily returns with daily rebalancing:
/// each day earns w_target . r, drifts, and pays fee_rate times the turnover
/// of rebalancing back to target. Day 1 additionally pays the shift from
/// prior_weights to w_target.
HoldingSimulation simulate_holding(const Eigen::Ref<const Eigen::MatrixXd>& month_returns,
                                   const Eigen::VectorXd& w_target, double fee_rate,
                                   const Eigen::VectorXd& prior_weights);

/// The expanding monthly loop: for each test month, refit coefficients,
/// states, transition matrix and per-state tangency rows on all earlier
/// months, take the transition-weighted expectation of the state rows, and
/// hold it through the month with daily rebalancing and fees. Identical
/// config and data give bit-identical results.
BacktestResult run_online_backtest(const ReturnPanel& panel, const BacktestConfig& cfg);

/// Same loop and costs, but each month holds the plain budget-1 tangency
/// portfolio fitted on all training data, ignoring states.
Eigen::VectorXd benchmark_monthly_tangency(const ReturnPanel& panel,
                                           const BacktestConfig& cfg);

/// Equal-weight portfolio simulated with the same costs, then scaled by
/// k = stdev(strategy) / stdev(equal weight) over the full test window.
Eigen::VectorXd benchmark_equal_weight_vol_targeted(const ReturnPanel& panel,
                                                    const BacktestConfig& cfg,
                                                    const Eigen::VectorXd& strategy_returns);

/// Wealth path compounded from 1.0 (one entry per day, after that day's return).
Eigen::VectorXd wealth_curve(const Eigen::Ref<const Eigen::VectorXd>& returns);

double annualized_return(const Eigen::Ref<const Eigen::VectorXd>& returns);

/// Largest peak-to-trough decline of the wealth curve, in [-1, 0].
double max_drawdown(const Eigen::Ref<const Eigen::VectorXd>& returns);

/// Annualized Sharpe, annualized return and max drawdown of a daily series.
/// Zero excess-return stdev is an error.
SeriesMetrics compute_metrics(const Eigen::Ref<const Eigen::VectorXd>& returns,
                              const Eigen::Ref<const Eigen::VectorXd>& rf);

/// OLS of (strategy - rf) on (benchmark - rf) with intercept; the annual
/// alpha is 252 times the intercept and the p-value is the two-sided t-test
/// on the intercept with N-2 degrees of freedom.
AlphaResult alpha_regression(const Eigen::Ref<const Eigen::VectorXd>& strategy,
                             const Eigen::Ref<const Eigen::VectorXd>& benchmark,
                             const Eigen::Ref<const Eigen::VectorXd>& rf);

/// Two-sided p-value of a t statistic with `dof` degrees of freedom.
double student_t_two_sided_p(double t, int dof);

}  // namespace regimealloc
