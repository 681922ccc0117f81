#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "regimealloc/frontier.hpp"
#include "regimealloc/ingest.hpp"
#include "regimealloc/regime.hpp"

namespace regimealloc {

/// How the daily risk-free series is collapsed to the scalar used in the
/// tangency objective.
enum class RfAggregation { Mean, Last, Zero };

RfAggregation rf_aggregation_from_string(const std::string& name);
const char* to_string(RfAggregation agg);

double aggregate_rf(const Eigen::Ref<const Eigen::VectorXd>& rf, RfAggregation agg);

/// Asset weights with their budget convention: weights sum to 1 (fully
/// invested) or 0 (zero net, long-short).
struct PortfolioWeights {
    Eigen::VectorXd w;
    int budget = 1;
    /// Set when no feasible portfolio had positive excess return; the
    /// returned point still maximizes the Sharpe objective.
    bool non_positive_excess = false;
};

/// Daily return rows grouped by the state of their month.
struct StatePartitions {
    int k = 0;
    std::vector<Eigen::MatrixXd> rows_by_state;  // index s-1, each T_s x n
};

struct TangencyOptions {
    double gross_cap = 1.5;
    /// Keep subtracting rf in the numerator for zero-budget portfolios
    /// (the literal objective); false switches to the conventional form.
    bool subtract_rf_zero_budget = true;
    std::uint64_t seed = 0;
};

struct StateWeightOptions {
    double gross_cap = 1.5;
    double ridge = kDefaultRidge;
    RfAggregation rf_aggregation = RfAggregation::Mean;
    bool subtract_rf_zero_budget = true;
    std::uint64_t seed = 0;
};

/// Per-state tangency rows with the chosen budget and in-sample daily Sharpe.
struct StateWeightMatrix {
    Eigen::MatrixXd w;  // K x n
    std::vector<int> budgets;
    std::vector<double> sharpes;
    std::vector<std::string> warnings;
};

/// Assigns every daily return row the state of its month. Each state must
/// end up with at least two rows.
StatePartitions partition_returns_by_state(const ReturnPanel& panel,
                                           const MonthlySlices& slices,
                                           const StateSequence& states);

/// Maximizes (w'r - rf) / sqrt(w'Vw) subject to sum(w) = budget and
/// sum|w| <= gross_cap. When the gross constraint is slack and budget is 1,
/// this is the closed form V^-1 (r - rf e) renormalized; otherwise a
/// seeded multi-start projected gradient ascent. Zero-budget solutions are
/// returned at full gross utilisation (larger scale never hurts the
/// objective, and it pins down the scale the objective leaves free).
PortfolioWeights tangency_portfolio(const SampleMoments& m, double rf,
                                    int budget,
                                    const TangencyOptions& options = {});

/// Realized daily Sharpe of w over the given return rows (not annualized).
/// Returns -infinity when the portfolio's realized stdev is zero.
double in_sample_sharpe(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                        const Eigen::VectorXd& w, double rf);

/// For each state, solves the budget-1 and budget-0 tangency portfolios and
/// keeps the one with the greater in-sample Sharpe (ties prefer budget 1).
/// A state whose covariance stays singular after the ridge falls back to
/// equal weights with a warning.
StateWeightMatrix state_weight_matrix(const StatePartitions& partitions,
                                      const Eigen::Ref<const Eigen::VectorXd>& rf_daily,
                                      const StateWeightOptions& options = {});

/// w* = sum_s p[s] W[s,:], the transition-probability expectation of the
/// per-state rows.
Eigen::VectorXd markov_markowitz_weights(const StateWeightMatrix& w,
                                         const Eigen::VectorXd& transition_probs);

}  // namespace regimealloc
