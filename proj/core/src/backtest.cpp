#include "regimealloc/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <vector>

#include "linalg.hpp"
#include "regimealloc/errors.hpp"
#include "regimealloc/frontier.hpp"

namespace regimealloc {

HoldingSimulation simulate_holding(const Eigen::Ref<const Eigen::MatrixXd>& month_returns,
                                   const Eigen::VectorXd& w_target, double fee_rate,
                                   const Eigen::VectorXd& prior_weights) {
    const Eigen::Index days = month_returns.rows();
    const Eigen::Index n = month_returns.cols();
    if (w_target.size() != n || prior_weights.size() != n) {
        throw Error(ErrorKind::Argument,
                    "weight vector length does not match the asset count");
    }
    if (fee_rate < 0.0) {
        throw Error(ErrorKind::Argument, "fee rate must be non-negative");
    }

    HoldingSimulation sim;
    sim.net_returns.resize(days);
    sim.turnover.resize(days);
    for (Eigen::Index d = 0; d < days; ++d) {
        const auto r = month_returns.row(d);
        double gross = w_target.dot(r.transpose());
        if (1.0 + gross <= 0.0) {
            throw Error(ErrorKind::Degenerate,
                        "portfolio lost its entire value within a day");
        }
        // Intraday drift away from the target, rebalanced at the close.
        Eigen::VectorXd drifted =
            (w_target.array() * (1.0 + r.transpose().array())) / (1.0 + gross);
        double turnover = (w_target - drifted).lpNorm<1>();
        if (d == 0) {
            turnover += (w_target - prior_weights).lpNorm<1>();
        }
        sim.turnover(d) = turnover;
        sim.net_returns(d) = gross - fee_rate * turnover;
    }
    return sim;
}

Eigen::VectorXd wealth_curve(const Eigen::Ref<const Eigen::VectorXd>& returns) {
    Eigen::VectorXd wealth(returns.size());
    double w = 1.0;
    for (Eigen::Index t = 0; t < returns.size(); ++t) {
        w *= 1.0 + returns(t);
        wealth(t) = w;
    }
    return wealth;
}

double annualized_return(const Eigen::Ref<const Eigen::VectorXd>& returns) {
    const Eigen::Index n = returns.size();
    if (n < 1) {
        throw Error(ErrorKind::Argument, "empty return series");
    }
    double total = 1.0;
    for (Eigen::Index t = 0; t < n; ++t) total *= 1.0 + returns(t);
    if (total <= 0.0) {
        throw Error(ErrorKind::Degenerate,
                    "terminal wealth is not positive; annualized return undefined");
    }
    return std::pow(total, kTradingDaysPerYear / static_cast<double>(n)) - 1.0;
}

double max_drawdown(const Eigen::Ref<const Eigen::VectorXd>& returns) {
    double wealth = 1.0;
    double peak = 1.0;
    double mdd = 0.0;
    for (Eigen::Index t = 0; t < returns.size(); ++t) {
        wealth *= 1.0 + returns(t);
        peak = std::max(peak, wealth);
        mdd = std::min(mdd, wealth / peak - 1.0);
    }
    return mdd;
}

namespace {

double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& x) {
    double mean = x.mean();
    return std::sqrt((x.array() - mean).square().sum() /
                     static_cast<double>(x.size() - 1));
}

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (x > (a + 1.0) / (a + b + 2.0)) {
        return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
    }
    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta) / a;

    double f = 1.0, c = 1.0, d = 0.0;
    for (int i = 0; i <= 400; ++i) {
        int m = i / 2;
        double numerator;
        if (i == 0) {
            numerator = 1.0;
        } else if (i % 2 == 0) {
            numerator = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        } else {
            numerator =
                -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        }
        d = 1.0 + numerator * d;
        if (std::abs(d) < 1e-30) d = 1e-30;
        d = 1.0 / d;
        c = 1.0 + numerator / c;
        if (std::abs(c) < 1e-30) c = 1e-30;
        f *= c * d;
        if (std::abs(1.0 - c * d) < 1e-12) break;
    }
    return front * (f - 1.0);
}

}  // namespace

double student_t_two_sided_p(double t, int dof) {
    if (dof < 1) {
        throw Error(ErrorKind::Argument, "degrees of freedom must be positive");
    }
    if (std::isinf(t)) return 0.0;
    double x = dof / (dof + t * t);
    return regularized_incomplete_beta(dof / 2.0, 0.5, x);
}

SeriesMetrics compute_metrics(const Eigen::Ref<const Eigen::VectorXd>& returns,
                              const Eigen::Ref<const Eigen::VectorXd>& rf) {
    if (returns.size() < 2) {
        throw Error(ErrorKind::Degenerate,
                    "need at least 2 observations for metrics");
    }
    if (returns.size() != rf.size()) {
        throw Error(ErrorKind::Argument,
                    "return and risk-free series lengths differ");
    }
    Eigen::VectorXd excess = returns - rf;
    double sd = sample_sd(excess);
    if (sd == 0.0) {
        throw Error(ErrorKind::Degenerate,
                    "excess returns have zero standard deviation; Sharpe undefined");
    }
    SeriesMetrics m;
    m.sharpe = excess.mean() / sd * std::sqrt(kTradingDaysPerYear);
    m.ann_return = annualized_return(returns);
    m.mdd = max_drawdown(returns);
    return m;
}

AlphaResult alpha_regression(const Eigen::Ref<const Eigen::VectorXd>& strategy,
                             const Eigen::Ref<const Eigen::VectorXd>& benchmark,
                             const Eigen::Ref<const Eigen::VectorXd>& rf) {
    const Eigen::Index n = strategy.size();
    if (benchmark.size() != n || rf.size() != n) {
        throw Error(ErrorKind::Argument, "series lengths differ");
    }
    if (n < 30) {
        throw Error(ErrorKind::Degenerate,
                    "need at least 30 observations for an alpha regression, have " +
                        std::to_string(n));
    }
    Eigen::VectorXd y = strategy - rf;
    Eigen::VectorXd x = benchmark - rf;
    const double x_mean = x.mean();
    const double y_mean = y.mean();
    const double sxx = (x.array() - x_mean).square().sum();
    if (sxx == 0.0) {
        throw Error(ErrorKind::Degenerate,
                    "benchmark excess returns have zero variance; regression "
                    "undefined");
    }
    const double sxy = ((x.array() - x_mean) * (y.array() - y_mean)).sum();
    const double beta = sxy / sxx;
    const double alpha = y_mean - beta * x_mean;

    Eigen::VectorXd residuals = y.array() - alpha - beta * x.array();
    const double dof = static_cast<double>(n - 2);
    const double s2 = residuals.squaredNorm() / dof;
    const double se_alpha =
        std::sqrt(s2 * (1.0 / static_cast<double>(n) + x_mean * x_mean / sxx));

    AlphaResult out;
    out.daily_alpha = alpha;
    out.annual_alpha = kTradingDaysPerYear * alpha;
    out.beta = beta;
    if (se_alpha == 0.0) {
        out.p_value = alpha == 0.0 ? 1.0 : 0.0;
    } else {
        out.p_value = student_t_two_sided_p(alpha / se_alpha, static_cast<int>(n) - 2);
    }
    return out;
}

namespace {

std::uint64_t month_label(const MonthKey& m) {
    return static_cast<std::uint64_t>(m.year) * 12 +
           static_cast<std::uint64_t>(m.month - 1);
}

constexpr std::uint64_t kTangencyBenchmarkStream = 0x62656e6368ULL;

struct LoopOutput {
    Eigen::VectorXd net;                    // test-window daily net returns
    std::vector<Eigen::VectorXd> targets;   // one target per test month
};

/// Expanding monthly loop shared by the strategy and the benchmark variants.
/// decide(i) must return the target weights for month i using only months
/// before i. The first test month inherits the prior target decide would
/// have produced for the month before it, so the hand-off across any test
/// start is seamless.
LoopOutput run_loop(const ReturnPanel& panel, const MonthlySlices& slices,
                    std::size_t first_test, double fee_rate,
                    const std::function<Eigen::VectorXd(std::size_t)>& decide) {
    Eigen::Index total_rows = 0;
    for (std::size_t i = first_test; i < slices.size(); ++i) {
        total_rows += slices.slices[i].row_count;
    }
    LoopOutput out;
    out.net.resize(total_rows);
    out.targets.reserve(slices.size() - first_test);

    Eigen::VectorXd prior = decide(first_test - 1);
    Eigen::Index cursor = 0;
    for (std::size_t i = first_test; i < slices.size(); ++i) {
        const MonthSlice& slice = slices.slices[i];
        Eigen::VectorXd target = decide(i);
        HoldingSimulation sim = simulate_holding(
            panel.returns.middleRows(slice.first_row, slice.row_count), target,
            fee_rate, prior);
        out.net.segment(cursor, slice.row_count) = sim.net_returns;
        cursor += slice.row_count;
        out.targets.push_back(target);
        prior = std::move(target);
    }
    return out;
}

/// Index of the first month at or after the configured test start, after
/// checking the window leaves enough training data.
std::size_t first_test_index(const MonthlySlices& slices, const BacktestConfig& cfg) {
    if (cfg.test_start.year <= 0) {
        throw Error(ErrorKind::Argument, "test start month is not set");
    }
    std::size_t i0 = slices.size();
    for (std::size_t i = 0; i < slices.size(); ++i) {
        if (!(slices.slices[i].month < cfg.test_start)) {
            i0 = i;
            break;
        }
    }
    if (i0 == slices.size()) {
        throw Error(ErrorKind::Coverage,
                    "test start " + cfg.test_start.to_string() +
                        " is after the last month of data");
    }
    if (static_cast<int>(i0) < kMinTrainingMonths) {
        throw Error(ErrorKind::Argument,
                    "test start " + cfg.test_start.to_string() + " leaves only " +
                        std::to_string(i0) + " training months, need at least " +
                        std::to_string(kMinTrainingMonths));
    }
    return i0;
}

void validate_config(const BacktestConfig& cfg) {
    if (cfg.k < 2) {
        throw Error(ErrorKind::Argument, "cluster count must be at least 2");
    }
    if (cfg.fee_rate < 0.0) {
        throw Error(ErrorKind::Argument, "fee rate must be non-negative");
    }
    if (cfg.gross_cap < 1.0) {
        throw Error(ErrorKind::Argument,
                    "gross cap below 1 makes the fully invested book infeasible");
    }
}

Eigen::VectorXd equal_weights(Eigen::Index n) {
    return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

}  // namespace

BacktestResult run_online_backtest(const ReturnPanel& panel, const BacktestConfig& cfg) {
    validate_config(cfg);
    MonthlySlices slices = group_by_month(panel);
    const std::size_t i0 = first_test_index(slices, cfg);

    BacktestResult result;
    result.tickers = panel.tickers;
    const Eigen::Index first_row = slices.slices[i0].first_row;
    const Eigen::Index n_test = panel.n_days() - first_row;
    result.dates.assign(panel.dates.begin() + first_row, panel.dates.end());
    result.rf = panel.rf.tail(n_test);

    {
        std::vector<Eigen::Index> day_counts;
        day_counts.reserve(slices.size());
        for (const auto& s : slices.slices) day_counts.push_back(s.row_count);
        std::nth_element(day_counts.begin(), day_counts.begin() + day_counts.size() / 2,
                         day_counts.end());
        if (panel.n_assets() >= day_counts[day_counts.size() / 2]) {
            result.warnings.push_back(
                "asset count is at or above the typical trading days per month; "
                "monthly covariance estimates will be noisy");
        }
    }

    std::set<std::string> fit_warnings;
    auto decide = [&](std::size_t i) -> Eigen::VectorXd {
        const MonthKey deciding = slices.slices[i].month;
        const bool record = i >= i0;
        try {
            MonthlySlices training;
            training.slices.assign(slices.slices.begin(),
                                   slices.slices.begin() + static_cast<std::ptrdiff_t>(i));
            EfCoefficientSeries series =
                monthly_coefficients(panel, training, cfg.ridge);
            for (const std::string& w : series.warnings) fit_warnings.insert(w);

            MonthDistanceMatrix corr =
                coefficient_correlation_distance(series, cfg.standardize);
            for (const std::string& w : corr.warnings) fit_warnings.insert(w);
            MonthDistanceMatrix dtw = dtw_distance_matrix(corr);
            ClusterResult cluster = hierarchical_cluster(dtw, cfg.k, cfg.linkage);
            TransitionMatrix transitions =
                estimate_transition_matrix(cluster.states);
            const int current = cluster.states.labels.back();
            Eigen::VectorXd probs = transition_row(transitions, current);

            StatePartitions partitions =
                partition_returns_by_state(panel, training, cluster.states);
            StateWeightOptions swo;
            swo.gross_cap = cfg.gross_cap;
            swo.ridge = cfg.ridge;
            swo.rf_aggregation = cfg.rf_aggregation;
            swo.subtract_rf_zero_budget = cfg.subtract_rf_zero_budget;
            swo.seed = detail::mix_seed(cfg.seed, month_label(deciding));
            StateWeightMatrix swm = state_weight_matrix(
                partitions, panel.rf.head(slices.slices[i].first_row), swo);
            Eigen::VectorXd w = markov_markowitz_weights(swm, probs);

            if (record) {
                for (const std::string& warning : swm.warnings) {
                    fit_warnings.insert("month " + deciding.to_string() + ": " +
                                        warning);
                }
                IterationSnapshot snap;
                snap.month = deciding;
                snap.current_state = current;
                snap.transition_probs = probs;
                snap.states = std::move(cluster.states);
                snap.transitions = std::move(transitions);
                result.iterations.push_back(std::move(snap));
            }
            return w;
        } catch (const Error& e) {
            throw Error(e.kind(), "iteration " + deciding.to_string() + ": " + e.what());
        }
    };

    LoopOutput loop = run_loop(panel, slices, i0, cfg.fee_rate, decide);
    result.net_returns.emplace_back("strategy", loop.net);

    result.weight_months.clear();
    result.weight_history.resize(static_cast<Eigen::Index>(loop.targets.size()),
                                 panel.n_assets());
    for (std::size_t m = 0; m < loop.targets.size(); ++m) {
        result.weight_months.push_back(slices.slices[i0 + m].month);
        result.weight_history.row(static_cast<Eigen::Index>(m)) =
            loop.targets[m].transpose();
    }

    for (const std::string& name : cfg.benchmarks) {
        Eigen::VectorXd series;
        if (name == "tangency") {
            series = benchmark_monthly_tangency(panel, cfg);
        } else if (name == "equal_weight") {
            series = benchmark_equal_weight_vol_targeted(panel, cfg, loop.net);
        } else {
            auto it = std::find(panel.tickers.begin(), panel.tickers.end(), name);
            if (it == panel.tickers.end()) {
                throw Error(ErrorKind::Argument,
                            "unknown benchmark '" + name +
                                "'; expected tangency, equal_weight, or a ticker");
            }
            Eigen::Index col = it - panel.tickers.begin();
            series = panel.returns.col(col).tail(n_test);
        }
        result.net_returns.emplace_back(name, std::move(series));
    }

    for (const auto& [name, series] : result.net_returns) {
        result.wealth.emplace_back(name, wealth_curve(series));
        SeriesMetrics metrics;
        try {
            metrics = compute_metrics(series, result.rf);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Degenerate) throw;
            metrics.sharpe = std::numeric_limits<double>::quiet_NaN();
            metrics.ann_return = annualized_return(series);
            metrics.mdd = max_drawdown(series);
            result.warnings.push_back("series '" + name + "': " + e.what());
        }
        result.metrics.per_series.emplace_back(name, metrics);
    }

    if (n_test >= 30) {
        for (std::size_t b = 1; b < result.net_returns.size(); ++b) {
            const auto& [name, series] = result.net_returns[b];
            try {
                result.metrics.alphas.emplace_back(
                    name, alpha_regression(loop.net, series, result.rf));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Degenerate) throw;
                result.warnings.push_back("alpha vs '" + name + "' skipped: " +
                                          e.what());
            }
        }
    } else {
        result.warnings.push_back(
            "test window shorter than 30 days; alpha regressions skipped");
    }

    result.warnings.insert(result.warnings.end(), fit_warnings.begin(),
                           fit_warnings.end());
    return result;
}

Eigen::VectorXd benchmark_monthly_tangency(const ReturnPanel& panel,
                                           const BacktestConfig& cfg) {
    validate_config(cfg);
    MonthlySlices slices = group_by_month(panel);
    const std::size_t i0 = first_test_index(slices, cfg);

    auto decide = [&](std::size_t i) -> Eigen::VectorXd {
        const MonthSlice& slice = slices.slices[i];
        try {
            SampleMoments moments = sample_mean_cov(
                panel.returns.topRows(slice.first_row), cfg.ridge);
            double rf = aggregate_rf(panel.rf.head(slice.first_row),
                                     cfg.rf_aggregation);
            TangencyOptions options;
            options.gross_cap = cfg.gross_cap;
            options.subtract_rf_zero_budget = cfg.subtract_rf_zero_budget;
            options.seed =
                detail::mix_seed(detail::mix_seed(cfg.seed, kTangencyBenchmarkStream),
                                 month_label(slice.month));
            try {
                return tangency_portfolio(moments, rf, 1, options).w;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::LinearAlgebra &&
                    e.kind() != ErrorKind::Degenerate) {
                    throw;
                }
                return equal_weights(panel.n_assets());
            }
        } catch (const Error& e) {
            throw Error(e.kind(),
                        "iteration " + slice.month.to_string() + ": " + e.what());
        }
    };
    return run_loop(panel, slices, i0, cfg.fee_rate, decide).net;
}

Eigen::VectorXd benchmark_equal_weight_vol_targeted(
    const ReturnPanel& panel, const BacktestConfig& cfg,
    const Eigen::VectorXd& strategy_returns) {
    validate_config(cfg);
    MonthlySlices slices = group_by_month(panel);
    const std::size_t i0 = first_test_index(slices, cfg);

    auto decide = [&](std::size_t) { return equal_weights(panel.n_assets()); };
    Eigen::VectorXd net = run_loop(panel, slices, i0, cfg.fee_rate, decide).net;
    if (strategy_returns.size() != net.size()) {
        throw Error(ErrorKind::Argument,
                    "strategy series length does not match the test window");
    }
    double sd_bench = sample_sd(net);
    if (sd_bench == 0.0) {
        throw Error(ErrorKind::Degenerate,
                    "equal-weight benchmark has zero volatility; cannot "
                    "volatility-target");
    }
    return net * (sample_sd(strategy_returns) / sd_bench);
}

}  // namespace regimealloc
