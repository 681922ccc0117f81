#include "regimealloc/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "linalg.hpp"
#include "regimealloc/errors.hpp"

namespace regimealloc {

RfAggregation rf_aggregation_from_string(const std::string& name) {
    if (name == "mean") return RfAggregation::Mean;
    if (name == "last") return RfAggregation::Last;
    if (name == "zero") return RfAggregation::Zero;
    throw Error(ErrorKind::Argument,
                "unknown rf aggregation '" + name + "', expected mean, last, or zero");
}

const char* to_string(RfAggregation agg) {
    switch (agg) {
        case RfAggregation::Mean: return "mean";
        case RfAggregation::Last: return "last";
        case RfAggregation::Zero: return "zero";
    }
    return "unknown";
}

double aggregate_rf(const Eigen::Ref<const Eigen::VectorXd>& rf, RfAggregation agg) {
    if (agg == RfAggregation::Zero) return 0.0;
    if (rf.size() == 0) {
        throw Error(ErrorKind::Argument,
                    "cannot aggregate an empty risk-free series");
    }
    return agg == RfAggregation::Mean ? rf.mean() : rf(rf.size() - 1);
}

StatePartitions partition_returns_by_state(const ReturnPanel& panel,
                                           const MonthlySlices& slices,
                                           const StateSequence& states) {
    if (states.months.size() != slices.size()) {
        throw Error(ErrorKind::Argument,
                    "state sequence covers " + std::to_string(states.months.size()) +
                        " months but the panel has " + std::to_string(slices.size()));
    }
    for (std::size_t i = 0; i < slices.size(); ++i) {
        if (!(states.months[i] == slices.slices[i].month)) {
            throw Error(ErrorKind::Argument,
                        "state sequence month " + states.months[i].to_string() +
                            " does not match panel month " +
                            slices.slices[i].month.to_string());
        }
    }

    const int k = states.k;
    std::vector<Eigen::Index> row_counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < slices.size(); ++i) {
        row_counts[static_cast<std::size_t>(states.labels[i] - 1)] +=
            slices.slices[i].row_count;
    }
    for (int s = 1; s <= k; ++s) {
        if (row_counts[static_cast<std::size_t>(s - 1)] < 2) {
            throw Error(ErrorKind::Degenerate,
                        "state " + std::to_string(s) + " has " +
                            std::to_string(row_counts[static_cast<std::size_t>(s - 1)]) +
                            " daily rows, need at least 2");
        }
    }

    StatePartitions out;
    out.k = k;
    out.rows_by_state.resize(static_cast<std::size_t>(k));
    for (int s = 0; s < k; ++s) {
        out.rows_by_state[static_cast<std::size_t>(s)].resize(
            row_counts[static_cast<std::size_t>(s)], panel.n_assets());
    }
    std::vector<Eigen::Index> fill(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < slices.size(); ++i) {
        const MonthSlice& slice = slices.slices[i];
        const std::size_t s = static_cast<std::size_t>(states.labels[i] - 1);
        out.rows_by_state[s].middleRows(fill[s], slice.row_count) =
            panel.returns.middleRows(slice.first_row, slice.row_count);
        fill[s] += slice.row_count;
    }
    return out;
}

namespace {

/// Euclidean projection onto the L1 ball of radius `cap` (sort-based
/// soft-threshold construction).
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double cap) {
    if (v.lpNorm<1>() <= cap) return v;
    const Eigen::Index n = v.size();
    std::vector<double> mags(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) mags[static_cast<std::size_t>(i)] = std::abs(v(i));
    std::sort(mags.begin(), mags.end(), std::greater<double>());

    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < mags.size(); ++j) {
        cumulative += mags[j];
        double candidate = (cumulative - cap) / static_cast<double>(j + 1);
        if (mags[j] - candidate > 0.0) {
            theta = candidate;
        } else {
            break;
        }
    }
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double mag = std::abs(v(i)) - theta;
        out(i) = mag > 0.0 ? (v(i) > 0.0 ? mag : -mag) : 0.0;
    }
    return out;
}

/// Dykstra alternating projection onto {sum w = budget} intersect
/// {||w||_1 <= cap}.
Eigen::VectorXd project_feasible(const Eigen::VectorXd& v, double budget, double cap) {
    const Eigen::Index n = v.size();
    Eigen::VectorXd x = v;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd y = x + p;
        y.array() -= (y.sum() - budget) / static_cast<double>(n);
        p = x + p - y;
        Eigen::VectorXd z = project_l1_ball(y + q, cap);
        q = y + q - z;
        bool sum_ok = std::abs(z.sum() - budget) <= 1e-13;
        bool gross_ok = z.lpNorm<1>() <= cap + 1e-13;
        x = std::move(z);
        if (sum_ok && gross_ok) break;
    }
    return x;
}

struct SharpeObjective {
    const Eigen::MatrixXd& cov;
    const Eigen::VectorXd& mean;
    double rf;

    double value(const Eigen::VectorXd& w) const {
        double var = w.dot(cov * w);
        if (!(var > 0.0)) return -std::numeric_limits<double>::infinity();
        return (w.dot(mean) - rf) / std::sqrt(var);
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& w) const {
        Eigen::VectorXd vw = cov * w;
        double var = w.dot(vw);
        double sigma = std::sqrt(var);
        double excess = w.dot(mean) - rf;
        return mean / sigma - (excess / (var * sigma)) * vw;
    }
};

/// Projected gradient ascent with an adaptive step; small dense problems, so
/// the simple scheme converges in a few hundred iterations.
Eigen::VectorXd ascend(const SharpeObjective& objective, Eigen::VectorXd w,
                       double budget, double cap) {
    double step = 0.1;
    double value = objective.value(w);
    for (int it = 0; it < 600 && step > 1e-14; ++it) {
        if (!std::isfinite(value)) break;
        Eigen::VectorXd candidate =
            project_feasible(w + step * objective.gradient(w), budget, cap);
        double candidate_value = objective.value(candidate);
        if (candidate_value > value + 1e-15) {
            w = std::move(candidate);
            value = candidate_value;
            step *= 1.25;
        } else {
            step *= 0.5;
        }
    }
    return w;
}

}  // namespace

PortfolioWeights tangency_portfolio(const SampleMoments& m, double rf, int budget,
                                    const TangencyOptions& options) {
    if (budget != 0 && budget != 1) {
        throw Error(ErrorKind::Argument, "budget must be 0 or 1");
    }
    const double cap = options.gross_cap;
    if (cap < static_cast<double>(std::abs(budget))) {
        throw Error(ErrorKind::Argument,
                    "gross cap " + std::to_string(cap) +
                        " is below the budget; no feasible portfolio");
    }
    const Eigen::Index n = m.cov.rows();
    if (n < 1) {
        throw Error(ErrorKind::Argument, "empty moment inputs");
    }
    if (budget == 0 && (n == 1 || cap <= 0.0)) {
        throw Error(ErrorKind::Argument,
                    "zero-net portfolio is identically zero under these "
                    "constraints; no feasible point with positive risk");
    }

    const double objective_rf =
        (budget == 0 && !options.subtract_rf_zero_budget) ? 0.0 : rf;
    SharpeObjective objective{m.cov, m.mean, objective_rf};
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd z = detail::solve_spd(m.cov, m.mean - rf * ones);

    // Unconstrained tangency direction, usable directly when its normalized
    // form is feasible.
    if (budget == 1) {
        double s = z.sum();
        if (s > 0.0) {
            Eigen::VectorXd w = z / s;
            if (w.lpNorm<1>() <= cap) {
                PortfolioWeights out;
                out.w = std::move(w);
                out.budget = 1;
                out.non_positive_excess = out.w.dot(m.mean) - rf <= 0.0;
                return out;
            }
        }
    }

    // Constrained case: multi-start projected gradient ascent. Starts cover
    // the clipped closed form, simple heuristics, and seeded random points.
    std::vector<Eigen::VectorXd> starts;
    const double b = static_cast<double>(budget);
    starts.push_back(project_feasible(z, b, cap));
    if (z.sum() != 0.0) {
        starts.push_back(project_feasible(z / z.sum(), b, cap));
    }
    starts.push_back(project_feasible(ones / static_cast<double>(n), b, cap));
    Eigen::VectorXd demeaned = m.mean.array() - m.mean.mean();
    if (demeaned.lpNorm<1>() > 0.0) {
        starts.push_back(
            project_feasible(b * ones / static_cast<double>(n) +
                                 demeaned * (cap / demeaned.lpNorm<1>()),
                             b, cap));
    }
    std::mt19937_64 rng(detail::mix_seed(options.seed, 0x74616e67ULL));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int r = 0; r < 24; ++r) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
        starts.push_back(project_feasible(b * ones / static_cast<double>(n) + v, b, cap));
    }

    Eigen::VectorXd best;
    double best_value = -std::numeric_limits<double>::infinity();
    for (const Eigen::VectorXd& start : starts) {
        Eigen::VectorXd w = ascend(objective, start, b, cap);
        if (budget == 0) {
            // Scale is free in the constraint set; for rf >= 0 the objective
            // never decreases with scale, so pin it at the full gross cap.
            double gross = w.lpNorm<1>();
            if (gross > 1e-12) {
                w = project_feasible(w * (cap / gross), 0.0, cap);
            }
        }
        double value = objective.value(w);
        if (value > best_value) {
            best_value = value;
            best = std::move(w);
        }
    }
    if (!best.size() || !std::isfinite(best_value)) {
        throw Error(ErrorKind::Degenerate,
                    "tangency search found no feasible portfolio with positive risk");
    }

    if (std::abs(best.sum() - b) > 1e-8 || best.lpNorm<1>() > cap + 1e-8) {
        throw Error(ErrorKind::NumericalConsistency,
                    "tangency solution violates its constraints beyond tolerance");
    }
    PortfolioWeights out;
    out.w = std::move(best);
    out.budget = budget;
    out.non_positive_excess = out.w.dot(m.mean) - rf <= 0.0;
    return out;
}

double in_sample_sharpe(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                        const Eigen::VectorXd& w, double rf) {
    if (rows.rows() < 2) {
        throw Error(ErrorKind::Degenerate,
                    "need at least 2 rows for an in-sample Sharpe");
    }
    Eigen::VectorXd excess = (rows * w).array() - rf;
    double mean = excess.mean();
    double sd = std::sqrt((excess.array() - mean).square().sum() /
                          static_cast<double>(excess.size() - 1));
    if (sd == 0.0) return -std::numeric_limits<double>::infinity();
    return mean / sd;
}

StateWeightMatrix state_weight_matrix(const StatePartitions& partitions,
                                      const Eigen::Ref<const Eigen::VectorXd>& rf_daily,
                                      const StateWeightOptions& options) {
    const int k = partitions.k;
    if (k < 1 || partitions.rows_by_state.empty()) {
        throw Error(ErrorKind::Argument, "empty state partitions");
    }
    const Eigen::Index n = partitions.rows_by_state.front().cols();
    const double rf = aggregate_rf(rf_daily, options.rf_aggregation);

    StateWeightMatrix out;
    out.w.resize(k, n);
    out.budgets.resize(static_cast<std::size_t>(k));
    out.sharpes.resize(static_cast<std::size_t>(k));

    for (int s = 1; s <= k; ++s) {
        const Eigen::MatrixXd& rows =
            partitions.rows_by_state[static_cast<std::size_t>(s - 1)];
        PortfolioWeights chosen;
        double chosen_sharpe = 0.0;
        bool solved = false;
        try {
            SampleMoments moments = sample_mean_cov(rows, options.ridge);
            TangencyOptions tangency;
            tangency.gross_cap = options.gross_cap;
            tangency.subtract_rf_zero_budget = options.subtract_rf_zero_budget;

            tangency.seed = detail::mix_seed(options.seed,
                                             static_cast<std::uint64_t>(2 * s));
            PortfolioWeights fully = tangency_portfolio(moments, rf, 1, tangency);
            double sharpe_fully = in_sample_sharpe(rows, fully.w, rf);
            chosen = fully;
            chosen_sharpe = sharpe_fully;

            if (n > 1) {
                tangency.seed = detail::mix_seed(
                    options.seed, static_cast<std::uint64_t>(2 * s + 1));
                PortfolioWeights zero_net = tangency_portfolio(moments, rf, 0, tangency);
                double rf_for_sharpe = options.subtract_rf_zero_budget ? rf : 0.0;
                double sharpe_zero = in_sample_sharpe(rows, zero_net.w, rf_for_sharpe);
                // Ties prefer the fully invested book.
                if (sharpe_zero > sharpe_fully + 1e-10) {
                    chosen = zero_net;
                    chosen_sharpe = sharpe_zero;
                }
            }
            solved = true;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::LinearAlgebra &&
                e.kind() != ErrorKind::Degenerate &&
                e.kind() != ErrorKind::NumericalConsistency) {
                throw;
            }
            out.warnings.push_back("state " + std::to_string(s) +
                                   ": tangency solve failed (" + e.what() +
                                   "), using equal weights");
        }
        if (!solved) {
            chosen.w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
            chosen.budget = 1;
            chosen_sharpe = in_sample_sharpe(rows, chosen.w, rf);
        } else if (chosen.non_positive_excess) {
            out.warnings.push_back("state " + std::to_string(s) +
                                   ": no portfolio with positive excess return; "
                                   "keeping the Sharpe-optimal point");
        }
        out.w.row(s - 1) = chosen.w.transpose();
        out.budgets[static_cast<std::size_t>(s - 1)] = chosen.budget;
        out.sharpes[static_cast<std::size_t>(s - 1)] = chosen_sharpe;
    }
    return out;
}

Eigen::VectorXd markov_markowitz_weights(const StateWeightMatrix& w,
                                         const Eigen::VectorXd& transition_probs) {
    if (transition_probs.size() != w.w.rows()) {
        throw Error(ErrorKind::Argument,
                    "transition row length " + std::to_string(transition_probs.size()) +
                        " does not match state count " + std::to_string(w.w.rows()));
    }
    return w.w.transpose() * transition_probs;
}

}  // namespace regimealloc
