// End-to-end acceptance checks. Each criterion prints exactly one PASS or
// FAIL line; the process exits nonzero if any criterion fails. Timed
// criteria also fail when they run over their budget.

#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regimealloc/allocation.hpp"
#include "regimealloc/backtest.hpp"
#include "regimealloc/frontier.hpp"
#include "regimealloc/markov.hpp"
#include "regimealloc/regime.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace {

using namespace regimealloc;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

std::string format_double(double x) {
    std::ostringstream out;
    out << std::setprecision(4) << x;
    return out.str();
}

/// Random 30-day return block reused by the two frontier criteria.
Eigen::MatrixXd frontier_rows(int instance) {
    auto rng = synthetic::make_rng(1000 + static_cast<std::uint64_t>(instance));
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = 3 + instance % 3;
    Eigen::MatrixXd rows(30, n);
    for (Eigen::Index t = 0; t < rows.rows(); ++t) {
        for (int a = 0; a < n; ++a) {
            rows(t, a) = 0.0005 + 0.01 * normal(rng);
        }
    }
    return rows;
}

std::string frontier_vs_qp_oracle() {
    for (int i = 0; i < 50; ++i) {
        const Eigen::MatrixXd rows = frontier_rows(i);
        const SampleMoments m = sample_mean_cov(rows);
        const EfCoefficients c =
            combine(ef_raw_coefficients(m), ef_interpretable(ef_raw_coefficients(m)));
        for (int g = 0; g < 20; ++g) {
            const double r = c.r_mvp + (g - 10) * 0.0004;
            const double lib = ef_variance_at(r, c);
            const double qp = oracles::qp_variance_at_return(m.cov, m.mean, r);
            require(std::abs(lib - qp) <= 1e-8,
                    "instance " + std::to_string(i) + ", grid point " +
                        std::to_string(g) + ": variance " + format_double(lib) +
                        " vs oracle " + format_double(qp));
        }
    }
    return "50 instances, 20-point return grids, tolerance 1e-8";
}

std::string mvp_vs_direct_solution() {
    for (int i = 0; i < 50; ++i) {
        const Eigen::MatrixXd rows = frontier_rows(i);
        const SampleMoments m = sample_mean_cov(rows);
        const InterpretableEfCoefficients in =
            ef_interpretable(ef_raw_coefficients(m));
        const Eigen::VectorXd w = oracles::minimum_variance_portfolio(m.cov);
        const double r_direct = w.dot(m.mean);
        const double sigma_direct = std::sqrt(w.dot(m.cov * w));
        require(std::abs(in.r_mvp - r_direct) <= 1e-10,
                "instance " + std::to_string(i) + ": vertex return off by " +
                    format_double(in.r_mvp - r_direct));
        require(std::abs(in.sigma_mvp - sigma_direct) <= 1e-10,
                "instance " + std::to_string(i) + ": vertex stdev off by " +
                    format_double(in.sigma_mvp - sigma_direct));
    }
    return "50 instances, tolerance 1e-10";
}

std::string correlation_distance_endpoints() {
    require(std::abs(correlation_to_distance(1.0) - 0.0) <= 1e-15,
            "rho 1 mapped to " + format_double(correlation_to_distance(1.0)));
    require(std::abs(correlation_to_distance(-1.0) - 2.0) <= 1e-15,
            "rho -1 mapped to " + format_double(correlation_to_distance(-1.0)));
    require(std::abs(correlation_to_distance(0.0) - std::sqrt(2.0)) <= 1e-15,
            "rho 0 mapped to " + format_double(correlation_to_distance(0.0)));

    // The full data path reaches the same endpoints from engineered columns,
    // up to the last-bit correlation rounding the square root magnifies.
    const std::vector<std::array<double, 3>> triples = {
        {0.01, 0.02, 0.03},
        {0.02, 0.04, 0.06},
        {0.03, 0.02, 0.01},
        {0.01, 0.00, 0.01},
    };
    EfCoefficientSeries series;
    for (std::size_t i = 0; i < triples.size(); ++i) {
        series.months.push_back(MonthKey{2010, static_cast<int>(i) + 1});
        EfCoefficients c;
        c.r_mvp = triples[i][0];
        c.sigma_mvp = triples[i][1];
        c.u = triples[i][2];
        series.coeffs.push_back(c);
    }
    const MonthDistanceMatrix m = coefficient_correlation_distance(series, false);
    require(m.d(0, 1) <= 2e-8, "data-path rho 1 gave " + format_double(m.d(0, 1)));
    require(std::abs(m.d(0, 2) - 2.0) <= 1e-14,
            "data-path rho -1 gave " + format_double(m.d(0, 2)));
    require(std::abs(m.d(0, 3) - std::sqrt(2.0)) <= 1e-14,
            "data-path rho 0 gave " + format_double(m.d(0, 3)));
    return "d(1) = 0, d(-1) = 2, d(0) = sqrt(2), tolerance 1e-15";
}

std::string dtw_vs_exhaustive_enumeration() {
    auto rng = synthetic::make_rng(7100);
    std::uniform_int_distribution<int> length(1, 6);
    std::uniform_real_distribution<double> value(-2.0, 2.0);
    for (int pair = 0; pair < 200; ++pair) {
        std::vector<double> a(static_cast<std::size_t>(length(rng)));
        std::vector<double> b(static_cast<std::size_t>(length(rng)));
        for (double& x : a) x = value(rng);
        for (double& x : b) x = value(rng);
        const double fast = dtw_distance(a, b);
        const double slow = oracles::dtw_exhaustive(a, b);
        require(fast == slow, "pair " + std::to_string(pair) + ": " +
                                  format_double(fast) + " vs enumerated " +
                                  format_double(slow));
    }
    return "200 seeded pairs, lengths 1..6, exact equality";
}

std::string transition_counts_vs_oracle() {
    auto rng = synthetic::make_rng(8200);
    for (int i = 0; i < 100; ++i) {
        const int k = 2 + i % 4;
        StateSequence s;
        s.k = k;
        int year = 1990;
        int month = 1;
        for (int t = 0; t < 200; ++t) {
            s.months.push_back(MonthKey{year, month});
            if (++month > 12) {
                month = 1;
                ++year;
            }
            // The first k labels guarantee every state appears.
            s.labels.push_back(t < k ? t + 1
                                     : 1 + static_cast<int>(rng() %
                                                            static_cast<unsigned>(k)));
        }
        const TransitionMatrix p = estimate_transition_matrix(s);
        const Eigen::MatrixXd reference =
            oracles::count_transition_matrix(s.labels, k);
        require((p.p - reference).cwiseAbs().maxCoeff() <= 1e-15,
                "sequence " + std::to_string(i) + ": max deviation " +
                    format_double((p.p - reference).cwiseAbs().maxCoeff()));
        for (int row = 0; row < k; ++row) {
            require(std::abs(p.p.row(row).sum() - 1.0) <= 1e-15,
                    "sequence " + std::to_string(i) + ": row " +
                        std::to_string(row + 1) + " sums to " +
                        format_double(p.p.row(row).sum()));
        }
    }
    return "100 length-200 sequences, tolerance 1e-15, stochastic rows";
}

std::string steady_state_reference_matrix() {
    Eigen::MatrixXd rows(4, 4);
    rows << 0.41, 0.30, 0.13, 0.15,
            0.36, 0.30, 0.13, 0.21,
            0.14, 0.25, 0.37, 0.24,
            0.23, 0.21, 0.22, 0.34;
    TransitionMatrix p;
    p.k = 4;
    p.p = rows;
    for (int i = 0; i < 4; ++i) p.p.row(i) /= p.p.row(i).sum();

    const SteadyState pi = steady_state(p);
    const Eigen::Vector4d expected(0.30, 0.27, 0.20, 0.23);
    std::ostringstream detail;
    detail << "pi = (";
    for (int i = 0; i < 4; ++i) {
        require(std::abs(pi.pi(i) - expected(i)) <= 0.01,
                "component " + std::to_string(i + 1) + " = " +
                    format_double(pi.pi(i)) + ", expected " +
                    format_double(expected(i)) + " within 0.01");
        detail << (i > 0 ? ", " : "") << format_double(pi.pi(i));
    }
    detail << ") within 0.01 of the reference";
    return detail.str();
}

std::string probability_weighted_blend() {
    auto rng = synthetic::make_rng(9300);
    std::normal_distribution<double> normal(0.0, 1.0);
    StateWeightMatrix swm;
    swm.w.resize(2, 4);
    for (Eigen::Index s = 0; s < 2; ++s) {
        for (Eigen::Index a = 0; a < 4; ++a) swm.w(s, a) = normal(rng);
    }
    swm.budgets = {1, 1};

    Eigen::Vector2d p(1.0 / 3.0, 2.0 / 3.0);
    const Eigen::VectorXd blended = markov_markowitz_weights(swm, p);
    const Eigen::VectorXd expected =
        (1.0 / 3.0) * swm.w.row(0).transpose() + (2.0 / 3.0) * swm.w.row(1).transpose();
    require((blended - expected).cwiseAbs().maxCoeff() <= 1e-15,
            "max deviation " +
                format_double((blended - expected).cwiseAbs().maxCoeff()));
    return "p = (1/3, 2/3) blend of two state rows, tolerance 1e-15";
}

std::string tangency_close_form_and_dominance() {
    auto moment_rng = synthetic::make_rng(4400);
    auto candidate_rng = synthetic::make_rng(4500);
    std::uniform_real_distribution<double> positive(0.5, 2.0);
    const double rf = 0.0001;
    const double cap = 1.5;
    int closed_form_checked = 0;
    for (int i = 0; i < 50; ++i) {
        const int n = 3 + i % 3;
        synthetic::MomentInstance mi = synthetic::random_moments(moment_rng, n);
        if (i < 25) {
            // Means of the form rf + V h with h > 0 make the unconstrained
            // tangency exactly h / sum(h): long-only, gross 1, inside the cap.
            Eigen::VectorXd h(n);
            for (int a = 0; a < n; ++a) h(a) = positive(moment_rng);
            mi.mean = (mi.cov * h).array() + rf;
        }
        SampleMoments m;
        m.mean = mi.mean;
        m.cov = mi.cov;
        m.n_obs = 30;

        TangencyOptions options;
        options.gross_cap = cap;
        options.seed = static_cast<std::uint64_t>(i);
        const PortfolioWeights solved = tangency_portfolio(m, rf, 1, options);

        require(std::abs(solved.w.sum() - 1.0) <= 1e-8,
                "instance " + std::to_string(i) + ": budget " +
                    format_double(solved.w.sum()));
        require(solved.w.cwiseAbs().sum() <= cap + 1e-8,
                "instance " + std::to_string(i) + ": gross " +
                    format_double(solved.w.cwiseAbs().sum()));

        const Eigen::VectorXd z = m.cov.fullPivLu().solve(
            (m.mean.array() - rf).matrix().eval());
        if (z.sum() > 0.0) {
            const Eigen::VectorXd w_closed = z / z.sum();
            if (w_closed.cwiseAbs().sum() <= cap) {
                ++closed_form_checked;
                require((solved.w - w_closed).cwiseAbs().maxCoeff() <= 1e-6,
                        "instance " + std::to_string(i) +
                            ": closed-form deviation " +
                            format_double(
                                (solved.w - w_closed).cwiseAbs().maxCoeff()));
            }
        }

        const double solved_sharpe = oracles::moment_sharpe(m.cov, m.mean, rf, solved.w);
        for (int j = 0; j < 1000; ++j) {
            const Eigen::VectorXd candidate =
                synthetic::random_feasible_weights(candidate_rng, n, 1.0, cap);
            const double candidate_sharpe =
                oracles::moment_sharpe(m.cov, m.mean, rf, candidate);
            require(solved_sharpe >= candidate_sharpe - 1e-9,
                    "instance " + std::to_string(i) + ", candidate " +
                        std::to_string(j) + ": " + format_double(candidate_sharpe) +
                        " beats " + format_double(solved_sharpe));
        }
    }
    require(closed_form_checked >= 25,
            "only " + std::to_string(closed_form_checked) +
                " instances exercised the closed form");
    return std::to_string(closed_form_checked) +
           "/50 closed-form matches, 1000 random candidates dominated per instance";
}

std::string overlap_determinism() {
    const ReturnPanel panel = synthetic::two_regime_panel(321, 120, 21, 4);

    BacktestConfig early;
    early.k = 2;
    early.test_start = MonthKey{2011, 1};
    early.seed = 5;
    early.benchmarks.clear();

    BacktestConfig late = early;
    late.test_start = MonthKey{2013, 1};

    const BacktestResult run_early = run_online_backtest(panel, early);
    const BacktestResult run_late = run_online_backtest(panel, late);

    const Eigen::VectorXd& net_early = run_early.net_returns.front().second;
    const Eigen::VectorXd& net_late = run_late.net_returns.front().second;
    const Eigen::Index overlap = net_late.size();
    require(net_early.size() > overlap, "test windows do not nest");

    const Eigen::VectorXd tail = net_early.tail(overlap);
    for (Eigen::Index t = 0; t < overlap; ++t) {
        require(tail(t) == net_late(t),
                "overlap day " + std::to_string(t) + ": " +
                    format_double(tail(t)) + " vs " + format_double(net_late(t)));
    }
    return std::to_string(overlap) +
           " overlapping days bit-identical across a 24-month start shift";
}

std::string no_lookahead() {
    const ReturnPanel panel = synthetic::two_regime_panel(55, 48, 21, 5);

    BacktestConfig cfg;
    cfg.k = 2;
    cfg.test_start = MonthKey{2010, 1};
    cfg.seed = 13;
    cfg.benchmarks.clear();

    const BacktestResult base = run_online_backtest(panel, cfg);

    // Scale the returns of one mid-window test month and rerun.
    const int perturbed_month = 11;  // 2010-12, zero-based within the test window
    const Eigen::Index first_row =
        (24 + static_cast<Eigen::Index>(perturbed_month)) * 21;
    ReturnPanel bumped = panel;
    bumped.returns.middleRows(first_row, 21) *= 1.5;

    const BacktestResult rerun = run_online_backtest(bumped, cfg);

    require(base.weight_history.rows() == rerun.weight_history.rows(),
            "weight histories have different lengths");
    for (int m = 0; m <= perturbed_month; ++m) {
        for (Eigen::Index a = 0; a < base.weight_history.cols(); ++a) {
            require(base.weight_history(m, a) == rerun.weight_history(m, a),
                    "month index " + std::to_string(m) + ", asset " +
                        std::to_string(a) + ": " +
                        format_double(base.weight_history(m, a)) + " became " +
                        format_double(rerun.weight_history(m, a)));
        }
    }
    return "weights through the perturbed month identical, later months free to move";
}

std::string regime_panel_beats_static_tangency() {
    const std::uint64_t seed = 4242;
    const ReturnPanel panel = synthetic::two_regime_panel(seed, 144, 21, 6);

    BacktestConfig cfg;
    cfg.k = 2;
    cfg.test_start = MonthKey{2014, 1};
    cfg.fee_rate = 0.001;
    cfg.seed = 1;
    cfg.benchmarks = {"tangency"};

    const BacktestResult result = run_online_backtest(panel, cfg);
    double strategy_sharpe = 0.0;
    double tangency_sharpe = 0.0;
    for (const auto& [name, metrics] : result.metrics.per_series) {
        if (name == "strategy") strategy_sharpe = metrics.sharpe;
        if (name == "tangency") tangency_sharpe = metrics.sharpe;
    }
    require(strategy_sharpe >= tangency_sharpe,
            "strategy Sharpe " + format_double(strategy_sharpe) +
                " below static tangency " + format_double(tangency_sharpe));
    return "panel seed " + std::to_string(seed) + ": strategy Sharpe " +
           format_double(strategy_sharpe) + " vs static tangency " +
           format_double(tangency_sharpe);
}

std::string metric_hand_values() {
    // Wealth path 1 -> 1.2 -> 0.6 -> 0.9 loses exactly half at the trough.
    Eigen::Vector3d drawdown_returns(0.2, -0.5, 0.5);
    require(max_drawdown(drawdown_returns) == -0.5,
            "drawdown " + format_double(max_drawdown(drawdown_returns)));

    auto rng = synthetic::make_rng(6000);
    std::normal_distribution<double> normal(0.0, 0.01);
    Eigen::VectorXd series(60);
    for (Eigen::Index t = 0; t < series.size(); ++t) series(t) = normal(rng);
    const Eigen::VectorXd rf = Eigen::VectorXd::Constant(series.size(), 0.0001);
    const AlphaResult identity = alpha_regression(series, series, rf);
    require(std::abs(identity.beta - 1.0) <= 1e-12,
            "identity beta " + format_double(identity.beta));
    require(std::abs(identity.daily_alpha) <= 1e-12,
            "identity alpha " + format_double(identity.daily_alpha));

    const ReturnPanel panel = synthetic::two_regime_panel(77, 30, 21, 4);
    BacktestConfig cfg;
    cfg.k = 2;
    cfg.test_start = MonthKey{2010, 1};
    cfg.benchmarks = {"equal_weight"};
    const BacktestResult result = run_online_backtest(panel, cfg);
    auto sample_sd = [](const Eigen::VectorXd& x) {
        const double mean = x.mean();
        return std::sqrt((x.array() - mean).square().sum() /
                         static_cast<double>(x.size() - 1));
    };
    const double strategy_sd = sample_sd(result.net_returns[0].second);
    const double benchmark_sd = sample_sd(result.net_returns[1].second);
    require(std::abs(strategy_sd - benchmark_sd) <= 1e-12,
            "vol-target stdev " + format_double(benchmark_sd) + " vs strategy " +
                format_double(strategy_sd));
    return "drawdown exact, identity regression exact, vol target matched to 1e-12";
}

struct Criterion {
    int id;
    const char* name;
    std::function<std::string()> body;
    double budget_seconds;  // 0 means untimed
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "frontier variance matches a constrained-QP oracle",
         frontier_vs_qp_oracle, 5.0},
        {2, "minimum-variance point matches the direct solution",
         mvp_vs_direct_solution, 0.0},
        {3, "correlation-distance endpoints are exact",
         correlation_distance_endpoints, 0.0},
        {4, "warping distance equals exhaustive path enumeration",
         dtw_vs_exhaustive_enumeration, 0.0},
        {5, "transition estimates match direct counting",
         transition_counts_vs_oracle, 0.0},
        {6, "four-state steady state reproduces the reference distribution",
         steady_state_reference_matrix, 1.0},
        {7, "probability-weighted blend matches the hand expectation",
         probability_weighted_blend, 0.0},
        {8, "tangency matches the closed form and dominates random portfolios",
         tangency_close_form_and_dominance, 30.0},
        {9, "shifted-start backtests agree exactly on the overlap",
         overlap_determinism, 0.0},
        {10, "perturbing a test month never changes that month's weights",
         no_lookahead, 0.0},
        {11, "regime-aware strategy beats static tangency on a two-regime panel",
         regime_panel_beats_static_tangency, 60.0},
        {12, "drawdown, identity-alpha and vol-target hand values are exact",
         metric_hand_values, 0.0},
    };

    bool all_pass = true;
    double total_seconds = 0.0;
    std::cout << std::fixed << std::setprecision(2);
    for (const Criterion& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = true;
        try {
            detail = criterion.body();
        } catch (const std::exception& e) {
            pass = false;
            detail = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        total_seconds += elapsed;
        if (pass && criterion.budget_seconds > 0.0 &&
            elapsed > criterion.budget_seconds) {
            pass = false;
            detail = "over the " + format_double(criterion.budget_seconds) +
                     " s budget";
        }
        all_pass = all_pass && pass;
        std::cout << "criterion " << std::setw(2) << criterion.id << ": "
                  << (pass ? "PASS" : "FAIL") << "  " << criterion.name << " ["
                  << elapsed << " s]";
        if (!detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << '\n';
    }

    const bool within_budget = total_seconds < 180.0;
    all_pass = all_pass && within_budget;
    std::cout << "criterion 13: " << (within_budget ? "PASS" : "FAIL")
              << "  acceptance suite finishes inside the runtime budget ["
              << total_seconds << " s of 180]" << '\n';

    return all_pass ? 0 : 1;
}
