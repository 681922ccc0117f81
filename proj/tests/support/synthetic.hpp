#pragma once

// Deterministic synthetic data builders shared by the unit, acceptance, and
// CLI tests.

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "regimealloc/date.hpp"
#include "regimealloc/ingest.hpp"

namespace synthetic {

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

/// Random symmetric positive-definite matrix with eigenvalues bounded away
/// from zero.
inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
    }
    Eigen::MatrixXd spd = a * a.transpose() / static_cast<double>(n);
    spd.diagonal().array() += 0.1;
    return spd * scale;
}

struct MomentInstance {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// Daily-scale random moments: means a few basis points, covariance around
/// (1%)^2.
inline MomentInstance random_moments(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    MomentInstance m;
    m.mean.resize(n);
    for (int i = 0; i < n; ++i) m.mean(i) = 0.0005 + 0.002 * normal(rng);
    m.cov = random_spd(rng, n, 1e-4);
    return m;
}

/// Synthetic trading dates: `days_per_month` consecutive day numbers in each
/// calendar month starting at (year, month).
inline std::vector<regimealloc::Date> month_dates(int year, int month, int months,
                                                  int days_per_month) {
    std::vector<regimealloc::Date> dates;
    dates.reserve(static_cast<std::size_t>(months) *
                  static_cast<std::size_t>(days_per_month));
    for (int m = 0; m < months; ++m) {
        for (int d = 1; d <= days_per_month; ++d) {
            dates.push_back(regimealloc::Date{year, month, d});
        }
        if (++month > 12) {
            month = 1;
            ++year;
        }
    }
    return dates;
}

/// Assembles a ReturnPanel directly from a return matrix and a constant
/// daily risk-free rate (decimal units).
inline regimealloc::ReturnPanel make_panel(std::vector<regimealloc::Date> dates,
                                           Eigen::MatrixXd returns,
                                           double rf_daily = 0.0) {
    regimealloc::ReturnPanel panel;
    panel.dates = std::move(dates);
    panel.tickers.reserve(static_cast<std::size_t>(returns.cols()));
    for (Eigen::Index a = 0; a < returns.cols(); ++a) {
        panel.tickers.push_back("A" + std::to_string(a + 1));
    }
    panel.rf = Eigen::VectorXd::Constant(returns.rows(), rf_daily);
    panel.returns = std::move(returns);
    return panel;
}

/// IID Gaussian return panel with per-asset means and a shared volatility.
inline regimealloc::ReturnPanel gaussian_panel(std::uint64_t seed, int months,
                                               int days_per_month, int assets,
                                               double vol = 0.01,
                                               double rf_daily = 0.0) {
    std::mt19937_64 rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> means(static_cast<std::size_t>(assets));
    for (int a = 0; a < assets; ++a) {
        means[static_cast<std::size_t>(a)] = 0.0002 + 0.0004 * normal(rng);
    }
    const int rows = months * days_per_month;
    Eigen::MatrixXd returns(rows, assets);
    for (int t = 0; t < rows; ++t) {
        for (int a = 0; a < assets; ++a) {
            returns(t, a) = means[static_cast<std::size_t>(a)] + vol * normal(rng);
        }
    }
    return make_panel(month_dates(2010, 1, months, days_per_month),
                      std::move(returns), rf_daily);
}

/// Two alternating regimes with sign-opposed mean vectors: even months draw
/// from +mu, odd months from -mu, with mu all positive so the regimes land
/// on opposite sides of the frontier vertex. Strong drift against moderate
/// noise, so a regime-aware model has a real edge over static fits.
inline regimealloc::ReturnPanel two_regime_panel(std::uint64_t seed, int months = 144,
                                                 int days_per_month = 21,
                                                 int assets = 6) {
    std::mt19937_64 rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd mu(assets);
    for (int a = 0; a < assets; ++a) {
        mu(a) = 0.002 + 0.0005 * (a % 3);
    }
    const double vol = 0.008;
    Eigen::MatrixXd returns(months * days_per_month, assets);
    int row = 0;
    for (int m = 0; m < months; ++m) {
        double sign = m % 2 == 0 ? 1.0 : -1.0;
        for (int d = 0; d < days_per_month; ++d, ++row) {
            for (int a = 0; a < assets; ++a) {
                returns(row, a) = sign * mu(a) + vol * normal(rng);
            }
        }
    }
    return make_panel(month_dates(2008, 1, months, days_per_month),
                      std::move(returns), 0.0);
}

/// Random point satisfying sum(w) = budget and ||w||_1 <= gross_cap, built
/// by shrinking a hyperplane sample toward the budget-centered point until
/// the gross constraint holds.
inline Eigen::VectorXd random_feasible_weights(std::mt19937_64& rng, int n,
                                               double budget, double gross_cap) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    Eigen::VectorXd center = Eigen::VectorXd::Constant(n, budget / n);
    Eigen::VectorXd delta = v.array() - v.mean();
    Eigen::VectorXd w = center + delta;
    while (w.lpNorm<1>() > gross_cap && delta.lpNorm<1>() > 1e-12) {
        delta *= 0.7;
        w = center + delta;
    }
    return w;
}

/// Prices implied by a return panel (base 100), including the seed date one
/// day before the first return date.
inline regimealloc::PricePanel implied_prices(const regimealloc::ReturnPanel& panel,
                                              regimealloc::Date first_date) {
    regimealloc::PricePanel prices;
    prices.tickers = panel.tickers;
    prices.dates.reserve(panel.dates.size() + 1);
    prices.dates.push_back(first_date);
    prices.dates.insert(prices.dates.end(), panel.dates.begin(), panel.dates.end());
    prices.prices.resize(panel.n_days() + 1, panel.n_assets());
    prices.prices.row(0).setConstant(100.0);
    for (Eigen::Index t = 0; t < panel.n_days(); ++t) {
        prices.prices.row(t + 1) =
            prices.prices.row(t).array() * (1.0 + panel.returns.row(t).array());
    }
    return prices;
}

}  // namespace synthetic
