#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "regimealloc/allocation.hpp"
#include "regimealloc/backtest.hpp"
#include "regimealloc/frontier.hpp"
#include "regimealloc/regime.hpp"
#include "support/synthetic.hpp"

namespace {

using namespace regimealloc;

std::vector<double> random_series(std::uint64_t seed, std::size_t length) {
    auto rng = synthetic::make_rng(seed);
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    std::vector<double> out(length);
    for (double& x : out) x = value(rng);
    return out;
}

MonthDistanceMatrix correlation_matrix(int months) {
    const ReturnPanel panel =
        synthetic::gaussian_panel(17, months, 21, 6);
    const MonthlySlices slices = group_by_month(panel);
    const EfCoefficientSeries series = monthly_coefficients(panel, slices);
    return coefficient_correlation_distance(series, true);
}

void bm_dtw_distance(benchmark::State& state) {
    const auto length = static_cast<std::size_t>(state.range(0));
    const std::vector<double> a = random_series(1, length);
    const std::vector<double> b = random_series(2, length);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dtw_distance(a, b));
    }
}
BENCHMARK(bm_dtw_distance)->Arg(60)->Arg(120);

void bm_dtw_distance_matrix(benchmark::State& state) {
    const MonthDistanceMatrix corr =
        correlation_matrix(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dtw_distance_matrix(corr));
    }
}
BENCHMARK(bm_dtw_distance_matrix)->Arg(36)->Arg(72)->Arg(120)->Unit(benchmark::kMillisecond);

void bm_monthly_coefficients(benchmark::State& state) {
    const ReturnPanel panel =
        synthetic::gaussian_panel(23, static_cast<int>(state.range(0)), 21, 8);
    const MonthlySlices slices = group_by_month(panel);
    for (auto _ : state) {
        benchmark::DoNotOptimize(monthly_coefficients(panel, slices));
    }
}
BENCHMARK(bm_monthly_coefficients)->Arg(120)->Unit(benchmark::kMillisecond);

void bm_hierarchical_cluster(benchmark::State& state) {
    const MonthDistanceMatrix dtw =
        dtw_distance_matrix(correlation_matrix(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(hierarchical_cluster(dtw, 4));
    }
}
BENCHMARK(bm_hierarchical_cluster)->Arg(72)->Arg(120)->Unit(benchmark::kMillisecond);

void bm_tangency_closed_form(benchmark::State& state) {
    auto rng = synthetic::make_rng(31);
    synthetic::MomentInstance mi = synthetic::random_moments(rng, 8);
    // Means of the form rf + V h with h > 0 keep the solver on the
    // closed-form path: the unconstrained optimum is long-only with gross 1.
    std::uniform_real_distribution<double> positive(0.5, 2.0);
    Eigen::VectorXd h(8);
    for (int a = 0; a < 8; ++a) h(a) = positive(rng);
    mi.mean = (mi.cov * h).array() + 0.0001;
    SampleMoments m;
    m.mean = mi.mean;
    m.cov = mi.cov;
    m.n_obs = 252;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tangency_portfolio(m, 0.0001, 1));
    }
}
BENCHMARK(bm_tangency_closed_form);

void bm_tangency_projected_ascent(benchmark::State& state) {
    auto rng = synthetic::make_rng(37);
    const synthetic::MomentInstance mi = synthetic::random_moments(rng, 8);
    SampleMoments m;
    m.mean = mi.mean;
    m.cov = mi.cov;
    m.n_obs = 252;
    // A tight gross cap forces the multi-start solver path.
    TangencyOptions options;
    options.gross_cap = 1.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tangency_portfolio(m, 0.0001, 1, options));
    }
}
BENCHMARK(bm_tangency_projected_ascent)->Unit(benchmark::kMillisecond);

void bm_online_backtest(benchmark::State& state) {
    const ReturnPanel panel = synthetic::two_regime_panel(77, 36, 21, 4);
    BacktestConfig cfg;
    cfg.k = 2;
    cfg.test_start = MonthKey{2010, 1};
    cfg.benchmarks = {"tangency"};
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_online_backtest(panel, cfg));
    }
}
BENCHMARK(bm_online_backtest)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
