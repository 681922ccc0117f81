#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "regimealloc/backtest.hpp"
#include "regimealloc/errors.hpp"
#include "regimealloc/exports.hpp"
#include "regimealloc/ingest.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
    std::string config_path;
    std::string prices;
    std::string rf;
    std::string recession;
    std::string out = "out";
    std::string results;
    int k = 4;
    std::string test_start;
    double gross_cap = 1.5;
    double fee_rate = 0.01;
    double ridge = regimealloc::kDefaultRidge;
    std::string linkage = "average";
    std::string rf_aggregation = "mean";
    bool no_standardize = false;
    bool train_only = false;
    std::uint64_t seed = 0;
    std::vector<std::string> benchmarks{"tangency", "equal_weight"};
};

void add_common_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path,
                    "JSON run configuration; explicit flags override it");
    cmd->add_option("--prices", opt.prices, "price panel file (date,<tickers...>)");
    cmd->add_option("--rf", opt.rf, "risk-free file (date,rf in percent/day)");
    cmd->add_option("--out", opt.out, "output directory, created if absent");
    cmd->add_option("--seed", opt.seed, "seed for randomized solver starts");
}

void add_model_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("--k", opt.k, "number of market states")
        ->check(CLI::Range(2, 1000));
    cmd->add_option("--gross-cap", opt.gross_cap, "gross exposure cap");
    cmd->add_option("--fee-rate", opt.fee_rate, "fee per unit traded notional");
    cmd->add_option("--ridge", opt.ridge, "covariance diagonal ridge");
    cmd->add_option("--linkage", opt.linkage, "single, complete, or average");
    cmd->add_option("--rf-aggregation", opt.rf_aggregation,
                    "mean, last, or zero: scalar rf for the tangency objective");
    cmd->add_flag("--no-standardize", opt.no_standardize,
                  "skip z-scoring coefficients before correlation");
}

/// Fills every option the user left at its default from the config file.
void apply_config(const CLI::App* cmd, Options& opt) {
    if (opt.config_path.empty()) return;
    std::ifstream in(opt.config_path);
    if (!in) {
        throw regimealloc::Error(regimealloc::ErrorKind::Argument,
                                 "cannot open config file: " + opt.config_path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw regimealloc::Error(regimealloc::ErrorKind::Argument,
                                 opt.config_path + ": " + e.what());
    }

    auto unset = [&](const std::string& flag) {
        const CLI::Option* option = cmd->get_option_no_throw(flag);
        return option != nullptr && option->count() == 0;
    };
    auto load = [&](const char* key, const std::string& flag, auto& field) {
        if (doc.contains(key) && unset(flag)) {
            doc.at(key).get_to(field);
        }
    };
    load("prices", "--prices", opt.prices);
    load("rf", "--rf", opt.rf);
    load("recession", "--recession", opt.recession);
    load("out", "--out", opt.out);
    load("results", "--results", opt.results);
    load("k", "--k", opt.k);
    load("test_start", "--test-start", opt.test_start);
    load("gross_cap", "--gross-cap", opt.gross_cap);
    load("fee_rate", "--fee-rate", opt.fee_rate);
    load("ridge", "--ridge", opt.ridge);
    load("linkage", "--linkage", opt.linkage);
    load("rf_aggregation", "--rf-aggregation", opt.rf_aggregation);
    load("seed", "--seed", opt.seed);
    load("benchmarks", "--benchmarks", opt.benchmarks);
    load("train_only", "--train-only", opt.train_only);
    if (doc.contains("standardize") && unset("--no-standardize")) {
        opt.no_standardize = !doc.at("standardize").get<bool>();
    }
}

void require(const std::string& value, const std::string& what) {
    if (value.empty()) {
        throw regimealloc::Error(regimealloc::ErrorKind::Argument,
                                 what + " is required (flag or config file)");
    }
}

regimealloc::ReturnPanel load_panel(const Options& opt) {
    require(opt.prices, "--prices");
    require(opt.rf, "--rf");
    regimealloc::PricePanel prices = regimealloc::load_price_panel(opt.prices);
    return regimealloc::compute_returns(prices, opt.rf);
}

regimealloc::BacktestConfig to_backtest_config(const Options& opt) {
    regimealloc::BacktestConfig cfg;
    cfg.k = opt.k;
    if (!opt.test_start.empty()) {
        cfg.test_start = regimealloc::MonthKey::parse(opt.test_start);
    }
    cfg.gross_cap = opt.gross_cap;
    cfg.fee_rate = opt.fee_rate;
    cfg.ridge = opt.ridge;
    cfg.standardize = !opt.no_standardize;
    cfg.linkage = regimealloc::linkage_from_string(opt.linkage);
    cfg.rf_aggregation = regimealloc::rf_aggregation_from_string(opt.rf_aggregation);
    cfg.seed = opt.seed;
    cfg.benchmarks = opt.benchmarks;
    return cfg;
}

std::string out_path(const Options& opt, const std::string& name) {
    fs::create_directories(opt.out);
    return (fs::path(opt.out) / name).string();
}

void write_recession_export(const Options& opt,
                            std::vector<std::string>* written) {
    if (opt.recession.empty()) return;
    regimealloc::RecessionLabels labels =
        regimealloc::load_recession_labels(opt.recession);
    std::string path = out_path(opt, "recession_months.csv");
    std::ofstream out(path);
    out << "year,month,indicator\n";
    for (const auto& [month, indicator] : labels.by_month) {
        out << month.year << ',' << month.month << ',' << (indicator ? 1 : 0)
            << '\n';
    }
    if (written != nullptr) written->push_back(path);
}

int cmd_coefficients(const Options& opt) {
    regimealloc::ReturnPanel panel = load_panel(opt);
    regimealloc::MonthlySlices slices = regimealloc::group_by_month(panel);
    regimealloc::EfCoefficientSeries series =
        regimealloc::monthly_coefficients(panel, slices, opt.ridge);
    for (const std::string& warning : series.warnings) {
        std::cerr << "warning: " << warning << '\n';
    }
    regimealloc::write_coefficient_series_csv(out_path(opt, "coefficients.csv"),
                                              series);
    std::cerr << "wrote " << series.size() << " monthly coefficient rows to "
              << out_path(opt, "coefficients.csv") << '\n';
    return 0;
}

int cmd_cluster(const Options& opt) {
    regimealloc::ReturnPanel panel = load_panel(opt);
    regimealloc::MonthlySlices slices = regimealloc::group_by_month(panel);
    if (opt.train_only) {
        require(opt.test_start, "--test-start (with --train-only)");
        regimealloc::MonthKey split = regimealloc::MonthKey::parse(opt.test_start);
        std::vector<regimealloc::MonthSlice> kept;
        for (const auto& slice : slices.slices) {
            if (slice.month < split) kept.push_back(slice);
        }
        slices.slices = std::move(kept);
    }
    regimealloc::EfCoefficientSeries series =
        regimealloc::monthly_coefficients(panel, slices, opt.ridge);
    regimealloc::MonthDistanceMatrix corr =
        regimealloc::coefficient_correlation_distance(series, !opt.no_standardize);
    for (const std::string& warning : corr.warnings) {
        std::cerr << "warning: " << warning << '\n';
    }
    regimealloc::MonthDistanceMatrix dtw = regimealloc::dtw_distance_matrix(corr);
    regimealloc::ClusterResult cluster = regimealloc::hierarchical_cluster(
        dtw, opt.k, regimealloc::linkage_from_string(opt.linkage));
    regimealloc::TransitionMatrix transitions =
        regimealloc::estimate_transition_matrix(cluster.states);

    regimealloc::write_state_sequence_csv(out_path(opt, "states.csv"),
                                          cluster.states);
    regimealloc::write_dendrogram_csv(out_path(opt, "dendrogram.csv"),
                                      cluster.dendrogram);
    regimealloc::write_transition_matrix_csv(out_path(opt, "transition_matrix.csv"),
                                             transitions);
    try {
        regimealloc::SteadyState steady = regimealloc::steady_state(transitions);
        regimealloc::write_steady_state_csv(out_path(opt, "steady_state.csv"),
                                            steady);
    } catch (const regimealloc::ReducibleChainError& e) {
        std::cerr << "warning: " << e.what() << "; steady_state.csv not written\n";
    }
    write_recession_export(opt, nullptr);
    std::cerr << "clustered " << cluster.states.months.size() << " months into "
              << opt.k << " states\n";
    return 0;
}

int cmd_backtest(const Options& opt) {
    require(opt.test_start, "--test-start");
    regimealloc::ReturnPanel panel = load_panel(opt);
    regimealloc::BacktestConfig cfg = to_backtest_config(opt);
    regimealloc::BacktestResult result = regimealloc::run_online_backtest(panel, cfg);
    for (const std::string& warning : result.warnings) {
        std::cerr << "warning: " << warning << '\n';
    }

    std::vector<std::string> written;
    auto track = [&](const std::string& path) {
        written.push_back(path);
        return path;
    };
    try {
        regimealloc::write_daily_returns_csv(track(out_path(opt, "daily_returns.csv")),
                                             result);
        regimealloc::write_wealth_csv(track(out_path(opt, "wealth.csv")), result);
        regimealloc::write_weights_csv(track(out_path(opt, "weights.csv")), result);
        if (!result.iterations.empty()) {
            const regimealloc::IterationSnapshot& last = result.iterations.back();
            regimealloc::write_state_sequence_csv(track(out_path(opt, "states.csv")),
                                                  last.states);
            regimealloc::write_transition_matrix_csv(
                track(out_path(opt, "transition_matrix.csv")), last.transitions);
            try {
                regimealloc::SteadyState steady =
                    regimealloc::steady_state(last.transitions);
                regimealloc::write_steady_state_csv(
                    track(out_path(opt, "steady_state.csv")), steady);
            } catch (const regimealloc::ReducibleChainError& e) {
                std::cerr << "warning: " << e.what()
                          << "; steady_state.csv not written\n";
            }
        }
        std::vector<std::pair<std::string, std::string>> inputs{
            {"prices", opt.prices}, {"rf", opt.rf}};
        if (!opt.recession.empty()) inputs.emplace_back("recession", opt.recession);
        regimealloc::write_metrics_json(track(out_path(opt, "metrics.json")), result,
                                        cfg, inputs);
        write_recession_export(opt, &written);
    } catch (...) {
        // Half-written result sets are worse than none.
        for (const std::string& path : written) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        throw;
    }

    std::cerr << "backtested " << result.weight_months.size() << " months ("
              << result.dates.size() << " trading days) to " << opt.out << '\n';
    return 0;
}

int cmd_report(const Options& opt) {
    std::string results_path = opt.results.empty()
                                   ? (fs::path(opt.out) / "daily_returns.csv").string()
                                   : opt.results;
    regimealloc::NamedSeries series = regimealloc::read_daily_returns_csv(results_path);
    if (series.series.empty() || series.dates.empty()) {
        throw regimealloc::Error(regimealloc::ErrorKind::Validation,
                                 results_path + ": no return series found");
    }
    Eigen::VectorXd rf = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(series.dates.size()));
    if (!opt.rf.empty()) {
        rf = regimealloc::forward_fill_rf(regimealloc::load_rf_observations(opt.rf),
                                          series.dates);
    } else {
        std::cerr << "note: no --rf given; using a zero risk-free rate\n";
    }

    json doc;
    doc["source"] = results_path;
    doc["days"] = series.dates.size();
    json metrics = json::object();
    for (const auto& [name, returns] : series.series) {
        regimealloc::SeriesMetrics m = regimealloc::compute_metrics(returns, rf);
        metrics[name] = {{"sharpe", m.sharpe},
                         {"annualized_return", m.ann_return},
                         {"max_drawdown", m.mdd}};
    }
    doc["metrics"] = metrics;

    if (series.dates.size() >= 30 && series.series.size() > 1) {
        json alphas = json::object();
        const auto& [base_name, base] = series.series.front();
        for (std::size_t i = 1; i < series.series.size(); ++i) {
            const auto& [name, bench] = series.series[i];
            regimealloc::AlphaResult alpha =
                regimealloc::alpha_regression(base, bench, rf);
            alphas[name] = {{"annual_alpha", alpha.annual_alpha},
                            {"p_value", alpha.p_value},
                            {"beta", alpha.beta}};
        }
        doc["alpha_regressions"] = {{"strategy", base_name}, {"vs", alphas}};
    }

    std::cout << doc.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markov-Markowitz regime allocation pipeline"};
    app.require_subcommand(1);

    Options opt;
    CLI::App* coefficients =
        app.add_subcommand("coefficients", "compute monthly frontier coefficients");
    add_common_options(coefficients, opt);
    coefficients->add_option("--ridge", opt.ridge, "covariance diagonal ridge");

    CLI::App* cluster =
        app.add_subcommand("cluster", "cluster months into market states");
    add_common_options(cluster, opt);
    add_model_options(cluster, opt);
    cluster->add_option("--recession", opt.recession,
                        "recession indicator file (date,indicator)");
    cluster->add_option("--test-start", opt.test_start,
                        "YYYY-MM split month for --train-only");
    cluster->add_flag("--train-only", opt.train_only,
                      "cluster only months before --test-start");

    CLI::App* backtest =
        app.add_subcommand("backtest", "run the online expanding backtest");
    add_common_options(backtest, opt);
    add_model_options(backtest, opt);
    backtest->add_option("--recession", opt.recession,
                         "recession indicator file (date,indicator)");
    backtest->add_option("--test-start", opt.test_start,
                         "YYYY-MM first out-of-sample month");
    backtest
        ->add_option("--benchmarks", opt.benchmarks,
                     "tangency, equal_weight, or a ticker (comma separated)")
        ->delimiter(',');

    CLI::App* report =
        app.add_subcommand("report", "recompute metrics from stored daily returns");
    report->add_option("--config", opt.config_path,
                       "JSON run configuration; explicit flags override it");
    report->add_option("--out", opt.out, "directory holding daily_returns.csv");
    report->add_option("--results", opt.results,
                       "explicit daily returns file (overrides --out)");
    report->add_option("--rf", opt.rf, "risk-free file (date,rf in percent/day)");

    try {
        app.parse(argc, argv);
        CLI::App* cmd = app.get_subcommands().front();
        apply_config(cmd, opt);
        if (cmd == coefficients) return cmd_coefficients(opt);
        if (cmd == cluster) return cmd_cluster(opt);
        if (cmd == backtest) return cmd_backtest(opt);
        return cmd_report(opt);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const regimealloc::Error& e) {
        std::cerr << "error (" << regimealloc::to_string(e.kind()) << "): " << e.what()
                  << '\n';
        return e.kind() == regimealloc::ErrorKind::Argument ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
