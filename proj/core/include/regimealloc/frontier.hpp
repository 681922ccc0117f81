#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "regimealloc/date.hpp"
#include "regimealloc/ingest.hpp"

namespace regimealloc {

inline constexpr double kDefaultRidge = 1e-10;

/// Sample mean vector and unbiased covariance of a block of daily returns.
/// `ridged` records whether the diagonal ridge was needed to make the
/// covariance invertible at working precision.
struct SampleMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::Index n_obs = 0;
    bool ridged = false;
};

/// The three closed-form frontier coefficients
///   A = e'V^-1 e,  B = r'V^-1 e,  C = r'V^-1 r.
struct RawEfCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// Vertex coordinates and curvature rate of the frontier:
///   r_mvp = B/A,  sigma_mvp = 1/sqrt(A),  u = sqrt((AC - B^2)/A).
struct InterpretableEfCoefficients {
    double r_mvp = 0.0;
    double sigma_mvp = 0.0;
    double u = 0.0;
};

/// Both parameterizations of one month's efficient frontier.
struct EfCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double r_mvp = 0.0;
    double sigma_mvp = 0.0;
    double u = 0.0;
};

/// Per-month frontier coefficients, ordered by month.
struct EfCoefficientSeries {
    std::vector<MonthKey> months;
    std::vector<EfCoefficients> coeffs;
    std::vector<std::string> warnings;

    std::size_t size() const { return months.size(); }
};

/// Mean and unbiased (n-1) covariance of the given rows. When the covariance
/// is not invertible at working precision, ridge*I is added to the diagonal.
SampleMoments sample_mean_cov(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                              double ridge = kDefaultRidge);

RawEfCoefficients ef_raw_coefficients(const SampleMoments& m);

InterpretableEfCoefficients ef_interpretable(const RawEfCoefficients& raw);

inline EfCoefficients combine(const RawEfCoefficients& raw,
                              const InterpretableEfCoefficients& in) {
    return EfCoefficients{raw.a, raw.b, raw.c, in.r_mvp, in.sigma_mvp, in.u};
}

/// Frontier variance at the target return,
///   sigma^2(r) = (A r^2 - 2 B r + C) / (A C - B^2).
double ef_variance_at(double target_return, const EfCoefficients& c);

/// One set of frontier coefficients per month, each computed from that
/// month's rows only.
EfCoefficientSeries monthly_coefficients(const ReturnPanel& panel,
                                         const MonthlySlices& slices,
                                         double ridge = kDefaultRidge);

}  // namespace regimealloc
