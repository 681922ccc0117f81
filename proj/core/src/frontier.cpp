#include "regimealloc/frontier.hpp"

#include <cmath>

#include "linalg.hpp"
#include "regimealloc/errors.hpp"

namespace regimealloc {

using detail::solve_spd;

SampleMoments sample_mean_cov(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                              double ridge) {
    const Eigen::Index n = rows.rows();
    if (n < 2) {
        throw Error(ErrorKind::Degenerate,
                    "need at least 2 return rows for sample moments, have " +
                        std::to_string(n));
    }
    SampleMoments m;
    m.n_obs = n;
    m.mean = rows.colwise().mean();
    Eigen::MatrixXd centered = rows.rowwise() - m.mean.transpose();
    m.cov = centered.transpose() * centered / static_cast<double>(n - 1);
    // Exact symmetry, so downstream solvers see a clean matrix.
    m.cov = ((m.cov + m.cov.transpose()) / 2.0).eval();

    Eigen::FullPivLU<Eigen::MatrixXd> lu(m.cov);
    if (!lu.isInvertible()) {
        m.cov.diagonal().array() += ridge;
        m.ridged = true;
    }
    return m;
}

RawEfCoefficients ef_raw_coefficients(const SampleMoments& m) {
    const Eigen::Index n = m.cov.rows();
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd v_inv_e = solve_spd(m.cov, ones);
    Eigen::VectorXd v_inv_r = solve_spd(m.cov, m.mean);

    RawEfCoefficients raw;
    raw.a = ones.dot(v_inv_e);
    raw.b = m.mean.dot(v_inv_e);
    raw.c = m.mean.dot(v_inv_r);
    if (!(raw.a > 0.0)) {
        throw Error(ErrorKind::LinearAlgebra,
                    "frontier coefficient A is not positive; covariance inverse "
                    "is unreliable");
    }
    if (m.mean.isZero(0.0)) {
        throw Error(ErrorKind::Degenerate,
                    "mean return vector is exactly zero; frontier is undefined");
    }
    return raw;
}

InterpretableEfCoefficients ef_interpretable(const RawEfCoefficients& raw) {
    if (!(raw.a > 0.0)) {
        throw Error(ErrorKind::Argument, "A must be positive");
    }
    double discriminant = raw.a * raw.c - raw.b * raw.b;
    if (discriminant < -1e-12) {
        throw Error(ErrorKind::NumericalConsistency,
                    "AC - B^2 = " + std::to_string(discriminant) +
                        " is negative beyond tolerance; covariance inverse is "
                        "unreliable");
    }
    if (discriminant < 0.0) discriminant = 0.0;

    InterpretableEfCoefficients in;
    in.r_mvp = raw.b / raw.a;
    in.sigma_mvp = 1.0 / std::sqrt(raw.a);
    in.u = std::sqrt(discriminant / raw.a);
    return in;
}

double ef_variance_at(double target_return, const EfCoefficients& c) {
    const double discriminant = c.a * c.c - c.b * c.b;
    if (discriminant <= 0.0) {
        throw Error(ErrorKind::Degenerate,
                    "AC - B^2 is not positive; frontier degenerates to a line");
    }
    return (c.a * target_return * target_return - 2.0 * c.b * target_return + c.c) /
           discriminant;
}

EfCoefficientSeries monthly_coefficients(const ReturnPanel& panel,
                                         const MonthlySlices& slices,
                                         double ridge) {
    EfCoefficientSeries series;
    series.months.reserve(slices.size());
    series.coeffs.reserve(slices.size());
    for (const MonthSlice& slice : slices.slices) {
        auto rows = panel.returns.middleRows(slice.first_row, slice.row_count);
        try {
            SampleMoments m = sample_mean_cov(rows, ridge);
            if (m.ridged) {
                series.warnings.push_back("month " + slice.month.to_string() +
                                          ": covariance not invertible, ridge applied");
            }
            RawEfCoefficients raw = ef_raw_coefficients(m);
            series.months.push_back(slice.month);
            series.coeffs.push_back(combine(raw, ef_interpretable(raw)));
        } catch (const Error& e) {
            throw Error(e.kind(),
                        "month " + slice.month.to_string() + ": " + e.what());
        }
    }
    return series;
}

}  // namespace regimealloc
