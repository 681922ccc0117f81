#pragma once

// Internal numeric helpers shared across modules.

#include <Eigen/Dense>
#include <cstdint>

#include "regimealloc/errors.hpp"

namespace regimealloc::detail {

/// Solves V x = rhs for symmetric positive-definite V via Cholesky, falling
/// back to full-pivot LU; never forms the inverse.
inline Eigen::VectorXd solve_spd(const Eigen::MatrixXd& v, const Eigen::VectorXd& rhs) {
    Eigen::LLT<Eigen::MatrixXd> llt(v);
    if (llt.info() == Eigen::Success) {
        return llt.solve(rhs);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
    if (!lu.isInvertible()) {
        throw Error(ErrorKind::LinearAlgebra,
                    "covariance matrix is singular even after ridge");
    }
    return lu.solve(rhs);
}

/// Deterministic stream splitting: mixes a base seed with a label so
/// different call sites get independent, reproducible generators.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t label) {
    std::uint64_t x = base + 0x9e3779b97f4a7c15ULL * (label + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

}  // namespace regimealloc::detail
