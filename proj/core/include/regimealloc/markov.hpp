#pragma once

#include <Eigen/Dense>

#include "regimealloc/regime.hpp"

namespace regimealloc {

/// Row-stochastic state-transition matrix; row = source state.
struct TransitionMatrix {
    int k = 0;
    Eigen::MatrixXd p;  // K x K
};

/// Long-run state distribution pi with pi P = pi, sum(pi) = 1.
struct SteadyState {
    Eigen::VectorXd pi;
};

/// Maximum-likelihood count estimator over consecutive label pairs. A state
/// with zero departures gets a uniform row so the matrix stays stochastic.
/// `pseudo_count` adds optional Laplace smoothing (default none).
TransitionMatrix estimate_transition_matrix(const StateSequence& s,
                                            double pseudo_count = 0.0);

/// Row of transition probabilities out of `current_state` (1-based).
Eigen::VectorXd transition_row(const TransitionMatrix& p, int current_state);

/// Power iteration from the uniform vector. Non-convergence (periodic or
/// reducible chain) throws ReducibleChainError carrying the last iterate.
SteadyState steady_state(const TransitionMatrix& p, double tol = 1e-12,
                         int max_iterations = 100000);

}  // namespace regimealloc
