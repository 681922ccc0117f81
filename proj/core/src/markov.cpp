#include "regimealloc/markov.hpp"

#include <string>

#include "regimealloc/errors.hpp"

namespace regimealloc {

TransitionMatrix estimate_transition_matrix(const StateSequence& s,
                                            double pseudo_count) {
    if (s.labels.size() < 2) {
        throw Error(ErrorKind::Argument,
                    "need at least 2 labels to estimate transitions, have " +
                        std::to_string(s.labels.size()));
    }
    if (pseudo_count < 0.0) {
        throw Error(ErrorKind::Argument, "pseudo-count must be non-negative");
    }
    const int k = s.k;
    TransitionMatrix out;
    out.k = k;

    Eigen::MatrixXd counts =
        Eigen::MatrixXd::Constant(k, k, pseudo_count);
    for (std::size_t t = 0; t + 1 < s.labels.size(); ++t) {
        int from = s.labels[t];
        int to = s.labels[t + 1];
        if (from < 1 || from > k || to < 1 || to > k) {
            throw Error(ErrorKind::Validation,
                        "state label out of range 1.." + std::to_string(k) +
                            " at position " + std::to_string(t));
        }
        counts(from - 1, to - 1) += 1.0;
    }

    out.p.resize(k, k);
    for (int i = 0; i < k; ++i) {
        double departures = counts.row(i).sum();
        if (departures > 0.0) {
            out.p.row(i) = counts.row(i) / departures;
        } else {
            // No observed departures: uniform row keeps the matrix stochastic.
            out.p.row(i).setConstant(1.0 / static_cast<double>(k));
        }
    }
    return out;
}

Eigen::VectorXd transition_row(const TransitionMatrix& p, int current_state) {
    if (current_state < 1 || current_state > p.k) {
        throw Error(ErrorKind::Argument,
                    "state " + std::to_string(current_state) + " out of range 1.." +
                        std::to_string(p.k));
    }
    return p.p.row(current_state - 1).transpose();
}

SteadyState steady_state(const TransitionMatrix& p, double tol, int max_iterations) {
    const int k = p.k;
    if (k < 1) {
        throw Error(ErrorKind::Argument, "transition matrix is empty");
    }
    Eigen::VectorXd pi = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd next = (pi.transpose() * p.p).transpose();
        double sum = next.sum();
        if (sum > 0.0) next /= sum;
        if ((next - pi).lpNorm<Eigen::Infinity>() < tol) {
            return SteadyState{next};
        }
        pi = std::move(next);
    }
    throw ReducibleChainError(
        "steady-state iteration did not converge in " +
            std::to_string(max_iterations) +
            " iterations; chain may be periodic or reducible",
        pi);
}

}  // namespace regimealloc
