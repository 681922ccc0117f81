#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "regimealloc/date.hpp"
#include "regimealloc/frontier.hpp"

namespace regimealloc {

/// Symmetric matrix of non-negative distances between months.
struct MonthDistanceMatrix {
    std::vector<MonthKey> months;
    Eigen::MatrixXd d;  // T x T, zero diagonal
    std::vector<std::string> warnings;

    Eigen::Index size() const { return d.rows(); }
};

struct DendrogramMerge {
    int left = 0;    // cluster id (leaves are 0..T-1, merges are T, T+1, ...)
    int right = 0;
    double height = 0.0;
    int size = 0;    // member count of the merged cluster
};

/// Full agglomerative merge history: exactly T-1 merges over T leaves.
struct Dendrogram {
    int leaf_count = 0;
    std::vector<DendrogramMerge> merges;
};

/// Per-month state labels in 1..K; every state has at least one member.
struct StateSequence {
    std::vector<MonthKey> months;
    std::vector<int> labels;
    int k = 0;
};

enum class Linkage { Single, Complete, Average };

Linkage linkage_from_string(const std::string& name);
const char* to_string(Linkage linkage);

/// d = sqrt(2 (1 - rho)): 0 at perfect correlation, sqrt(2) at none, 2 at
/// perfect anticorrelation.
double correlation_to_distance(double rho);

/// Steps 1-3 of the state-definition procedure: transpose the coefficient
/// series to a 3 x T matrix (optionally z-scoring each coefficient across
/// time), take the Pearson correlation of every pair of month columns, and
/// map it through correlation_to_distance. A month column with zero variance
/// gets rho = 0 against every other month, with a warning.
MonthDistanceMatrix coefficient_correlation_distance(
    const EfCoefficientSeries& series, bool standardize = true);

/// Classic dynamic-programming warping distance with |a_i - b_j| local cost
/// and endpoints pinned first-to-first, last-to-last. `band` < 0 means no
/// warping-window constraint; otherwise |i - j| is limited to
/// max(band, |len(a) - len(b)|) so the end stays reachable.
double dtw_distance(std::span<const double> a, std::span<const double> b,
                    std::ptrdiff_t band = -1);

/// Step 4: pairwise warping distance between the rows of the month distance
/// matrix, each row read as that month's distance profile in time order.
/// Note the output depends on the month ordering of the input rows.
MonthDistanceMatrix dtw_distance_matrix(const MonthDistanceMatrix& m,
                                        std::ptrdiff_t band = -1);

struct ClusterResult {
    StateSequence states;
    Dendrogram dendrogram;
};

/// Step 5: agglomerative clustering of the months, cut to exactly K states.
/// Merge ties break toward the lowest slot pair, so results are
/// deterministic. Labels are canonical: 1..K in order of each cluster's
/// earliest member month.
ClusterResult hierarchical_cluster(const MonthDistanceMatrix& d, int k,
                                   Linkage linkage = Linkage::Average);

/// Nested-parenthesis rendering of the merge tree, leaves named by month.
std::string dendrogram_tree_string(const Dendrogram& dendrogram,
                                   const std::vector<MonthKey>& months);

}  // namespace regimealloc
