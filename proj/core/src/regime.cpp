#include "regimealloc/regime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "regimealloc/errors.hpp"

namespace regimealloc {

Linkage linkage_from_string(const std::string& name) {
    if (name == "single") return Linkage::Single;
    if (name == "complete") return Linkage::Complete;
    if (name == "average") return Linkage::Average;
    throw Error(ErrorKind::Argument,
                "unknown linkage '" + name + "', expected single, complete, or average");
}

const char* to_string(Linkage linkage) {
    switch (linkage) {
        case Linkage::Single: return "single";
        case Linkage::Complete: return "complete";
        case Linkage::Average: return "average";
    }
    return "unknown";
}

double correlation_to_distance(double rho) { return std::sqrt(2.0 * (1.0 - rho)); }

MonthDistanceMatrix coefficient_correlation_distance(const EfCoefficientSeries& series,
                                                     bool standardize) {
    const Eigen::Index t_count = static_cast<Eigen::Index>(series.size());
    if (t_count < 3) {
        throw Error(ErrorKind::Degenerate,
                    "need at least 3 months to form a distance matrix, have " +
                        std::to_string(t_count));
    }

    // Step 1: coefficients as rows, months as columns.
    Eigen::MatrixXd x(3, t_count);
    for (Eigen::Index t = 0; t < t_count; ++t) {
        const EfCoefficients& c = series.coeffs[static_cast<std::size_t>(t)];
        x(0, t) = c.r_mvp;
        x(1, t) = c.sigma_mvp;
        x(2, t) = c.u;
    }
    if (standardize) {
        for (Eigen::Index i = 0; i < 3; ++i) {
            double mean = x.row(i).mean();
            double sd = std::sqrt((x.row(i).array() - mean).square().sum() /
                                  static_cast<double>(t_count - 1));
            x.row(i).array() -= mean;
            if (sd > 0.0) x.row(i) /= sd;
        }
    }

    MonthDistanceMatrix out;
    out.months = series.months;
    out.d = Eigen::MatrixXd::Zero(t_count, t_count);

    // Step 2 needs each month column to have spread across its 3 entries.
    Eigen::VectorXd col_mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - col_mean.transpose();
    Eigen::VectorXd col_norm = centered.colwise().norm();
    std::vector<bool> degenerate(static_cast<std::size_t>(t_count), false);
    for (Eigen::Index t = 0; t < t_count; ++t) {
        if (col_norm(t) == 0.0) {
            degenerate[static_cast<std::size_t>(t)] = true;
            out.warnings.push_back(
                "month " + series.months[static_cast<std::size_t>(t)].to_string() +
                ": zero variance across coefficients, correlation set to 0");
        }
    }

    for (Eigen::Index i = 0; i < t_count; ++i) {
        for (Eigen::Index j = i + 1; j < t_count; ++j) {
            double rho = 0.0;
            if (!degenerate[static_cast<std::size_t>(i)] &&
                !degenerate[static_cast<std::size_t>(j)]) {
                rho = centered.col(i).dot(centered.col(j)) /
                      (col_norm(i) * col_norm(j));
                rho = std::clamp(rho, -1.0, 1.0);
            }
            // Step 3.
            double dist = correlation_to_distance(rho);
            out.d(i, j) = dist;
            out.d(j, i) = dist;
        }
    }
    return out;
}

double dtw_distance(std::span<const double> a, std::span<const double> b,
                    std::ptrdiff_t band) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorKind::Argument, "DTW requires non-empty sequences");
    }
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(b.size());
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::ptrdiff_t window = std::max(n, m);  // unbounded
    if (band >= 0) {
        // Widen to the length difference so the corner stays reachable.
        window = std::max(band, std::abs(n - m));
    }

    // Two-row DP over the cumulative-cost lattice.
    std::vector<double> prev(static_cast<std::size_t>(m) + 1, inf);
    std::vector<double> curr(static_cast<std::size_t>(m) + 1, inf);
    prev[0] = 0.0;
    for (std::ptrdiff_t i = 1; i <= n; ++i) {
        std::fill(curr.begin(), curr.end(), inf);
        std::ptrdiff_t j_lo = std::max<std::ptrdiff_t>(1, i - window);
        std::ptrdiff_t j_hi = std::min<std::ptrdiff_t>(m, i + window);
        for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) {
            double cost = std::abs(a[static_cast<std::size_t>(i - 1)] -
                                   b[static_cast<std::size_t>(j - 1)]);
            double best = std::min({prev[static_cast<std::size_t>(j)],
                                    prev[static_cast<std::size_t>(j - 1)],
                                    curr[static_cast<std::size_t>(j - 1)]});
            curr[static_cast<std::size_t>(j)] = cost + best;
        }
        std::swap(prev, curr);
    }
    return prev[static_cast<std::size_t>(m)];
}

MonthDistanceMatrix dtw_distance_matrix(const MonthDistanceMatrix& m,
                                        std::ptrdiff_t band) {
    const Eigen::Index t_count = m.size();
    MonthDistanceMatrix out;
    out.months = m.months;
    out.d = Eigen::MatrixXd::Zero(t_count, t_count);

    // Row i is month i's distance profile over time.
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(t_count));
    for (Eigen::Index i = 0; i < t_count; ++i) {
        rows[static_cast<std::size_t>(i)].assign(m.d.row(i).begin(), m.d.row(i).end());
    }
    for (Eigen::Index i = 0; i < t_count; ++i) {
        for (Eigen::Index j = i + 1; j < t_count; ++j) {
            double dist = dtw_distance(rows[static_cast<std::size_t>(i)],
                                       rows[static_cast<std::size_t>(j)], band);
            out.d(i, j) = dist;
            out.d(j, i) = dist;
        }
    }
    return out;
}

namespace {

struct ActiveCluster {
    int id = 0;       // dendrogram cluster id
    int size = 0;
    bool alive = false;
};

}  // namespace

ClusterResult hierarchical_cluster(const MonthDistanceMatrix& d, int k,
                                   Linkage linkage) {
    const int t_count = static_cast<int>(d.size());
    if (t_count < 1) {
        throw Error(ErrorKind::Degenerate, "distance matrix is empty");
    }
    if (k < 2 || k > t_count) {
        throw Error(ErrorKind::Argument,
                    "cluster count " + std::to_string(k) + " must be in [2, " +
                        std::to_string(t_count) + "]");
    }

    // Lance-Williams agglomeration over a working copy of the distances.
    // Slot i holds a live cluster; a merge writes into the lower slot.
    Eigen::MatrixXd dist = d.d;
    std::vector<ActiveCluster> slots(static_cast<std::size_t>(t_count));
    for (int i = 0; i < t_count; ++i) {
        slots[static_cast<std::size_t>(i)] = {i, 1, true};
    }

    Dendrogram dendrogram;
    dendrogram.leaf_count = t_count;
    dendrogram.merges.reserve(static_cast<std::size_t>(t_count - 1));

    for (int step = 0; step < t_count - 1; ++step) {
        // Lowest-index pair wins ties, so results never depend on iteration
        // order internals.
        double best = std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1;
        for (int i = 0; i < t_count; ++i) {
            if (!slots[static_cast<std::size_t>(i)].alive) continue;
            for (int j = i + 1; j < t_count; ++j) {
                if (!slots[static_cast<std::size_t>(j)].alive) continue;
                if (dist(i, j) < best) {
                    best = dist(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }

        const ActiveCluster left = slots[static_cast<std::size_t>(bi)];
        const ActiveCluster right = slots[static_cast<std::size_t>(bj)];
        const int merged_id = t_count + step;
        const int merged_size = left.size + right.size;
        dendrogram.merges.push_back({left.id, right.id, best, merged_size});

        // Lance-Williams distance update for the merged cluster.
        for (int h = 0; h < t_count; ++h) {
            if (!slots[static_cast<std::size_t>(h)].alive || h == bi || h == bj) {
                continue;
            }
            double d_ih = dist(std::min(bi, h), std::max(bi, h));
            double d_jh = dist(std::min(bj, h), std::max(bj, h));
            double updated = 0.0;
            switch (linkage) {
                case Linkage::Single:
                    updated = std::min(d_ih, d_jh);
                    break;
                case Linkage::Complete:
                    updated = std::max(d_ih, d_jh);
                    break;
                case Linkage::Average:
                    updated = (left.size * d_ih + right.size * d_jh) /
                              static_cast<double>(merged_size);
                    break;
            }
            dist(std::min(bi, h), std::max(bi, h)) = updated;
            dist(std::max(bi, h), std::min(bi, h)) = updated;
        }

        slots[static_cast<std::size_t>(bi)] = {merged_id, merged_size, true};
        slots[static_cast<std::size_t>(bj)].alive = false;
    }

    // Cut: replaying the first T-K merges over a union-find gives the K
    // clusters the dendrogram cut would produce.
    std::vector<int> parent(static_cast<std::size_t>(2 * t_count - 1));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (int step = 0; step < t_count - k; ++step) {
        const DendrogramMerge& m = dendrogram.merges[static_cast<std::size_t>(step)];
        int root = t_count + step;
        parent[static_cast<std::size_t>(find(m.left))] = root;
        parent[static_cast<std::size_t>(find(m.right))] = root;
    }

    // Canonical labels: 1..K in order of each cluster's earliest member month.
    std::vector<int> roots(static_cast<std::size_t>(t_count));
    std::vector<int> label_of_root(static_cast<std::size_t>(2 * t_count - 1), 0);
    int next_label = 0;
    for (int t = 0; t < t_count; ++t) {
        int root = find(t);
        roots[static_cast<std::size_t>(t)] = root;
        if (label_of_root[static_cast<std::size_t>(root)] == 0) {
            label_of_root[static_cast<std::size_t>(root)] = ++next_label;
        }
    }

    ClusterResult result;
    result.dendrogram = std::move(dendrogram);
    result.states.months = d.months;
    result.states.k = k;
    result.states.labels.resize(static_cast<std::size_t>(t_count));
    for (int t = 0; t < t_count; ++t) {
        result.states.labels[static_cast<std::size_t>(t)] =
            label_of_root[static_cast<std::size_t>(roots[static_cast<std::size_t>(t)])];
    }
    return result;
}

namespace {

std::string render_cluster(int id, const Dendrogram& dendrogram,
                           const std::vector<MonthKey>& months) {
    if (id < dendrogram.leaf_count) {
        return months[static_cast<std::size_t>(id)].to_string();
    }
    const DendrogramMerge& m =
        dendrogram.merges[static_cast<std::size_t>(id - dendrogram.leaf_count)];
    return "(" + render_cluster(m.left, dendrogram, months) + " " +
           render_cluster(m.right, dendrogram, months) + ")";
}

}  // namespace

std::string dendrogram_tree_string(const Dendrogram& dendrogram,
                                   const std::vector<MonthKey>& months) {
    if (dendrogram.merges.empty()) {
        return months.empty() ? std::string() : months.front().to_string();
    }
    int root = dendrogram.leaf_count + static_cast<int>(dendrogram.merges.size()) - 1;
    return render_cluster(root, dendrogram, months);
}

}  // namespace regimealloc
