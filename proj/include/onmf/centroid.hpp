#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "model.hpp"
#include "scalar_prox.hpp"

namespace onmf {

enum class EmptyClusterPolicy { reseed_farthest, keep_previous };

/// Centroid for the l2 discrepancy, componentwise
/// tau_gamma(sum_m X_mn u_m / (|u|^2 + mu_v)) with gamma = lambda_v / (2 (|u|^2 + mu_v)).
/// `members` holds the cluster's rows, `weights` their membership coefficients.
inline std::vector<double> centroid_l2(const Matrix& members, std::span<const double> weights, double lambda_v,
                                       double mu_v) {
    if (members.rows() == 0 || members.rows() != weights.size())
        throw std::invalid_argument("centroid_l2: need one weight per member and at least one member");
    const double scale = vec::squared_norm(weights) + mu_v;
    if (!(scale > 0.0)) throw DegenerateCentroidError("centroid_l2: |u_k|^2 + mu_v = 0");
    const double gamma = lambda_v / (2.0 * scale);

    std::vector<double> sums(members.cols(), 0.0);
    for (std::size_t m = 0; m < members.rows(); ++m) {
        const auto row = members.row(m);
        for (std::size_t n = 0; n < row.size(); ++n) sums[n] += row[n] * weights[m];
    }
    for (double& s : sums) s = soft_threshold(gamma, s / scale);
    return sums;
}

/// Centroid for the l1 discrepancy: componentwise weighted regularized median
/// of the member column with the membership coefficients as weights.
inline std::vector<double> centroid_l1(const Matrix& members, std::span<const double> weights, double lambda_v,
                                       double mu_v) {
    if (members.rows() == 0 || members.rows() != weights.size())
        throw std::invalid_argument("centroid_l1: need one weight per member and at least one member");
    std::vector<double> out(members.cols());
    std::vector<double> column(members.rows());
    for (std::size_t n = 0; n < members.cols(); ++n) {
        for (std::size_t m = 0; m < members.rows(); ++m) column[m] = members(m, n);
        out[n] = weighted_reg_median<double>(column, weights, lambda_v, mu_v).value;
    }
    return out;
}

struct CentroidUpdate {
    CentroidMatrix centroids;
    /// Clusters that had no member with a positive coefficient.
    std::vector<std::size_t> empty_clusters;
    /// Clusters whose row was replaced by a data point.
    std::vector<std::size_t> reseeded;
    /// Norm divided out of each row in normalized mode (1 elsewhere and for untouched rows).
    std::vector<double> row_scale;
};

namespace detail {

inline double centroid_penalty(std::span<const double> row, const RegularizationParams& reg) {
    return reg.lambda_v * vec::l1_norm(row) + reg.mu_v * vec::squared_norm(row);
}

/// Rescale to unit l2 norm in place; returns the original norm (0 leaves the row as is).
inline double normalize_row(std::vector<double>& row) {
    const double norm = std::sqrt(vec::squared_norm(std::span<const double>(row)));
    if (norm > 0.0)
        for (double& x : row) x /= norm;
    return norm;
}

}  // namespace detail

/// One centroid step: every cluster with at least one member is replaced by
/// the exact minimizer of its block subproblem, then rows are unit-normalized
/// in normalized mode. Empty clusters follow `policy`; reseeding picks the
/// data point with the largest `row_distances` entry (distance to its
/// assigned centroid, lowest index on ties, each point used at most once).
/// A reseed is kept only if it does not raise the row's V penalty, which is
/// always the case without V regularization.
inline CentroidUpdate update_centroids(const DataMatrix& x, const Membership& membership, std::size_t clusters,
                                       const ModelSpec& spec, const CentroidMatrix& previous,
                                       EmptyClusterPolicy policy, std::span<const double> row_distances) {
    if (membership.rows() != x.rows() || membership.clusters() != clusters || previous.rows() != clusters ||
        previous.cols() != x.cols())
        throw std::invalid_argument("update_centroids: inconsistent shapes");
    if (policy == EmptyClusterPolicy::reseed_farthest && row_distances.size() != x.rows())
        throw std::invalid_argument("update_centroids: reseeding needs one distance per data row");

    const auto& reg = spec.reg();
    const bool l1 = spec.discrepancy() == Discrepancy::l1;
    const bool normalized = spec.mode() == ConstraintMode::normalized;

    std::vector<std::vector<std::size_t>> members(clusters);
    for (std::size_t m = 0; m < membership.rows(); ++m)
        if (const auto& e = membership[m]) members[e->cluster].push_back(m);

    CentroidUpdate out{previous, {}, {}, std::vector<double>(clusters, 1.0)};
    Matrix next = previous.matrix();

    for (std::size_t k = 0; k < clusters; ++k) {
        const auto& rows = members[k];
        if (rows.empty()) {
            out.empty_clusters.push_back(k);
            continue;
        }
        Matrix block(rows.size(), x.cols());
        std::vector<double> weights(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            block.set_row(i, x.row(rows[i]));
            weights[i] = membership[rows[i]]->coefficient;
        }
        auto row = l1 ? centroid_l1(block, weights, reg.lambda_v, reg.mu_v)
                      : centroid_l2(block, weights, reg.lambda_v, reg.mu_v);
        if (normalized) {
            const double norm = detail::normalize_row(row);
            if (norm > 0.0) out.row_scale[k] = norm;
        }
        next.set_row(k, row);
    }

    if (policy == EmptyClusterPolicy::reseed_farthest && !out.empty_clusters.empty()) {
        std::vector<bool> used(x.rows(), false);
        for (std::size_t k : out.empty_clusters) {
            std::size_t pick = x.rows();
            for (std::size_t m = 0; m < x.rows(); ++m) {
                if (used[m]) continue;
                if (pick == x.rows() || row_distances[m] > row_distances[pick]) pick = m;
            }
            if (pick == x.rows()) break;
            used[pick] = true;

            std::vector<double> seed(x.row(pick).begin(), x.row(pick).end());
            if (normalized) detail::normalize_row(seed);
            if (detail::centroid_penalty(seed, reg) <= detail::centroid_penalty(previous.row(k), reg)) {
                next.set_row(k, seed);
                out.reseeded.push_back(k);
            }
        }
    }

    out.centroids = CentroidMatrix(std::move(next));
    return out;
}

}  // namespace onmf
