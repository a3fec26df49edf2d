#pragma once

// Textbook Lloyd K-means and K-median, kept deliberately separate from the
// ONMF solver so they can serve as oracles for its binary-mode reductions.
// Conventions shared with the solver: lowest-index tie-break, midpoint
// median, reseed-farthest for empty clusters, stop when assignments repeat.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "matrix.hpp"

namespace onmf::reference {

struct Snapshot {
    std::vector<std::size_t> assignments;
    Matrix centroids;
};

struct ClusteringResult {
    std::vector<std::size_t> assignments;
    Matrix centroids;
    std::vector<double> trace;
    std::vector<Snapshot> history;
};

namespace detail {

enum class Metric { squared_euclidean, manhattan };

inline double point_distance(std::span<const double> a, std::span<const double> b, Metric metric) {
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        const double d = a[n] - b[n];
        s += metric == Metric::squared_euclidean ? d * d : std::abs(d);
    }
    return s;
}

inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

inline ClusteringResult lloyd(const Matrix& x, std::size_t k, const Matrix& init, std::size_t max_iter,
                              Metric metric) {
    if (init.rows() != k || init.cols() != x.cols() || k == 0)
        throw std::invalid_argument("reference: initial centroids have the wrong shape");
    const std::size_t rows = x.rows();
    const std::size_t cols = x.cols();

    ClusteringResult out;
    out.centroids = init;
    std::vector<double> dist(rows, 0.0);

    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        std::vector<std::size_t> labels(rows, 0);
        for (std::size_t m = 0; m < rows; ++m) {
            double best = point_distance(x.row(m), out.centroids.row(0), metric);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = point_distance(x.row(m), out.centroids.row(c), metric);
                if (d < best) {
                    best = d;
                    labels[m] = c;
                }
            }
            dist[m] = best;
        }
        const bool unchanged = iter > 1 && labels == out.assignments;

        Matrix next = out.centroids;
        std::vector<std::size_t> empty;
        for (std::size_t c = 0; c < k; ++c) {
            std::vector<std::size_t> members;
            for (std::size_t m = 0; m < rows; ++m)
                if (labels[m] == c) members.push_back(m);
            if (members.empty()) {
                empty.push_back(c);
                continue;
            }
            for (std::size_t n = 0; n < cols; ++n) {
                if (metric == Metric::squared_euclidean) {
                    double sum = 0.0;
                    for (std::size_t m : members) sum += x(m, n);
                    next(c, n) = sum / static_cast<double>(members.size());
                } else {
                    std::vector<double> column;
                    for (std::size_t m : members) column.push_back(x(m, n));
                    next(c, n) = median(std::move(column));
                }
            }
        }
        std::vector<bool> used(rows, false);
        for (std::size_t c : empty) {
            std::size_t far = rows;
            for (std::size_t m = 0; m < rows; ++m)
                if (!used[m] && (far == rows || dist[m] > dist[far])) far = m;
            if (far == rows) break;
            used[far] = true;
            next.set_row(c, x.row(far));
        }

        out.assignments = std::move(labels);
        out.centroids = std::move(next);
        double cost = 0.0;
        for (std::size_t m = 0; m < rows; ++m)
            cost += point_distance(x.row(m), out.centroids.row(out.assignments[m]), metric);
        out.trace.push_back(cost);
        out.history.push_back({out.assignments, out.centroids});
        if (unchanged) break;
    }
    return out;
}

}  // namespace detail

/// Lloyd K-means: squared Euclidean assignment, mean centroids.
inline ClusteringResult lloyd_kmeans(const Matrix& x, std::size_t k, const Matrix& init, std::size_t max_iter) {
    return detail::lloyd(x, k, init, max_iter, detail::Metric::squared_euclidean);
}

/// K-median: l1 assignment, coordinate-median centroids (midpoint for even counts).
inline ClusteringResult kmedian(const Matrix& x, std::size_t k, const Matrix& init, std::size_t max_iter) {
    return detail::lloyd(x, k, init, max_iter, detail::Metric::manhattan);
}

}  // namespace onmf::reference
