#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "centroid.hpp"
#include "distance.hpp"
#include "errors.hpp"
#include "model.hpp"

namespace onmf {

enum class InitMethod { random_rows, plusplus };

/// What happens to a row whose coefficient thresholds to zero.
enum class ZeroRowPolicy { keep_last_cluster, exclude };

struct SolverConfig {
    std::size_t k = 1;
    std::size_t max_iter = 300;
    /// Stop once the relative objective decrease drops below this.
    double tol = 1e-9;
    std::uint64_t seed = 0;
    InitMethod init = InitMethod::random_rows;
    EmptyClusterPolicy empty_cluster_policy = EmptyClusterPolicy::reseed_farthest;
    ZeroRowPolicy zero_row_policy = ZeroRowPolicy::keep_last_cluster;

    void validate(std::size_t data_rows) const {
        if (k < 1) throw InputError("k must be at least 1");
        if (k > data_rows)
            throw InputError("k = " + std::to_string(k) + " exceeds the number of data rows (" +
                             std::to_string(data_rows) + ")");
        if (max_iter < 1) throw InputError("max_iter must be at least 1");
        if (!(tol >= 0.0) || !std::isfinite(tol)) throw InputError("tol must be finite and nonnegative");
    }
};

inline std::string to_string(InitMethod m) { return m == InitMethod::random_rows ? "random" : "plusplus"; }
inline std::string to_string(EmptyClusterPolicy p) {
    return p == EmptyClusterPolicy::reseed_farthest ? "reseed" : "keep";
}
inline std::string to_string(ZeroRowPolicy p) { return p == ZeroRowPolicy::keep_last_cluster ? "keep" : "exclude"; }

namespace detail {

/// Seeded draws with a fully specified mapping from the mt19937_64 stream, so
/// results do not depend on the standard library's distributions.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, n), rejection sampled.
    std::size_t index(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t reject_below = (0 - bound) % bound;
        std::uint64_t r;
        do r = engine_();
        while (r < reject_below);
        return static_cast<std::size_t>(r % bound);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

inline bool same_row(std::span<const double> a, std::span<const double> b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

/// Mode distance used for seeding; a degenerate centroid counts as the
/// zero-coefficient value |x|^i.
inline double seeding_distance(std::span<const double> x, std::span<const double> c, const ModelSpec& spec) {
    std::vector<double> centroid(c.begin(), c.end());
    if (spec.mode() == ConstraintMode::normalized) normalize_row(centroid);
    if (auto a = evaluate_centroid(x, centroid, spec)) return a->distance;
    return spec.discrepancy() == Discrepancy::l1 ? vec::l1_norm(x) : vec::squared_norm(x);
}

}  // namespace detail

/// K distinct data rows as starting centroids. random_rows takes the first K
/// distinct rows of a seeded permutation; plusplus draws each further row
/// with probability proportional to its mode distance from the nearest
/// already chosen row.
inline CentroidMatrix init_centroids(const DataMatrix& x, const SolverConfig& config, const ModelSpec& spec) {
    config.validate(x.rows());
    const std::size_t rows = x.rows();
    detail::SeededRng rng(config.seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(config.k);

    auto duplicates_chosen = [&](std::size_t m) {
        return std::any_of(chosen.begin(), chosen.end(),
                           [&](std::size_t c) { return detail::same_row(x.row(m), x.row(c)); });
    };

    if (config.init == InitMethod::random_rows) {
        std::vector<std::size_t> order(rows);
        for (std::size_t i = 0; i < rows; ++i) order[i] = i;
        for (std::size_t i = rows; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        for (std::size_t m : order) {
            if (chosen.size() == config.k) break;
            if (!duplicates_chosen(m)) chosen.push_back(m);
        }
    } else {
        chosen.push_back(rng.index(rows));
        std::vector<double> nearest(rows, std::numeric_limits<double>::infinity());
        while (chosen.size() < config.k) {
            const auto latest = x.row(chosen.back());
            std::vector<std::size_t> candidates;
            double total = 0.0;
            for (std::size_t m = 0; m < rows; ++m) {
                nearest[m] = std::min(nearest[m], detail::seeding_distance(x.row(m), latest, spec));
                if (duplicates_chosen(m)) continue;
                candidates.push_back(m);
                total += nearest[m];
            }
            if (candidates.empty()) break;
            std::size_t pick = candidates.back();
            if (total > 0.0) {
                const double target = rng.unit() * total;
                double running = 0.0;
                for (std::size_t m : candidates) {
                    running += nearest[m];
                    if (nearest[m] > 0.0 && target < running) {
                        pick = m;
                        break;
                    }
                }
            } else {
                // Every remaining row is at distance zero (e.g. positive multiples under a
                // projection distance); fall back to a uniform draw.
                pick = candidates[rng.index(candidates.size())];
            }
            chosen.push_back(pick);
        }
    }

    if (chosen.size() < config.k)
        throw DuplicateRowsError("only " + std::to_string(chosen.size()) + " distinct data rows for k = " +
                                 std::to_string(config.k));

    Matrix v(config.k, x.cols());
    for (std::size_t k = 0; k < config.k; ++k) v.set_row(k, x.row(chosen[k]));
    return CentroidMatrix(std::move(v));
}

/// Snapshot handed to a fit observer after every iteration.
struct IterationState {
    std::size_t iteration;
    const Membership& membership;
    const std::vector<std::optional<std::size_t>>& labels;
    const CentroidMatrix& centroids;
    double objective;
};

using FitObserver = std::function<void(const IterationState&)>;

/// Alternating minimization from the given starting centroids: assign every
/// row (U step), update centroids (V step), record the objective. Stops when
/// the assignment pattern repeats, the relative objective decrease falls
/// below config.tol, or config.max_iter is reached.
inline FactorizationResult fit_from(const DataMatrix& x, const ModelSpec& spec, const SolverConfig& config,
                                    CentroidMatrix start, const FitObserver& observer = {}) {
    config.validate(x.rows());
    if (start.rows() != config.k || start.cols() != x.cols())
        throw std::invalid_argument("fit: starting centroids have the wrong shape");

    const std::size_t rows = x.rows();
    const bool normalized = spec.mode() == ConstraintMode::normalized;
    const bool rescale_members = normalized && spec.discrepancy() == Discrepancy::l1;

    if (normalized) {
        Matrix unit = start.matrix();
        for (std::size_t k = 0; k < unit.rows(); ++k) {
            std::vector<double> row(unit.row(k).begin(), unit.row(k).end());
            detail::normalize_row(row);
            unit.set_row(k, row);
        }
        start = CentroidMatrix(std::move(unit));
    }

    FactorizationResult result;
    result.centroids = std::move(start);
    result.membership = Membership(rows, config.k);
    result.labels.assign(rows, std::nullopt);
    result.distances.assign(rows, 0.0);

    for (std::size_t iter = 1; iter <= config.max_iter; ++iter) {
        Membership next(rows, config.k);
        std::vector<std::size_t> unassigned;
        for (std::size_t m = 0; m < rows; ++m) {
            const Assignment a = assign(x.row(m), result.centroids, spec);
            result.distances[m] = a.distance;
            if (a.coefficient > 0.0) {
                next.assign(m, a.cluster, a.coefficient);
                result.labels[m] = a.cluster;
            } else {
                unassigned.push_back(m);
                if (config.zero_row_policy == ZeroRowPolicy::exclude)
                    result.labels[m].reset();
                else if (!result.labels[m])
                    result.labels[m] = a.cluster;
            }
        }
        const bool unchanged = iter > 1 && next.same_pattern(result.membership);

        auto update = update_centroids(x, next, config.k, spec, result.centroids, config.empty_cluster_policy,
                                       result.distances);
        if (rescale_members) {
            // Keep U V fixed while V's rows move onto the unit sphere.
            for (std::size_t m = 0; m < rows; ++m)
                if (const auto& e = next[m]) next.assign(m, e->cluster, e->coefficient * update.row_scale[e->cluster]);
        }
        result.centroids = std::move(update.centroids);
        result.membership = std::move(next);
        result.unassigned_rows = std::move(unassigned);

        const double value = objective(x, result.membership, result.centroids, spec);
        result.objective_trace.push_back(value);
        result.iterations = iter;
        if (observer) observer({iter, result.membership, result.labels, result.centroids, value});

        if (unchanged) {
            result.converged = true;
            break;
        }
        if (result.objective_trace.size() >= 2) {
            const double prev = result.objective_trace[result.objective_trace.size() - 2];
            if (prev - value < config.tol * std::abs(prev)) {
                result.converged = true;
                break;
            }
        }
    }
    return result;
}

inline FactorizationResult fit(const DataMatrix& x, const ModelSpec& spec, const SolverConfig& config,
                               const FitObserver& observer = {}) {
    return fit_from(x, spec, config, init_centroids(x, config, spec), observer);
}

}  // namespace onmf
