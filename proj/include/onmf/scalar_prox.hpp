#pragma once

// Closed-form solvers for the two scalar problem families that every block
// update of regularized orthogonal NMF reduces to:
//
//   quadratic:    sum_n (v_n - w_n t)^2 + mu t^2 + lambda |t|
//   weighted_l1:  sum_n |v_n - w_n t|   + mu t^2 + lambda |t|
//
// Both are minimized over t >= 0. The infimum over t > 0 (used for the
// membership coefficient) coincides with the minimum over t >= 0 for these
// convex objectives; callers interpret t = 0 themselves.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace onmf {

/// Soft thresholding restricted to the nonnegative half line:
/// x - gamma for x >= gamma, else 0.
template <std::floating_point T>
constexpr T soft_threshold(T gamma, T x) noexcept {
    return x >= gamma ? x - gamma : T{0};
}

template <std::floating_point T>
struct MedianResult {
    T value{0};
    /// Objective was constant in t (all weights zero and no regularization);
    /// value is then 0 by convention.
    bool degenerate = false;
};

/// Weighted, elastic-net regularized median: the midpoint of
/// argmin_{t >= 0} sum_n |v_n - w_n t| + mu t^2 + lambda |t|.
///
/// The objective is piecewise quadratic (affine when mu == 0) between the
/// breakpoints v_n / w_n, so the minimizer is located exactly by walking the
/// pieces left to right and tracking the right derivative. A flat minimizing
/// piece is only possible for mu == 0; its midpoint is returned.
template <std::floating_point T>
MedianResult<T> weighted_reg_median(std::span<const T> v, std::span<const T> w, T lambda, T mu) {
    if (v.size() != w.size() || v.empty())
        throw std::invalid_argument("weighted_reg_median: targets and weights must have equal, nonzero length");
    if (lambda < T{0} || mu < T{0})
        throw std::invalid_argument("weighted_reg_median: regularization weights must be nonnegative");

    std::vector<std::pair<T, T>> knots;  // (breakpoint, weight)
    knots.reserve(v.size());
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (w[n] < T{0}) throw std::invalid_argument("weighted_reg_median: negative weight");
        if (w[n] > T{0}) knots.emplace_back(v[n] / w[n], w[n]);
    }
    if (knots.empty()) {
        // Objective is |v|_1 + mu t^2 + lambda t: minimized at 0, constant if unregularized.
        return {T{0}, lambda == T{0} && mu == T{0}};
    }
    std::sort(knots.begin(), knots.end());

    const std::size_t count = knots.size();
    // below[i]: weight of knots strictly before index i; above[i]: weight from index i on.
    // Accumulated from opposite ends so neither carries the other's rounding.
    std::vector<T> below(count + 1, T{0});
    std::vector<T> above(count + 1, T{0});
    for (std::size_t i = 0; i < count; ++i) below[i + 1] = below[i] + knots[i].second;
    for (std::size_t i = count; i-- > 0;) above[i] = above[i + 1] + knots[i].second;

    const T flat_tol = T(1e-12) * std::max(T{1}, lambda + above[0]);

    T left{0};
    std::size_t i = 0;
    while (i < count && knots[i].first <= left) ++i;

    for (;;) {
        // Slope on (left, next knot): terms with knot <= left push up, the rest pull down.
        const T affine = lambda + below[i] - above[i];
        const T right_slope = affine + T{2} * mu * left;
        const T right = i < count ? knots[i].first : std::numeric_limits<T>::infinity();

        if (right_slope > flat_tol) return {left, false};
        if (std::abs(right_slope) <= flat_tol) {
            if (mu == T{0} && std::isfinite(right)) return {(left + right) / T{2}, false};
            return {left, false};
        }
        if (mu > T{0}) {
            const T stationary = -affine / (T{2} * mu);
            if (stationary < right) return {stationary, false};
        }
        if (!std::isfinite(right)) {
            // Unreachable for valid input: the last piece has slope lambda + total weight > 0.
            return {left, false};
        }
        left = right;
        while (i < count && knots[i].first <= left) ++i;
    }
}

enum class ProxKind { quadratic, weighted_l1 };

/// Feasible set of the scalar problem. Both are solved over t >= 0.
enum class ProxDomain { nonneg, strictly_pos };

/// One scalar subproblem instance, either a centroid component (targets are a
/// data column, weights the cluster's membership coefficients) or a membership
/// coefficient (targets a data row, weights a centroid row).
struct ScalarProxProblem {
    ProxKind kind = ProxKind::quadratic;
    std::vector<double> targets;
    std::vector<double> weights;
    double l1_weight = 0.0;
    double l2_weight = 0.0;
    ProxDomain domain = ProxDomain::nonneg;

    void validate() const {
        if (targets.empty() || targets.size() != weights.size())
            throw std::invalid_argument("ScalarProxProblem: targets and weights must have equal, nonzero length");
        if (!(l1_weight >= 0.0) || !(l2_weight >= 0.0))
            throw std::invalid_argument("ScalarProxProblem: regularization weights must be nonnegative");
        for (double w : weights)
            if (!(w >= 0.0)) throw std::invalid_argument("ScalarProxProblem: weights must be nonnegative");
    }

    /// Objective value at t, accumulated in extended precision.
    long double evaluate(long double t) const {
        long double s = 0.0L;
        for (std::size_t n = 0; n < targets.size(); ++n) {
            const long double r = static_cast<long double>(targets[n]) - static_cast<long double>(weights[n]) * t;
            s += kind == ProxKind::quadratic ? r * r : std::fabs(r);
        }
        return s + static_cast<long double>(l2_weight) * t * t + static_cast<long double>(l1_weight) * std::fabs(t);
    }

    /// Quadratic kind only: sum_n w_n^2 + mu, the curvature of the smooth part.
    double quadratic_scale() const {
        double s = l2_weight;
        for (double w : weights) s += w * w;
        return s;
    }

    /// Quadratic kind only: threshold gamma = lambda / (2 (|w|^2 + mu)).
    double threshold() const { return l1_weight / (2.0 * quadratic_scale()); }
};

/// Exact minimizer of a scalar subproblem over t >= 0.
inline MedianResult<double> solve(const ScalarProxProblem& p) {
    p.validate();
    if (p.kind == ProxKind::weighted_l1)
        return weighted_reg_median<double>(p.targets, p.weights, p.l1_weight, p.l2_weight);

    const double scale = p.quadratic_scale();
    if (scale <= 0.0) return {0.0, p.l1_weight == 0.0};
    double cross = 0.0;
    for (std::size_t n = 0; n < p.targets.size(); ++n) cross += p.targets[n] * p.weights[n];
    return {soft_threshold(p.threshold(), cross / scale), false};
}

}  // namespace onmf
