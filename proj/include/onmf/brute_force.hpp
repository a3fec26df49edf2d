#pragma once

// Grid search plus golden-section refinement for scalar subproblems.
// Uses nothing but ScalarProxProblem::evaluate, so it stays independent of
// the closed-form solvers it is meant to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "scalar_prox.hpp"

namespace onmf {

struct BruteForceResult {
    double argmin = 0.0;
    double min_value = 0.0;
};

/// Approximate argmin over t >= 0. The grid spans [0, t_max] with
/// t_max = max target / max(min positive weight, eps) plus a margin, which
/// bounds every breakpoint and the unconstrained quadratic minimizer.
/// For convex objectives the best grid point brackets the true minimizer for
/// any spacing, so the grid is capped at max_cells and `resolution` is only
/// the finest spacing used.
inline BruteForceResult brute_force_min(const ScalarProxProblem& problem, double resolution,
                                        std::size_t max_cells = 1u << 14) {
    problem.validate();
    if (!(resolution > 0.0)) throw std::invalid_argument("brute_force_min: resolution must be positive");

    double max_target = 0.0;
    double min_weight = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < problem.targets.size(); ++n) {
        max_target = std::max(max_target, problem.targets[n]);
        if (problem.weights[n] > 0.0) min_weight = std::min(min_weight, problem.weights[n]);
    }
    constexpr double eps = 1e-12;
    const double reach = std::isfinite(min_weight) ? max_target / std::max(min_weight, eps) : 0.0;
    const double t_max = 1.1 * reach + 1.0;

    const auto cells = static_cast<std::size_t>(
        std::clamp(std::ceil(t_max / resolution), 2.0, static_cast<double>(max_cells)));
    const long double step = static_cast<long double>(t_max) / static_cast<long double>(cells);

    std::size_t best = 0;
    long double best_value = problem.evaluate(0.0L);
    for (std::size_t j = 1; j <= cells; ++j) {
        const long double value = problem.evaluate(step * static_cast<long double>(j));
        if (value < best_value) {
            best_value = value;
            best = j;
        }
    }

    long double lo = best == 0 ? 0.0L : step * static_cast<long double>(best - 1);
    long double hi = step * static_cast<long double>(std::min(best + 1, cells));

    const long double inv_phi = (std::sqrt(5.0L) - 1.0L) / 2.0L;
    long double a = hi - inv_phi * (hi - lo);
    long double b = lo + inv_phi * (hi - lo);
    long double fa = problem.evaluate(a);
    long double fb = problem.evaluate(b);
    for (int iter = 0; iter < 400 && hi - lo > 1e-18L * std::max(1.0L, hi); ++iter) {
        if (fa <= fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = problem.evaluate(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = problem.evaluate(b);
        }
    }

    long double arg = (lo + hi) / 2.0L;
    long double val = problem.evaluate(arg);
    for (long double candidate : {lo, hi, a, b, static_cast<long double>(best) * step}) {
        const long double f = problem.evaluate(candidate);
        if (f < val) {
            val = f;
            arg = candidate;
        }
    }
    if (best_value < val) {
        val = best_value;
        arg = step * static_cast<long double>(best);
    }
    return {static_cast<double>(arg), static_cast<double>(val)};
}

}  // namespace onmf
