#pragma once

// Membership coefficients and the induced point-to-centroid distances.
// A distance is the minimum of the row subproblem
//   psi(t) = D_i(x, t v) + mu_u t^2 + lambda_u |t|,
// reported in natural units: squared for l2, plain for l1.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>

#include "errors.hpp"
#include "matrix.hpp"
#include "model.hpp"
#include "scalar_prox.hpp"

namespace onmf {

using Vector = std::span<const double>;

namespace detail {

inline void require_same_length(Vector x, Vector v) {
    if (x.size() != v.size()) throw std::invalid_argument("data point and centroid differ in length");
}

inline double l2_scale(Vector v, double mu_u) {
    const double scale = vec::squared_norm(v) + mu_u;
    if (!(scale > 0.0)) throw DegenerateCentroidError("centroid has |v|^2 + mu_u = 0; coefficient is undefined");
    return scale;
}

inline double l2_residual(Vector x, Vector v, double t) {
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double r = x[n] - t * v[n];
        s += r * r;
    }
    return s;
}

inline double l1_residual(Vector x, Vector v, double t) {
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) s += std::abs(x[n] - t * v[n]);
    return s;
}

}  // namespace detail

/// Optimal coefficient for the l2 discrepancy: tau_gamma(<x,v> / (|v|^2 + mu_u))
/// with gamma = lambda_u / (2 (|v|^2 + mu_u)).
inline double coefficient_l2(Vector x, Vector v, double lambda_u, double mu_u) {
    detail::require_same_length(x, v);
    const double scale = detail::l2_scale(v, mu_u);
    return soft_threshold(lambda_u / (2.0 * scale), vec::dot(x, v) / scale);
}

/// Squared distance |x - t v|^2 + mu_u t^2 + lambda_u t at the optimal t.
inline double distance_l2(Vector x, Vector v, double lambda_u, double mu_u) {
    const double t = coefficient_l2(x, v, lambda_u, mu_u);
    return detail::l2_residual(x, v, t) + mu_u * t * t + lambda_u * t;
}

/// Same quantity without forming the residual: |x|^2 when lambda_u / 2 > <x,v>,
/// else |x|^2 - (lambda_u - 2 <x,v>)^2 / (4 (|v|^2 + mu_u)).
inline double distance_l2_closed_form(Vector x, Vector v, double lambda_u, double mu_u) {
    detail::require_same_length(x, v);
    const double scale = detail::l2_scale(v, mu_u);
    const double xx = vec::squared_norm(x);
    const double xv = vec::dot(x, v);
    if (lambda_u / 2.0 > xv) return xx;
    const double gap = lambda_u - 2.0 * xv;
    return std::max(0.0, xx - gap * gap / (4.0 * scale));
}

/// Angle form for mu_u = 0 and lambda_u / 2 <= <x,v>:
/// |x|^2 sin^2(x, v) + (lambda_u / |v|^2) (<x,v> - lambda_u / 4).
inline double distance_l2_angle_form(Vector x, Vector v, double lambda_u) {
    detail::require_same_length(x, v);
    const double xx = vec::squared_norm(x);
    const double vv = vec::squared_norm(v);
    if (!(xx > 0.0) || !(vv > 0.0)) throw DegenerateInputError("angle form needs nonzero x and v");
    const double xv = vec::dot(x, v);
    if (lambda_u / 2.0 > xv) throw std::domain_error("angle form requires lambda_u / 2 <= <x,v>");
    const double cos2 = (xv * xv) / (xx * vv);
    const double sin2 = std::max(0.0, 1.0 - cos2);
    return xx * sin2 + (lambda_u / vv) * (xv - lambda_u / 4.0);
}

/// Optimal coefficient for the l1 discrepancy: the weighted regularized median
/// of the entries of x with weights v.
inline MedianResult<double> coefficient_l1_ex(Vector x, Vector v, double lambda_u, double mu_u) {
    detail::require_same_length(x, v);
    return weighted_reg_median<double>(x, v, lambda_u, mu_u);
}

inline double coefficient_l1(Vector x, Vector v, double lambda_u, double mu_u) {
    return coefficient_l1_ex(x, v, lambda_u, mu_u).value;
}

/// |x - t v|_1 + mu_u t^2 + lambda_u t at the optimal t.
inline double distance_l1(Vector x, Vector v, double lambda_u, double mu_u) {
    const double t = coefficient_l1(x, v, lambda_u, mu_u);
    return detail::l1_residual(x, v, t) + mu_u * t * t + lambda_u * t;
}

struct Assignment {
    std::size_t cluster = 0;
    double coefficient = 0.0;
    double distance = 0.0;
};

/// Coefficient and distance of x against a single centroid under the model's
/// mode, or nothing if the centroid is degenerate for this subproblem.
inline std::optional<Assignment> evaluate_centroid(Vector x, Vector v, const ModelSpec& spec) {
    detail::require_same_length(x, v);
    const auto& reg = spec.reg();
    const bool l1 = spec.discrepancy() == Discrepancy::l1;

    switch (spec.mode()) {
        case ConstraintMode::binary:
            return Assignment{0, 1.0, l1 ? detail::l1_residual(x, v, 1.0) : detail::l2_residual(x, v, 1.0)};

        case ConstraintMode::normalized:
            if (!l1) {
                // Unit-norm centroid: t = <x,v>, distance |x - <x,v> v|^2.
                const double t = vec::dot(x, v);
                return Assignment{0, t, detail::l2_residual(x, v, t)};
            }
            [[fallthrough]];

        case ConstraintMode::c1_free:
            if (l1) {
                const auto t = coefficient_l1_ex(x, v, reg.lambda_u, reg.mu_u);
                if (t.degenerate) return std::nullopt;
                return Assignment{0, t.value,
                                  detail::l1_residual(x, v, t.value) + reg.mu_u * t.value * t.value +
                                      reg.lambda_u * t.value};
            }
            if (!(vec::squared_norm(v) + reg.mu_u > 0.0)) return std::nullopt;
            {
                const double t = coefficient_l2(x, v, reg.lambda_u, reg.mu_u);
                return Assignment{0, t, detail::l2_residual(x, v, t) + reg.mu_u * t * t + reg.lambda_u * t};
            }
    }
    return std::nullopt;
}

/// Nearest centroid row under the model's distance. Ties go to the lowest
/// index; degenerate rows are skipped.
inline Assignment assign(Vector x, const CentroidMatrix& centroids, const ModelSpec& spec) {
    if (centroids.rows() == 0) throw std::invalid_argument("assign: no centroids");
    std::optional<Assignment> best;
    for (std::size_t k = 0; k < centroids.rows(); ++k) {
        auto a = evaluate_centroid(x, centroids.row(k), spec);
        if (!a) continue;
        if (!best || a->distance < best->distance) {
            a->cluster = k;
            best = a;
        }
    }
    if (!best) throw NoValidCentroidError("every centroid row is degenerate");
    return *best;
}

}  // namespace onmf
