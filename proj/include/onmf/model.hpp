#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace onmf {

/// Nonnegative M x N data matrix; row m is data point x_m.
class DataMatrix {
public:
    DataMatrix() = default;

    explicit DataMatrix(Matrix values) : values_(std::move(values)) {
        if (values_.rows() == 0 || values_.cols() == 0)
            throw InputError("data matrix must have at least one row and one column");
        for (std::size_t m = 0; m < values_.rows(); ++m) {
            for (std::size_t n = 0; n < values_.cols(); ++n) {
                const double x = values_(m, n);
                if (!std::isfinite(x))
                    throw InputError("non-finite entry at row " + std::to_string(m + 1) + ", column " +
                                     std::to_string(n + 1));
                if (x < 0.0) throw NonnegativityError(m + 1, n + 1, x);
            }
        }
    }

    std::size_t rows() const noexcept { return values_.rows(); }
    std::size_t cols() const noexcept { return values_.cols(); }
    std::span<const double> row(std::size_t m) const { return values_.row(m); }
    double operator()(std::size_t m, std::size_t n) const { return values_(m, n); }
    const Matrix& matrix() const noexcept { return values_; }

private:
    Matrix values_;
};

/// Nonnegative K x N matrix whose rows are the centroids v_k.
class CentroidMatrix {
public:
    CentroidMatrix() = default;

    explicit CentroidMatrix(Matrix values) : values_(std::move(values)) {
        for (double x : values_.values())
            if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("centroid entries must be finite and nonnegative");
    }

    std::size_t rows() const noexcept { return values_.rows(); }
    std::size_t cols() const noexcept { return values_.cols(); }
    std::span<const double> row(std::size_t k) const { return values_.row(k); }
    double operator()(std::size_t k, std::size_t n) const { return values_(k, n); }
    const Matrix& matrix() const noexcept { return values_; }

    void set_row(std::size_t k, std::span<const double> values) {
        for (double x : values)
            if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("centroid entries must be finite and nonnegative");
        values_.set_row(k, values);
    }

    friend bool operator==(const CentroidMatrix&, const CentroidMatrix&) = default;

private:
    Matrix values_;
};

struct MemberEntry {
    std::size_t cluster = 0;
    double coefficient = 0.0;

    friend bool operator==(const MemberEntry&, const MemberEntry&) = default;
};

/// Sparse cluster membership matrix U: at most one positive coefficient per
/// row, so the columns of the dense U are pairwise orthogonal by construction.
class Membership {
public:
    Membership() = default;
    Membership(std::size_t rows, std::size_t clusters) : entries_(rows), clusters_(clusters) {}

    Membership(std::vector<std::optional<MemberEntry>> entries, std::size_t clusters)
        : entries_(std::move(entries)), clusters_(clusters) {
        for (const auto& e : entries_)
            if (e) check(*e);
    }

    std::size_t rows() const noexcept { return entries_.size(); }
    std::size_t clusters() const noexcept { return clusters_; }

    const std::optional<MemberEntry>& operator[](std::size_t m) const { return entries_.at(m); }

    void assign(std::size_t m, std::size_t cluster, double coefficient) {
        MemberEntry e{cluster, coefficient};
        check(e);
        entries_.at(m) = e;
    }
    void clear(std::size_t m) { entries_.at(m).reset(); }

    /// Same clusters for the same rows, ignoring coefficient values.
    bool same_pattern(const Membership& other) const {
        if (rows() != other.rows()) return false;
        for (std::size_t m = 0; m < rows(); ++m) {
            const auto& a = entries_[m];
            const auto& b = other.entries_[m];
            if (a.has_value() != b.has_value()) return false;
            if (a && a->cluster != b->cluster) return false;
        }
        return true;
    }

    friend bool operator==(const Membership&, const Membership&) = default;

private:
    void check(const MemberEntry& e) const {
        if (e.cluster >= clusters_) throw std::out_of_range("membership cluster index out of range");
        if (!(e.coefficient > 0.0) || !std::isfinite(e.coefficient))
            throw std::invalid_argument("membership coefficient must be finite and positive");
    }

    std::vector<std::optional<MemberEntry>> entries_;
    std::size_t clusters_ = 0;
};

struct RegularizationParams {
    double lambda_u = 0.0;
    double lambda_v = 0.0;
    double mu_u = 0.0;
    double mu_v = 0.0;

    void validate() const {
        for (double p : {lambda_u, lambda_v, mu_u, mu_v})
            if (!(p >= 0.0) || !std::isfinite(p))
                throw InputError("regularization parameters must be finite and nonnegative");
    }

    friend bool operator==(const RegularizationParams&, const RegularizationParams&) = default;
};

enum class Discrepancy { l1, l2 };

/// c1_free: any positive coefficient per row. normalized: unit-norm centroid
/// rows (weighted spherical K-means). binary: coefficients fixed at 1.
enum class ConstraintMode { c1_free, normalized, binary };

inline std::string to_string(Discrepancy d) { return d == Discrepancy::l1 ? "l1" : "l2"; }

inline std::string to_string(ConstraintMode c) {
    switch (c) {
        case ConstraintMode::c1_free: return "c1-free";
        case ConstraintMode::normalized: return "normalized";
        case ConstraintMode::binary: return "binary";
    }
    return "?";
}

/// Which ONMF model is solved. Validated on construction.
class ModelSpec {
public:
    ModelSpec() = default;

    ModelSpec(Discrepancy discrepancy, ConstraintMode mode, RegularizationParams reg = {})
        : discrepancy_(discrepancy), mode_(mode), reg_(reg) {
        reg_.validate();
        if (mode_ != ConstraintMode::c1_free && (reg_.lambda_u != 0.0 || reg_.mu_u != 0.0))
            throw InputError("binary and normalized modes fix the membership coefficients; lambda_u and mu_u must be 0");
        // The l1 normalized centroid step rescales U to keep UV fixed; that is
        // only objective-neutral when V carries no penalty.
        if (mode_ == ConstraintMode::normalized && discrepancy_ == Discrepancy::l1 &&
            (reg_.lambda_v != 0.0 || reg_.mu_v != 0.0))
            throw InputError("normalized mode with the l1 discrepancy requires lambda_v = mu_v = 0");
    }

    Discrepancy discrepancy() const noexcept { return discrepancy_; }
    ConstraintMode mode() const noexcept { return mode_; }
    const RegularizationParams& reg() const noexcept { return reg_; }

private:
    Discrepancy discrepancy_ = Discrepancy::l2;
    ConstraintMode mode_ = ConstraintMode::c1_free;
    RegularizationParams reg_{};
};

struct FactorizationResult {
    Membership membership;
    CentroidMatrix centroids;
    std::vector<double> objective_trace;
    std::size_t iterations = 0;
    bool converged = false;
    /// Rows whose coefficient thresholded to zero in the final assignment.
    std::vector<std::size_t> unassigned_rows;
    /// Reported cluster per row. Unassigned rows keep their last cluster under
    /// ZeroRowPolicy::keep_last_cluster and have no label under exclude.
    std::vector<std::optional<std::size_t>> labels;
    /// Distance of each row to its chosen centroid (squared for l2, plain for l1).
    std::vector<double> distances;
};

/// Dense M x K view of a sparse membership.
inline Matrix dense_u(const Membership& membership, std::size_t rows, std::size_t clusters) {
    if (membership.rows() != rows || membership.clusters() != clusters)
        throw std::invalid_argument("dense_u: membership shape does not match");
    Matrix u(rows, clusters);
    for (std::size_t m = 0; m < rows; ++m)
        if (const auto& e = membership[m]) u(m, e->cluster) = e->coefficient;
    return u;
}

/// F_i(U, V) = D_i(X, UV) + lambda_u |U|_1 + mu_u |U|_F^2 + lambda_v |V|_1 + mu_v |V|_F^2,
/// with D_1 the entrywise absolute sum and D_2 the squared Frobenius norm.
/// Rows without an entry are compared against zero.
inline double objective(const DataMatrix& x, const Membership& membership, const CentroidMatrix& v,
                        const ModelSpec& spec) {
    if (membership.rows() != x.rows() || membership.clusters() != v.rows() || v.cols() != x.cols())
        throw std::invalid_argument("objective: inconsistent shapes");
    const auto& reg = spec.reg();
    const bool l1 = spec.discrepancy() == Discrepancy::l1;

    double total = 0.0;
    for (std::size_t m = 0; m < x.rows(); ++m) {
        const auto xm = x.row(m);
        const auto& e = membership[m];
        double fit = 0.0;
        if (e) {
            const auto vk = v.row(e->cluster);
            for (std::size_t n = 0; n < xm.size(); ++n) {
                const double r = xm[n] - e->coefficient * vk[n];
                fit += l1 ? std::abs(r) : r * r;
            }
            fit += reg.lambda_u * e->coefficient + reg.mu_u * e->coefficient * e->coefficient;
        } else {
            fit = l1 ? vec::l1_norm(xm) : vec::squared_norm(xm);
        }
        total += fit;
    }
    if (reg.lambda_v != 0.0 || reg.mu_v != 0.0) {
        for (std::size_t k = 0; k < v.rows(); ++k) {
            const auto vk = v.row(k);
            total += reg.lambda_v * vec::l1_norm(vk) + reg.mu_v * vec::squared_norm(vk);
        }
    }
    return total;
}

}  // namespace onmf
