// Acceptance suite: each criterion prints one PASS/FAIL line with a short
// summary. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "onmf/brute_force.hpp"
#include "onmf/onmf.hpp"
#include "onmf/run.hpp"
#include "test_support.hpp"

using namespace onmf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

// ---------------------------------------------------------------------------
// 1. Scalar subproblems: closed forms against the brute-force oracle.

Outcome scalar_oracle() {
    constexpr int problems = 1000;
    constexpr double value_tol = 1e-8;
    constexpr double argmin_tol = 1e-6;

    Outcome out;
    props::Gen gen(1001);
    double worst_value = 0.0, worst_arg = 0.0;
    int argmin_checks = 0;

    for (auto kind : {ProxKind::quadratic, ProxKind::weighted_l1}) {
        for (int i = 0; i < problems; ++i) {
            ScalarProxProblem p;
            p.kind = kind;
            const std::size_t n = gen.size(1, 20);
            p.targets = gen.vector(n, 0.0, 10.0);
            p.weights = gen.vector(n, 0.0, 10.0);
            p.l1_weight = gen.uniform(0.0, 5.0);
            p.l2_weight = gen.uniform(0.0, 5.0);
            if (i % 10 == 0) p.l2_weight = 0.0;
            const auto oracle = brute_force_min(p, 1e-3);

            // The same scalar problem reached through both block updates: as a
            // centroid component (targets = data column, weights = memberships)
            // and as a membership coefficient (targets = data row, weights = centroid).
            Matrix column(n, 1);
            for (std::size_t r = 0; r < n; ++r) column(r, 0) = p.targets[r];
            double via_centroid, via_coefficient;
            if (kind == ProxKind::quadratic) {
                via_centroid = centroid_l2(column, p.weights, p.l1_weight, p.l2_weight)[0];
                via_coefficient = coefficient_l2(p.targets, p.weights, p.l1_weight, p.l2_weight);
            } else {
                via_centroid = centroid_l1(column, p.weights, p.l1_weight, p.l2_weight)[0];
                via_coefficient = coefficient_l1(p.targets, p.weights, p.l1_weight, p.l2_weight);
            }
            for (double t : {via_centroid, via_coefficient}) {
                const double gap = std::abs(static_cast<double>(p.evaluate(t)) - oracle.min_value);
                worst_value = std::max(worst_value, gap);
                if (gap > value_tol) out.fail("value gap " + std::to_string(gap) + " on problem " + std::to_string(i));
                if (p.l2_weight > 0.0) {
                    ++argmin_checks;
                    const double d = std::abs(t - oracle.argmin);
                    worst_arg = std::max(worst_arg, d);
                    if (d > argmin_tol) out.fail("argmin gap " + std::to_string(d) + " on problem " + std::to_string(i));
                }
            }
        }
    }
    if (out.pass) {
        std::ostringstream s;
        s << "2x" << problems << " problems, worst value gap " << worst_value << ", worst argmin gap " << worst_arg
          << " over " << argmin_checks << " unique-minimizer checks";
        out.detail = s.str();
    }
    return out;
}

// ---------------------------------------------------------------------------
// 2. Residual, closed and angle forms of the l2 distance agree.

Outcome distance_identities() {
    constexpr int instances = 1000;
    constexpr double tol = 1e-9;

    Outcome out;
    props::Gen gen(1002);
    int angle_checks = 0, zero_branch = 0;
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
        const std::size_t n = gen.size(1, 10);
        const auto x = gen.vector(n, 0.0, 10.0);
        const auto v = gen.vector(n, 0.0, 10.0);
        const double xv = vec::dot<double>(x, v);
        const double lambda = gen.uniform(0.0, 3.0 * xv);
        const double mu = i % 2 == 0 ? 0.0 : gen.uniform(0.0, 5.0);

        const double direct = distance_l2(x, v, lambda, mu);
        const double closed = distance_l2_closed_form(x, v, lambda, mu);
        worst = std::max(worst, std::abs(direct - closed));
        if (std::abs(direct - closed) > tol) out.fail("closed form off by " + std::to_string(direct - closed));
        if (lambda / 2.0 > xv) ++zero_branch;

        if (mu == 0.0 && lambda / 2.0 <= xv) {
            ++angle_checks;
            const double angle = distance_l2_angle_form(x, v, lambda);
            worst = std::max(worst, std::abs(closed - angle));
            if (std::abs(closed - angle) > tol) out.fail("angle form off by " + std::to_string(closed - angle));
        }
    }
    if (zero_branch == 0 || zero_branch == instances) out.fail("only one branch of the closed form was exercised");
    if (out.pass) {
        std::ostringstream s;
        s << instances << " instances (" << zero_branch << " thresholded), " << angle_checks
          << " angle-form checks, worst gap " << worst;
        out.detail = s.str();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Shared instance battery for the solver criteria.

struct Instance {
    DataMatrix x;
    std::size_t k;
    std::uint64_t seed;
};

Instance random_instance(props::Gen& gen) {
    const std::size_t rows = gen.size(6, 60);
    const std::size_t cols = gen.size(1, 8);
    const std::size_t centres = gen.size(1, 5);
    return {DataMatrix(gen.clustered(rows, cols, centres)), gen.size(1, 5), gen.size(0, 1u << 30)};
}

// ---------------------------------------------------------------------------
// 3. Every objective trace is non-increasing.

Outcome monotone_descent() {
    constexpr int fits_per_combo = 50;
    constexpr double tol = 1e-10;

    Outcome out;
    props::Gen gen(1003);
    int total = 0;
    std::size_t steps = 0;
    for (auto d : {Discrepancy::l1, Discrepancy::l2}) {
        for (auto mode : {ConstraintMode::c1_free, ConstraintMode::normalized, ConstraintMode::binary}) {
            int done = 0, attempts = 0;
            while (done < fits_per_combo && attempts < 10 * fits_per_combo) {
                ++attempts;
                RegularizationParams reg;
                if (mode == ConstraintMode::c1_free) {
                    reg = {gen.uniform(0, 5), gen.uniform(0, 2), gen.uniform(0, 2), gen.uniform(0, 2)};
                } else if (mode == ConstraintMode::binary) {
                    reg.lambda_v = gen.uniform(0, 2);
                    reg.mu_v = gen.uniform(0, 2);
                }
                const ModelSpec spec(d, mode, reg);
                auto inst = random_instance(gen);
                SolverConfig cfg{.k = inst.k, .seed = inst.seed,
                                 .init = gen.coin() ? InitMethod::random_rows : InitMethod::plusplus};
                FactorizationResult r;
                try {
                    r = fit(inst.x, spec, cfg);
                } catch (const DegeneracyError&) {
                    continue;
                } catch (const DuplicateRowsError&) {
                    continue;
                }
                ++done;
                for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
                    ++steps;
                    const double rise = r.objective_trace[i] - r.objective_trace[i - 1];
                    if (rise > tol) {
                        std::ostringstream s;
                        s << to_string(d) << "/" << to_string(mode) << " rose by " << rise << " at step " << i;
                        out.fail(s.str());
                    }
                }
            }
            total += done;
            if (done < fits_per_combo)
                out.fail(std::string("too many degenerate fits for ") + std::string(to_string(d)) + "/" +
                         std::string(to_string(mode)));
        }
    }
    if (out.pass) out.detail = std::to_string(total) + " fits over 6 combinations, " + std::to_string(steps) + " steps";
    return out;
}

// ---------------------------------------------------------------------------
// 4 and 5. Binary reductions reproduce Lloyd K-means and K-median.

using ReferenceFn = reference::ClusteringResult (*)(const Matrix&, std::size_t, const Matrix&, std::size_t);

Outcome binary_reduction(Discrepancy d, ReferenceFn oracle, std::uint64_t seed) {
    constexpr int instances = 50;
    constexpr double centroid_tol = 1e-9;

    Outcome out;
    props::Gen gen(seed);
    const ModelSpec spec(d, ConstraintMode::binary);
    std::size_t iterations = 0;
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
        auto inst = random_instance(gen);
        SolverConfig cfg{.k = inst.k, .tol = 0.0, .seed = inst.seed};
        CentroidMatrix start;
        try {
            start = init_centroids(inst.x, cfg, spec);
        } catch (const DuplicateRowsError&) {
            --i;
            continue;
        }

        std::vector<reference::Snapshot> history;
        const auto result = fit_from(inst.x, spec, cfg, start, [&](const IterationState& s) {
            reference::Snapshot snap;
            for (std::size_t m = 0; m < s.membership.rows(); ++m) snap.assignments.push_back(s.membership[m]->cluster);
            snap.centroids = s.centroids.matrix();
            history.push_back(std::move(snap));
        });
        const auto ref = oracle(inst.x.matrix(), inst.k, start.matrix(), cfg.max_iter);

        if (history.size() != ref.history.size()) {
            out.fail("instance " + std::to_string(i) + ": " + std::to_string(history.size()) + " vs " +
                     std::to_string(ref.history.size()) + " iterations");
            continue;
        }
        iterations += history.size();
        for (std::size_t it = 0; it < history.size(); ++it) {
            if (history[it].assignments != ref.history[it].assignments)
                out.fail("instance " + std::to_string(i) + ": assignments differ at iteration " + std::to_string(it + 1));
            const auto a = history[it].centroids.values();
            const auto b = ref.history[it].centroids.values();
            for (std::size_t j = 0; j < a.size(); ++j) {
                worst = std::max(worst, std::abs(a[j] - b[j]));
                if (std::abs(a[j] - b[j]) > centroid_tol)
                    out.fail("instance " + std::to_string(i) + ": centroids differ at iteration " +
                             std::to_string(it + 1));
            }
        }
        if (!result.converged) out.fail("instance " + std::to_string(i) + " did not converge");
    }
    if (out.pass) {
        std::ostringstream s;
        s << instances << " instances, " << iterations << " iterations compared, worst centroid gap " << worst;
        out.detail = s.str();
    }
    return out;
}

// ---------------------------------------------------------------------------
// 6. Normalized mode behaves like spherical K-means.

Outcome spherical_behavior() {
    constexpr int instances = 50;
    constexpr double norm_tol = 1e-12;

    Outcome out;
    props::Gen gen(1006);
    const ModelSpec spec(Discrepancy::l2, ConstraintMode::normalized);
    int checks = 0;
    for (int i = 0; i < instances; ++i) {
        auto inst = random_instance(gen);
        SolverConfig cfg{.k = inst.k, .seed = inst.seed};
        std::optional<CentroidMatrix> previous;
        FactorizationResult result;
        try {
            result = fit(inst.x, spec, cfg, [&](const IterationState& s) {
                for (std::size_t k = 0; k < s.centroids.rows(); ++k) {
                    const double norm = std::sqrt(vec::squared_norm(s.centroids.row(k)));
                    if (norm > 0.0 && std::abs(norm - 1.0) > norm_tol)
                        out.fail("centroid norm " + std::to_string(norm) + " at iteration " +
                                 std::to_string(s.iteration));
                }
                if (previous) {
                    // Assignments of this iteration were made against the previous centroids.
                    for (std::size_t m = 0; m < inst.x.rows(); ++m) {
                        const auto& e = s.membership[m];
                        if (!e) continue;
                        const auto xm = inst.x.row(m);
                        double best = 0.0;
                        for (std::size_t k = 0; k < previous->rows(); ++k)
                            best = std::max(best, vec::dot(xm, previous->row(k)));
                        const double chosen = vec::dot(xm, previous->row(e->cluster));
                        ++checks;
                        if (chosen < best - 1e-12 * std::max(1.0, best))
                            out.fail("row " + std::to_string(m) + " not assigned to max inner product");
                    }
                }
                previous = s.centroids;
            });
        } catch (const DuplicateRowsError&) {
            --i;
            continue;
        }
    }
    if (out.pass) out.detail = std::to_string(instances) + " fits, " + std::to_string(checks) + " argmax checks";
    return out;
}

// ---------------------------------------------------------------------------
// 7. A row with lambda_u / 2 > max_k <x, v_k> is thresholded out.

Outcome sparsity_thresholding() {
    Outcome out;
    // Row 2 has <x, v_k> = 5 against both seeds; lambda_u / 2 = 6 exceeds that
    // but stays below the 100 of rows 0 and 1.
    const DataMatrix x(Matrix{{10, 0}, {0, 10}, {0.5, 0.5}});
    const ModelSpec spec(Discrepancy::l2, ConstraintMode::c1_free, {.lambda_u = 12.0, .lambda_v = 1.0, .mu_v = 1.0});
    const SolverConfig cfg{.k = 2};
    const auto r = fit_from(x, spec, cfg, CentroidMatrix(Matrix{{10, 0}, {0, 10}}));

    const double expected = vec::squared_norm(x.row(2));
    for (std::size_t k = 0; k < r.centroids.rows(); ++k)
        if (!(spec.reg().lambda_u / 2.0 > vec::dot(x.row(2), r.centroids.row(k))))
            out.fail("constructed instance no longer satisfies the threshold condition");
    if (r.unassigned_rows != std::vector<std::size_t>{2}) out.fail("unassigned rows are not exactly {2}");
    if (std::abs(r.distances[2] - expected) > 1e-12) out.fail("distance " + std::to_string(r.distances[2]));
    if (r.membership[2].has_value()) out.fail("row 2 still has a coefficient");
    if (out.pass) {
        std::ostringstream s;
        s << "row 2 unassigned with distance " << r.distances[2] << " = |x|^2, rows 0-1 keep coefficients "
          << r.membership[0]->coefficient << ", " << r.membership[1]->coefficient;
        out.detail = s.str();
    }
    return out;
}

// ---------------------------------------------------------------------------
// 8. dist(x, x) > 0 once lambda_u > 0.

Outcome non_metric_witness() {
    Outcome out;
    const std::vector<double> x{1.0, 2.0};
    const double lambda_u = 1.0;
    // t* = 1 - 1/10, |x - t* x|^2 + lambda_u t* = 0.05 + 0.9
    const double d2 = distance_l2(x, x, lambda_u, 0.0);
    const double d1 = distance_l1(x, x, lambda_u, 0.0);
    const auto a = assign(x, CentroidMatrix(Matrix{{1.0, 2.0}}),
                          ModelSpec(Discrepancy::l2, ConstraintMode::c1_free, {.lambda_u = lambda_u}));
    if (!(d2 > 0.0) || std::abs(d2 - 0.95) > 1e-12) out.fail("l2 self-distance " + std::to_string(d2));
    if (!(d1 > 0.0)) out.fail("l1 self-distance " + std::to_string(d1));
    if (!(a.distance > 0.0)) out.fail("assign self-distance is zero");
    if (out.pass) {
        std::ostringstream s;
        s << "x = (1, 2), lambda_u = 1: l2 dist(x,x)^2 = " << d2 << ", l1 dist(x,x) = " << d1;
        out.detail = s.str();
    }
    return out;
}

// ---------------------------------------------------------------------------
// 9. CLI run on the toy data is byte-for-byte reproducible.

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome cli_determinism() {
    Outcome out;
    const fs::path work = fs::temp_directory_path() / "onmf_acceptance_cli";
    fs::remove_all(work);

    RunManifest m;
    m.input_path = fs::path(ONMF_TEST_DATA_DIR) / "toy.csv";
    m.spec = ModelSpec(Discrepancy::l2, ConstraintMode::binary);
    m.config.k = 2;
    m.config.seed = 7;
    for (const char* name : {"a", "b"}) {
        m.output_dir = work / name;
        if (run(m) != exit_ok) out.fail(std::string("run ") + name + " failed");
    }
    for (const char* f : {"assignments.csv", "centroids.csv", "trace.csv"}) {
        const auto a = slurp(work / "a" / f);
        if (a.empty() || a != slurp(work / "b" / f)) out.fail(std::string(f) + " differs between runs");
        if (a != slurp(fs::path(ONMF_GOLDEN_DIR) / f)) out.fail(std::string(f) + " differs from golden copy");
    }

    // The golden centroids are the Lloyd solution of the toy data.
    const auto c = io::load_csv(work / "a" / "centroids.csv");
    auto rows = std::vector<std::vector<double>>{{c(0, 0), c(0, 1)}, {c(1, 0), c(1, 1)}};
    std::sort(rows.begin(), rows.end());
    const auto lloyd = reference::lloyd_kmeans(io::load_csv(m.input_path).matrix(), 2, Matrix{{0, 0}, {10, 10}}, 300);
    if (rows != std::vector<std::vector<double>>{{lloyd.centroids(0, 0), lloyd.centroids(0, 1)},
                                                 {lloyd.centroids(1, 0), lloyd.centroids(1, 1)}})
        out.fail("centroids differ from the Lloyd reference");
    fs::remove_all(work);
    if (out.pass) out.detail = "two runs byte-identical and equal to golden assignments/centroids/trace";
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 scalar-oracle equivalence", scalar_oracle},
        {"2 distance identities", distance_identities},
        {"3 monotone descent", monotone_descent},
        {"4 classical K-means reduction",
         [] { return binary_reduction(Discrepancy::l2, reference::lloyd_kmeans, 1004); }},
        {"5 K-median reduction", [] { return binary_reduction(Discrepancy::l1, reference::kmedian, 1005); }},
        {"6 spherical behavior", spherical_behavior},
        {"7 sparsity thresholding", sparsity_thresholding},
        {"8 non-metric witness", non_metric_witness},
        {"9 CLI determinism and golden files", cli_determinism},
    };

    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << name << "] " << o.detail << '\n';
        failed += o.pass ? 0 : 1;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << '\n';
    return failed ? 1 : 0;
}
