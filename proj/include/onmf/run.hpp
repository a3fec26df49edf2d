#pragma once

// One end-to-end clustering run: load CSV, fit, write results.
//
// Output directory layout:
//   assignments.csv  row_index,cluster,coefficient,distance,unassigned
//   centroids.csv    K rows x N columns, no header
//   trace.csv        iteration,objective
//   run.json         effective manifest plus convergence metadata

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "io.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace onmf {

enum ExitCode : int { exit_ok = 0, exit_input_error = 2, exit_degenerate = 3 };

struct RunManifest {
    static constexpr int current_format_version = 1;

    std::filesystem::path input_path;
    std::filesystem::path output_dir;
    ModelSpec spec;
    SolverConfig config;
    int format_version = current_format_version;
};

inline nlohmann::ordered_json manifest_json(const RunManifest& manifest) {
    const auto& reg = manifest.spec.reg();
    const auto& cfg = manifest.config;
    nlohmann::ordered_json j;
    j["format_version"] = manifest.format_version;
    j["input_path"] = manifest.input_path.string();
    j["output_dir"] = manifest.output_dir.string();
    j["spec"] = {
        {"discrepancy", to_string(manifest.spec.discrepancy())},
        {"mode", to_string(manifest.spec.mode())},
        {"lambda_u", reg.lambda_u},
        {"lambda_v", reg.lambda_v},
        {"mu_u", reg.mu_u},
        {"mu_v", reg.mu_v},
    };
    j["config"] = {
        {"k", cfg.k},
        {"max_iter", cfg.max_iter},
        {"tol", cfg.tol},
        {"seed", cfg.seed},
        {"init", to_string(cfg.init)},
        {"empty_cluster", to_string(cfg.empty_cluster_policy)},
        {"zero_row", to_string(cfg.zero_row_policy)},
    };
    return j;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const auto& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    writer(out);
    if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace detail

/// Executes the manifest and returns the process exit code:
/// 0 on success, 2 on input errors, 3 on solver degeneracy.
inline int run(const RunManifest& manifest, std::ostream& err = std::cerr) {
    try {
        if (manifest.format_version != RunManifest::current_format_version)
            throw InputError("unsupported manifest format_version " + std::to_string(manifest.format_version));

        const auto data = io::load_csv(manifest.input_path);
        manifest.config.validate(data.rows());

        const auto started = std::chrono::steady_clock::now();
        const auto result = fit(data, manifest.spec, manifest.config);
        const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - started;

        std::error_code ec;
        std::filesystem::create_directories(manifest.output_dir, ec);
        if (ec) throw InputError("cannot create output directory " + manifest.output_dir.string());

        const auto& dir = manifest.output_dir;
        detail::write_file(dir / "assignments.csv", [&](std::ostream& o) { io::write_assignments_csv(o, result); });
        detail::write_file(dir / "centroids.csv",
                           [&](std::ostream& o) { io::write_matrix_csv(o, result.centroids.matrix()); });
        detail::write_file(dir / "trace.csv", [&](std::ostream& o) { io::write_trace_csv(o, result.objective_trace); });

        auto j = manifest_json(manifest);
        j["result"] = {
            {"converged", result.converged},
            {"iterations", result.iterations},
            {"final_objective", result.objective_trace.empty() ? 0.0 : result.objective_trace.back()},
            {"unassigned_rows", result.unassigned_rows.size()},
            {"wall_time_seconds", wall.count()},
        };
        detail::write_file(dir / "run.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
        return exit_ok;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const DegeneracyError& e) {
        err << "solver degeneracy: " << e.what() << '\n';
        return exit_degenerate;
    }
}

}  // namespace onmf
