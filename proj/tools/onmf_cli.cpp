// onmf: cluster a nonnegative CSV matrix with regularized orthogonal NMF.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "onmf/run.hpp"

int main(int argc, char** argv) {
    using namespace onmf;

    CLI::App app{"Regularized orthogonal NMF clustering (generalized K-means)"};

    std::string input;
    std::string output;
    Discrepancy discrepancy = Discrepancy::l2;
    ConstraintMode mode = ConstraintMode::c1_free;
    RegularizationParams reg;
    SolverConfig config;

    app.add_option("--input", input, "Input CSV, rows are samples")->required();
    app.add_option("--out", output, "Output directory")->required();
    app.add_option("--k", config.k, "Number of clusters")->capture_default_str();
    app.add_option("--discrepancy", discrepancy, "Data-fit term")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Discrepancy>{{"l1", Discrepancy::l1},
                                                                               {"l2", Discrepancy::l2}}))
        ->default_str("l2")
        ->option_text("{l1,l2} [l2]");
    app.add_option("--mode", mode, "Membership constraint")
        ->transform(CLI::CheckedTransformer(std::map<std::string, ConstraintMode>{
            {"c1-free", ConstraintMode::c1_free},
            {"normalized", ConstraintMode::normalized},
            {"binary", ConstraintMode::binary}}))
        ->default_str("c1-free")
        ->option_text("{c1-free,normalized,binary} [c1-free]");
    app.add_option("--lambda-u", reg.lambda_u, "l1 penalty on memberships")->capture_default_str();
    app.add_option("--lambda-v", reg.lambda_v, "l1 penalty on centroids")->capture_default_str();
    app.add_option("--mu-u", reg.mu_u, "Squared l2 penalty on memberships")->capture_default_str();
    app.add_option("--mu-v", reg.mu_v, "Squared l2 penalty on centroids")->capture_default_str();
    app.add_option("--seed", config.seed, "Random seed")->capture_default_str();
    app.add_option("--max-iter", config.max_iter, "Iteration limit")->capture_default_str();
    app.add_option("--tol", config.tol, "Relative objective decrease threshold")->capture_default_str();
    app.add_option("--init", config.init, "Centroid initialization")
        ->transform(CLI::CheckedTransformer(std::map<std::string, InitMethod>{
            {"random", InitMethod::random_rows}, {"plusplus", InitMethod::plusplus}}))
        ->default_str("random")
        ->option_text("{random,plusplus} [random]");
    app.add_option("--empty-cluster", config.empty_cluster_policy, "Empty cluster handling")
        ->transform(CLI::CheckedTransformer(std::map<std::string, EmptyClusterPolicy>{
            {"reseed", EmptyClusterPolicy::reseed_farthest}, {"keep", EmptyClusterPolicy::keep_previous}}))
        ->default_str("reseed")
        ->option_text("{reseed,keep} [reseed]");
    app.add_option("--zero-row", config.zero_row_policy, "Handling of rows thresholded to zero")
        ->transform(CLI::CheckedTransformer(std::map<std::string, ZeroRowPolicy>{
            {"keep", ZeroRowPolicy::keep_last_cluster}, {"exclude", ZeroRowPolicy::exclude}}))
        ->default_str("keep")
        ->option_text("{keep,exclude} [keep]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input_error;
    }

    RunManifest manifest;
    manifest.input_path = input;
    manifest.output_dir = output;
    manifest.config = config;
    try {
        manifest.spec = ModelSpec(discrepancy, mode, reg);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input_error;
    }
    return run(manifest);
}
