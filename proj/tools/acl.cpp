// acl: build, evolve, distributions, report.
#include "acl/commands.hpp"
#include "acl/config.hpp"
#include "acl/error.hpp"
#include "acl/kernels.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct GlobalOptions {
    std::string config_path;
    std::string output_dir;
    std::string cache_dir;
    int threads = 0;
    bool desk = false;
    bool full = false;
    bool build_missing = false;
};

acl::ExperimentConfig resolve(const GlobalOptions& g) {
    acl::ExperimentConfig config = acl::preset(g.full ? acl::Preset::Full : acl::Preset::Desk);
    if (!g.config_path.empty()) config = acl::load_config(g.config_path, config);
    if (const char* env = std::getenv("ACL_OUTPUT_DIR"); env != nullptr && *env != '\0') config.output_dir = env;
    if (const char* env = std::getenv("ACL_CACHE_DIR"); env != nullptr && *env != '\0') config.cache_dir = env;
    if (!g.output_dir.empty()) config.output_dir = g.output_dir;
    if (!g.cache_dir.empty()) config.cache_dir = g.cache_dir;
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adapted Caldeira-Leggett model: exact diagonalization and equilibration studies"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("--config", g.config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
    app.add_option("--output-dir", g.output_dir, "Output directory (overrides ACL_OUTPUT_DIR)");
    app.add_option("--cache-dir", g.cache_dir, "Decomposition cache directory (overrides ACL_CACHE_DIR)");
    app.add_option("--threads", g.threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
    auto* desk = app.add_flag("--desk-scale", g.desk, "Reduced-dimension preset (N_s=10, N_e=120); the default");
    auto* full = app.add_flag("--full-scale", g.full, "Full dimensions (N_s=30, N_e=600)");
    desk->excludes(full);

    auto* build = app.add_subcommand("build", "Assemble and decompose H_w for every coupling; write caches");
    auto* evolve = app.add_subcommand("evolve", "Time series per coupling and initial condition");
    auto* dists = app.add_subcommand("distributions", "Energy distributions and eigenstate scans");
    auto* report = app.add_subcommand("report", "d_eff table, thermalization and ETH reports");
    evolve->add_flag("--build-missing", g.build_missing, "Build absent decompositions instead of failing");
    dists->add_flag("--build-missing", g.build_missing, "Build absent decompositions instead of failing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : acl::exit_code(acl::ErrorKind::Config);
    }

    try {
        if (g.threads > 0) acl::kernels::set_thread_count(g.threads);
        const acl::ExperimentConfig config = resolve(g);
        const acl::RunOptions options{g.build_missing, &std::cerr};
        std::cerr << "config_hash=" << acl::config_hash(config) << '\n';
        if (build->parsed()) acl::cmd_build(config, options);
        if (evolve->parsed()) acl::cmd_evolve(config, options);
        if (dists->parsed()) acl::cmd_distributions(config, options);
        if (report->parsed()) acl::cmd_report(config, options);
    } catch (const acl::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return acl::exit_code(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return acl::exit_code(acl::ErrorKind::Resource);
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory\n";
        return acl::exit_code(acl::ErrorKind::Resource);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return acl::exit_code(acl::ErrorKind::Numerical);
    }
    return 0;
}
