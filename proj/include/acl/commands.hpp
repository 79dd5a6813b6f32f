#pragma once

#include "acl/config.hpp"
#include "acl/experiments.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace acl {

struct RunOptions {
    bool build_missing = false;  // evolve/distributions: build absent caches instead of failing
    std::ostream* log = nullptr;  // progress and summaries; nullptr silences
};

std::filesystem::path cache_path(const ExperimentConfig& config, double coupling);

// Output file naming; `c` is coupling_label(E_I), `k` the environment index.
//   ei{c}_ic{k}_timeseries.csv, ei{c}_ic{k}_randomized{j}_timeseries.csv, ei{c}_ic{k}_stats.json
//   dist_{s,e,w,wb}_ei{c}_ic{k}_{initial,late}.csv   (e and wb binned)
//   dist_{s,e}_ei{c}_ic{k}_eig{i}.csv, ei{c}_ic{k}_distributions.json
//   dist_{s,e}_ei{c}_eig{i}.csv, ei{c}_eigenstates.json
//   deff_table.csv, thermalization_report.json, eth_report.json
std::string run_stem(double coupling, std::size_t env_index);

std::size_t physical_memory_bytes();
std::size_t memory_cap(const ExperimentConfig& config);
std::size_t build_memory_estimate(const ExperimentConfig& config);
std::size_t evolve_memory_estimate(const ExperimentConfig& config);

// Cached model when present; otherwise builds it (and writes the cache) if
// `build_missing`, else throws ErrorKind::Dependency.
Model load_model(const ExperimentConfig& config, double coupling, const RunOptions& options);

void write_resolved_config(const ExperimentConfig& config);

void cmd_build(const ExperimentConfig& config, const RunOptions& options);
void cmd_evolve(const ExperimentConfig& config, const RunOptions& options);
void cmd_distributions(const ExperimentConfig& config, const RunOptions& options);
// Reads only files written by evolve and distributions.
void cmd_report(const ExperimentConfig& config, const RunOptions& options);

}  // namespace acl
