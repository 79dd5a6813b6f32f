#pragma once

#include "acl/experiments.hpp"
#include "acl/hamiltonian.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace acl {

enum class Preset { Desk, Full };

struct ExperimentConfig {
    ModelParams model;  // `coupling` is ignored; one run per entry of `couplings`
    std::vector<double> couplings;
    std::vector<std::size_t> env_indices;
    double target_energy = 25.0;
    double alpha_phase = 0.0;
    TimeGrid grid;
    double late_fraction = kDefaultLateFraction;
    std::size_t env_bins = kDefaultBins;
    std::size_t world_bins = kDefaultBins;
    std::uint64_t phase_seed = 1;
    std::size_t phase_runs = 1;
    double reference_coupling = 0.1;
    std::size_t eigenstate_count = 10;  // evenly spread eigenstates in the broad scan
    std::filesystem::path output_dir = "acl_output";
    std::filesystem::path cache_dir = "acl_cache";
    std::size_t memory_cap_bytes = 0;  // 0: physical memory
    std::set<std::string> experiments;

    void validate() const;
    bool selected(const std::string& experiment) const { return experiments.contains(experiment); }
    ModelParams params_for(double coupling) const;
    std::vector<InitialConditionSpec> initial_conditions() const;
};

// Every experiment the evolve and distributions commands know about.
inline const std::set<std::string> kExperiments = {"timeseries", "randomized", "distributions", "eigenstates"};

ExperimentConfig preset(Preset p);

// Text form (JSON). Keys absent from the document keep the value of `base`;
// unknown keys are rejected.
std::string to_json_text(const ExperimentConfig& config);
ExperimentConfig from_json_text(const std::string& text, const ExperimentConfig& base);
ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base);

// SHA-256 hex of the scientific content (paths and the memory cap excluded).
std::string config_hash(const ExperimentConfig& config);

// Short, filesystem-safe label for a coupling value ("0.0447", "2.24", "0").
std::string coupling_label(double coupling);

}  // namespace acl
