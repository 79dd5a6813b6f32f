#include "acl/config.hpp"

#include "acl/error.hpp"
#include "acl/fingerprint.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace acl {

using nlohmann::json;

namespace {

// Environment band-center spacing at N_e = 120 is sqrt(5) times the N_e = 600
// value, so desk couplings are the full-scale ones times sqrt(5), rounded.
const std::vector<double> kDeskCouplings = {0.0157, 0.0447, 0.224, 2.24};
const std::vector<double> kFullCouplings = {0.007, 0.02, 0.1, 1.0};

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::Config, "config: " + what); }

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* k : keys) known = known || key == k;
        if (!known) config_error("unknown key '" + where + key + "'");
    }
}

template <class T>
void read_into(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        config_error("bad value for '" + where + key + "': " + e.what());
    }
}

const json& object_at(const json& obj, const char* key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_object()) config_error("'" + where + key + "' must be an object");
    return v;
}

json scientific_json(const ExperimentConfig& c) {
    return json{
        {"model",
         {{"n_sys", c.model.n_sys},
          {"n_env", c.model.n_env},
          {"env_scale", c.model.env_scale},
          {"env_offset", c.model.env_offset},
          {"coupling_offset", c.model.coupling_offset},
          {"seed", c.model.seed}}},
        {"couplings", c.couplings},
        {"initial_conditions",
         {{"env_indices", c.env_indices}, {"target_energy", c.target_energy}, {"alpha_phase", c.alpha_phase}}},
        {"time_grid", {{"t_max", c.grid.t_max}, {"n_samples", c.grid.n_samples}}},
        {"late_fraction", c.late_fraction},
        {"bins", {{"environment", c.env_bins}, {"world", c.world_bins}}},
        {"phases", {{"seed", c.phase_seed}, {"runs", c.phase_runs}}},
        {"reference_coupling", c.reference_coupling},
        {"eigenstate_count", c.eigenstate_count},
        {"experiments", c.experiments},
    };
}

}  // namespace

void ExperimentConfig::validate() const {
    ModelParams probe = model;
    probe.coupling = couplings.empty() ? 0.0 : couplings.front();
    probe.validate();
    if (couplings.empty()) config_error("'couplings' must not be empty");
    for (double c : couplings) {
        if (!std::isfinite(c)) config_error("couplings must be finite");
    }
    if (env_indices.empty()) config_error("'initial_conditions.env_indices' must not be empty");
    for (std::size_t i : env_indices) {
        if (i >= model.n_env) {
            config_error("environment index " + std::to_string(i) + " out of range for n_env = " +
                         std::to_string(model.n_env));
        }
    }
    if (!std::isfinite(target_energy)) config_error("'target_energy' must be finite");
    if (!std::isfinite(alpha_phase)) config_error("'alpha_phase' must be finite");
    if (!(grid.t_max >= 0.0) || !std::isfinite(grid.t_max)) config_error("'time_grid.t_max' must be >= 0");
    if (grid.n_samples < 2) config_error("'time_grid.n_samples' must be >= 2");
    if (!(late_fraction > 0.0 && late_fraction <= 1.0)) config_error("'late_fraction' must lie in (0, 1]");
    if (env_bins == 0 || world_bins == 0) config_error("bin counts must be positive");
    if (phase_runs == 0) config_error("'phases.runs' must be positive");
    if (eigenstate_count == 0) config_error("'eigenstate_count' must be positive");
    bool has_reference = false;
    for (double c : couplings) has_reference = has_reference || c == reference_coupling;
    if (!has_reference) config_error("'reference_coupling' must be one of 'couplings'");
    for (const auto& e : experiments) {
        if (!kExperiments.contains(e)) config_error("unknown experiment '" + e + "'");
    }
}

ModelParams ExperimentConfig::params_for(double coupling) const {
    ModelParams p = model;
    p.coupling = coupling;
    return p;
}

std::vector<InitialConditionSpec> ExperimentConfig::initial_conditions() const {
    std::vector<InitialConditionSpec> out;
    for (std::size_t i : env_indices) out.push_back({i, target_energy, alpha_phase});
    return out;
}

ExperimentConfig preset(Preset p) {
    ExperimentConfig c;
    c.experiments = kExperiments;
    if (p == Preset::Full) {
        c.model.n_sys = 30;
        c.model.n_env = 600;
        c.couplings = kFullCouplings;
        c.env_indices = {300, 400, 450, 500, 550};
        c.target_energy = 25.0;
        c.reference_coupling = 0.1;
    } else {
        c.model.n_sys = 10;
        c.model.n_env = 120;
        c.couplings = kDeskCouplings;
        c.env_indices = {60, 80, 90, 100, 110};
        c.target_energy = 8.0;
        c.reference_coupling = 0.224;
    }
    return c;
}

std::string to_json_text(const ExperimentConfig& config) {
    json j = scientific_json(config);
    j["output_dir"] = config.output_dir.string();
    j["cache_dir"] = config.cache_dir.string();
    j["memory_cap_bytes"] = config.memory_cap_bytes;
    return j.dump(2) + "\n";
}

ExperimentConfig from_json_text(const std::string& text, const ExperimentConfig& base) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        config_error(std::string("parse error: ") + e.what());
    }
    if (!j.is_object()) config_error("top level must be an object");
    reject_unknown(j,
                   {"model", "couplings", "initial_conditions", "time_grid", "late_fraction", "bins", "phases",
                    "reference_coupling", "eigenstate_count", "experiments", "output_dir", "cache_dir",
                    "memory_cap_bytes"},
                   "");

    ExperimentConfig c = base;
    if (j.contains("model")) {
        const json& m = object_at(j, "model", "");
        reject_unknown(m, {"n_sys", "n_env", "env_scale", "env_offset", "coupling_offset", "seed"}, "model.");
        read_into(m, "n_sys", c.model.n_sys, "model.");
        read_into(m, "n_env", c.model.n_env, "model.");
        read_into(m, "env_scale", c.model.env_scale, "model.");
        read_into(m, "env_offset", c.model.env_offset, "model.");
        read_into(m, "coupling_offset", c.model.coupling_offset, "model.");
        read_into(m, "seed", c.model.seed, "model.");
    }
    read_into(j, "couplings", c.couplings, "");
    if (j.contains("initial_conditions")) {
        const json& ic = object_at(j, "initial_conditions", "");
        reject_unknown(ic, {"env_indices", "target_energy", "alpha_phase"}, "initial_conditions.");
        read_into(ic, "env_indices", c.env_indices, "initial_conditions.");
        read_into(ic, "target_energy", c.target_energy, "initial_conditions.");
        read_into(ic, "alpha_phase", c.alpha_phase, "initial_conditions.");
    }
    if (j.contains("time_grid")) {
        const json& g = object_at(j, "time_grid", "");
        reject_unknown(g, {"t_max", "n_samples"}, "time_grid.");
        read_into(g, "t_max", c.grid.t_max, "time_grid.");
        read_into(g, "n_samples", c.grid.n_samples, "time_grid.");
    }
    read_into(j, "late_fraction", c.late_fraction, "");
    if (j.contains("bins")) {
        const json& b = object_at(j, "bins", "");
        reject_unknown(b, {"environment", "world"}, "bins.");
        read_into(b, "environment", c.env_bins, "bins.");
        read_into(b, "world", c.world_bins, "bins.");
    }
    if (j.contains("phases")) {
        const json& p = object_at(j, "phases", "");
        reject_unknown(p, {"seed", "runs"}, "phases.");
        read_into(p, "seed", c.phase_seed, "phases.");
        read_into(p, "runs", c.phase_runs, "phases.");
    }
    read_into(j, "reference_coupling", c.reference_coupling, "");
    read_into(j, "eigenstate_count", c.eigenstate_count, "");
    read_into(j, "experiments", c.experiments, "");
    std::string path;
    if (j.contains("output_dir")) {
        read_into(j, "output_dir", path, "");
        c.output_dir = path;
    }
    if (j.contains("cache_dir")) {
        read_into(j, "cache_dir", path, "");
        c.cache_dir = path;
    }
    read_into(j, "memory_cap_bytes", c.memory_cap_bytes, "");
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base) {
    std::ifstream in(path);
    if (!in) config_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), base);
}

std::string config_hash(const ExperimentConfig& config) { return to_hex(sha256(scientific_json(config).dump())); }

std::string coupling_label(double coupling) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, coupling);
    std::string s(buf, res.ptr);
    for (char& ch : s) {
        if (ch == '+') ch = 'p';
    }
    return s;
}

}  // namespace acl
