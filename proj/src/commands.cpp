#include "acl/commands.hpp"

#include "acl/error.hpp"
#include "acl/io.hpp"
#include "acl/spectral.hpp"

#include <json.hpp>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace acl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void log_line(const RunOptions& o, const std::string& line) {
    if (o.log != nullptr) *o.log << line << '\n' << std::flush;
}

double gib(std::size_t bytes) { return static_cast<double>(bytes) / (1024.0 * 1024.0 * 1024.0); }

std::string bytes_text(std::size_t bytes) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu bytes (%.3f GiB)", bytes, gib(bytes));
    return buf;
}

void check_memory(const ExperimentConfig& config, std::size_t estimate, const char* what, const RunOptions& o) {
    const std::size_t cap = memory_cap(config);
    log_line(o, std::string(what) + ": memory estimate " + bytes_text(estimate) + ", cap " + bytes_text(cap));
    if (estimate > cap) {
        throw Error(ErrorKind::Resource, std::string(what) + ": estimated " + bytes_text(estimate) +
                                             " exceeds the memory cap of " + bytes_text(cap));
    }
}

json stats_json(const ObservableStats& s) {
    return {{"mean", s.mean}, {"stddev", s.stddev}, {"std_error", s.std_error}};
}

json record_json(const TimeSeriesRecord& r) {
    return {{"t", r.time}, {"entropy", r.entropy}, {"E_s", r.e_sys}, {"E_e", r.e_env}, {"E_int", r.e_int}};
}

json equilibrium_json(const EquilibriumStats& s) {
    return {{"late_window", {{"t_start", s.t_start}, {"t_end", s.t_end}, {"n_samples", s.n_samples}}},
            {"entropy", stats_json(s.entropy)},
            {"E_s", stats_json(s.e_sys)},
            {"E_e", stats_json(s.e_env)},
            {"E_int", stats_json(s.e_int)}};
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path, const std::string& expected_hash) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, path.string() + ": " + e.what());
    }
    if (j.value("config_hash", std::string{}) != expected_hash) {
        throw Error(ErrorKind::Dependency, path.string() + " was produced by a different configuration");
    }
    return j;
}

EnergyDistribution read_checked(const fs::path& path, const std::string& expected_hash) {
    DistributionFile f = read_distribution(path);
    if (f.config_hash != expected_hash) {
        throw Error(ErrorKind::Dependency, path.string() + " was produced by a different configuration");
    }
    return std::move(f.distribution);
}

EnergyDistribution average_window(const RealVector& levels, const std::vector<TrajectorySample>& samples,
                                  std::size_t begin, bool system) {
    RealVector acc = RealVector::Zero(levels.size());
    for (std::size_t k = begin; k < samples.size(); ++k) acc += system ? samples[k].p_sys : samples[k].p_env;
    return distribution_on_grid(levels, acc / static_cast<double>(samples.size() - begin));
}

std::string dist_name(const char* kind, const std::string& stem, const std::string& tail) {
    return std::string("dist_") + kind + "_" + stem + "_" + tail + ".csv";
}

}  // namespace

fs::path cache_path(const ExperimentConfig& config, double coupling) {
    return config.cache_dir / ("hw_" + to_hex(config.params_for(coupling).fingerprint()) + ".aclw");
}

std::string run_stem(double coupling, std::size_t env_index) {
    return "ei" + coupling_label(coupling) + "_ic" + std::to_string(env_index);
}

std::size_t physical_memory_bytes() {
    const long pages = sysconf(_SC_PHYS_PAGES);
    const long page = sysconf(_SC_PAGESIZE);
    if (pages <= 0 || page <= 0) return static_cast<std::size_t>(-1);
    return static_cast<std::size_t>(pages) * static_cast<std::size_t>(page);
}

std::size_t memory_cap(const ExperimentConfig& config) {
    return config.memory_cap_bytes > 0 ? config.memory_cap_bytes : physical_memory_bytes();
}

std::size_t build_memory_estimate(const ExperimentConfig& config) {
    return decomposition_bytes(config.model.world_dim());
}

std::size_t evolve_memory_estimate(const ExperimentConfig& config) {
    const std::size_t n = config.model.world_dim();
    // eigenvectors + two 64-column sample batches + per-sample distributions
    return dense_matrix_bytes(n) + 2 * 64 * n * sizeof(cplx) +
           config.grid.n_samples * (config.model.n_sys + config.model.n_env) * sizeof(double);
}

Model load_model(const ExperimentConfig& config, double coupling, const RunOptions& options) {
    const ModelParams params = config.params_for(coupling);
    const fs::path path = cache_path(config, coupling);
    if (fs::exists(path)) {
        const Fingerprint fp = params.fingerprint();
        log_line(options, "E_I=" + coupling_label(coupling) + ": reading " + path.string());
        return make_model(params, read_cache(path, &fp));
    }
    if (!options.build_missing) {
        throw Error(ErrorKind::Dependency, "no cached decomposition for E_I=" + coupling_label(coupling) + " at " +
                                               path.string() + " (run 'build' or pass --build-missing)");
    }
    check_memory(config, build_memory_estimate(config), "build", options);
    Model model = build_model(params);
    write_cache(path, model.world);
    log_line(options, "E_I=" + coupling_label(coupling) + ": wrote " + path.string());
    return model;
}

void write_resolved_config(const ExperimentConfig& config) {
    write_text_file(config.output_dir / "resolved_config.json", to_json_text(config));
}

void cmd_build(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    check_memory(config, build_memory_estimate(config), "build", options);
    write_resolved_config(config);
    for (const double c : config.couplings) {
        const ModelParams params = config.params_for(c);
        const ModelTerms terms = build_terms(params);
        const SpectralDecomposition d = decompose_world(terms, params.fingerprint());
        const DecompositionQuality q = spot_check(terms, d);
        const fs::path path = cache_path(config, c);
        write_cache(path, d);
        char buf[256];
        std::snprintf(buf, sizeof buf, "E_I=%s: N_w=%zu eigenvalues in [%.6f, %.6f]; residual %.3e, orthogonality %.3e",
                      coupling_label(c).c_str(), d.dim(), d.eigenvalues(0), d.eigenvalues(d.eigenvalues.size() - 1),
                      q.max_residual, q.max_orthogonality);
        log_line(options, buf);
        log_line(options, "  wrote " + path.string());
    }
}

void cmd_evolve(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    check_memory(config, evolve_memory_estimate(config), "evolve", options);
    write_resolved_config(config);
    const std::string hash = config_hash(config);
    for (const double c : config.couplings) {
        const Model model = load_model(config, c, options);
        const TimeGrid grid = resolve_grid(config.grid, model.world);
        for (const auto& ic : config.initial_conditions()) {
            const std::string stem = run_stem(c, ic.env_index);
            const PreparedState prep = prepare_initial_state(model, ic);
            const DiagonalEnergies diag = diagonal_energies(model, prep.eigen);
            const auto records = run_equilibration(model, prep.eigen, grid);
            const EquilibriumStats stats = equilibrium_stats(records, config.late_fraction, diag.e_sys);
            if (config.selected("timeseries")) {
                write_timeseries(config.output_dir / (stem + "_timeseries.csv"), hash, records);
            }

            json side = equilibrium_json(stats);
            side["config_hash"] = hash;
            side["coupling"] = c;
            side["env_index"] = ic.env_index;
            side["alpha"] = {prep.tuning.alpha.real(), prep.tuning.alpha.imag()};
            side["achieved_energy"] = prep.tuning.achieved_energy;
            side["top_level_weight"] = prep.tuning.top_level_weight;
            side["leakage_warning"] = prep.tuning.leakage_warning;
            side["time_grid"] = {{"t_max", grid.t_max}, {"n_samples", grid.n_samples}};
            side["initial"] = record_json(records.front());
            side["diagonal"] = {{"E_s", diag.e_sys}, {"E_e", diag.e_env}, {"E_int", diag.e_int}, {"E_w", diag.e_world}};
            side["dephasing_gap"] = stats.dephasing_gap;
            side["effective_dimension"] = effective_dimension(world_energy_distribution(prep.eigen, model.world));

            json randomized = json::array();
            if (config.selected("randomized")) {
                for (std::size_t j = 0; j < config.phase_runs; ++j) {
                    const std::uint64_t seed = config.phase_seed + j;
                    const auto rec = run_equilibration(model, randomize_phases(prep.eigen, seed), grid);
                    const EquilibriumStats rs = equilibrium_stats(rec, config.late_fraction, diag.e_sys);
                    if (config.selected("timeseries")) {
                        write_timeseries(config.output_dir / (stem + "_randomized" + std::to_string(j) + "_timeseries.csv"),
                                         hash, rec);
                    }
                    auto ratio = [](const ObservableStats& a, const ObservableStats& b) {
                        return PairGap{std::abs(a.mean - b.mean), std::hypot(a.std_error, b.std_error)}.ratio();
                    };
                    json r = equilibrium_json(rs);
                    r["phase_seed"] = seed;
                    r["initial"] = record_json(rec.front());
                    r["gap_over_se"] = {{"entropy", ratio(stats.entropy, rs.entropy)},
                                        {"E_s", ratio(stats.e_sys, rs.e_sys)},
                                        {"E_e", ratio(stats.e_env, rs.e_env)}};
                    randomized.push_back(std::move(r));
                }
            }
            side["randomized"] = std::move(randomized);
            write_json(config.output_dir / (stem + "_stats.json"), side);

            char buf[256];
            std::snprintf(buf, sizeof buf, "%s: alpha=%.6f%s, late <H_s>=%.6f +- %.2e (diagonal %.6f)", stem.c_str(),
                          std::abs(prep.tuning.alpha), prep.tuning.leakage_warning ? " [truncation leakage]" : "",
                          stats.e_sys.mean, stats.e_sys.std_error, diag.e_sys);
            log_line(options, buf);
        }
    }
}

void cmd_distributions(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    check_memory(config, evolve_memory_estimate(config), "distributions", options);
    write_resolved_config(config);
    const std::string hash = config_hash(config);
    const fs::path out = config.output_dir;
    for (const double c : config.couplings) {
        const Model model = load_model(config, c, options);
        const std::vector<double> times = resolve_grid(config.grid, model.world).times();
        const std::size_t begin = late_window_begin(times.size(), config.late_fraction);
        const RealVector& sys_levels = model.system_spectrum.eigenvalues;
        const RealVector& env_levels = model.environment_spectrum.eigenvalues;

        if (config.selected("distributions")) {
            for (const auto& ic : config.initial_conditions()) {
                const std::string stem = run_stem(c, ic.env_index);
                const PreparedState prep = prepare_initial_state(model, ic);
                const auto samples = observe_trajectory(model, prep.eigen, times, {.distributions = true});
                const EnergyDistribution p_w = world_energy_distribution(prep.eigen, model.world);
                const EnergyDistribution p_wb = bin_distribution(p_w, config.world_bins);
                const EnergyDistribution late_s = average_window(sys_levels, samples, begin, true);
                const EnergyDistribution late_e =
                    bin_distribution(average_window(env_levels, samples, begin, false), config.env_bins);

                write_distribution(out / dist_name("s", stem, "initial"), hash,
                                   distribution_on_grid(sys_levels, samples.front().p_sys));
                write_distribution(out / dist_name("e", stem, "initial"), hash,
                                   bin_distribution(distribution_on_grid(env_levels, samples.front().p_env),
                                                    config.env_bins));
                write_distribution(out / dist_name("s", stem, "late"), hash, late_s);
                write_distribution(out / dist_name("e", stem, "late"), hash, late_e);
                for (const char* epoch : {"initial", "late"}) {
                    write_distribution(out / dist_name("w", stem, epoch), hash, p_w);
                    write_distribution(out / dist_name("wb", stem, epoch), hash, p_wb);
                }

                Eigen::Index peak = 0;
                prep.eigen.amplitudes.cwiseAbs2().maxCoeff(&peak);
                const auto selected = adjacent_triple(model.world.dim(), static_cast<std::size_t>(peak));
                for (const auto& prof : eigenstate_scan(model, selected, config.env_bins)) {
                    const std::string tail = "eig" + std::to_string(prof.index);
                    write_distribution(out / dist_name("s", stem, tail), hash, prof.p_sys);
                    write_distribution(out / dist_name("e", stem, tail), hash, prof.p_env);
                }
                write_json(out / (stem + "_distributions.json"),
                           {{"config_hash", hash},
                            {"coupling", c},
                            {"env_index", ic.env_index},
                            {"peak_index", static_cast<std::size_t>(peak)},
                            {"selected", selected},
                            {"effective_dimension", effective_dimension(p_w)}});
                log_line(options, stem + ": distributions written (peak eigenstate " + std::to_string(peak) + ")");
            }
        }

        if (config.selected("eigenstates")) {
            const std::string stem = "ei" + coupling_label(c);
            const auto indices = spread_selection(model.world.dim(), config.eigenstate_count);
            std::vector<double> energies;
            for (const auto& prof : eigenstate_scan(model, indices, config.env_bins)) {
                const std::string tail = "eig" + std::to_string(prof.index);
                write_distribution(out / dist_name("s", stem, tail), hash, prof.p_sys);
                write_distribution(out / dist_name("e", stem, tail), hash, prof.p_env);
                energies.push_back(prof.energy);
            }
            const double adj = model.world.dim() >= 8 ? mean_adjacent_tv_sys_mid(model) : 0.0;
            write_json(out / (stem + "_eigenstates.json"), {{"config_hash", hash},
                                                             {"coupling", c},
                                                             {"indices", indices},
                                                             {"energies", energies},
                                                             {"mean_adjacent_tv_sys_mid", adj}});
            log_line(options, stem + ": eigenstate scan written");
        }
    }
}

void cmd_report(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    const std::string hash = config_hash(config);
    const fs::path dir = config.output_dir;

    std::vector<DeffInput> deff_inputs;
    json thermal = json::array();
    json eth = json::array();
    for (const double c : config.couplings) {
        std::vector<double> late_means, initial_values, fluctuations, deffs;
        std::vector<EnergyDistribution> late_s, late_e;
        json per_ic = json::array();
        json eth_states = json::array();
        std::vector<EnergyDistribution> eig_s, eig_e;
        double tv_s = 0.0, tv_e = 0.0;
        std::size_t tv_count = 0;

        for (const std::size_t k : config.env_indices) {
            const std::string stem = run_stem(c, k);
            const json stats = read_json(dir / (stem + "_stats.json"), hash);
            late_means.push_back(stats.at("E_s").at("mean").get<double>());
            fluctuations.push_back(stats.at("E_s").at("stddev").get<double>());
            initial_values.push_back(stats.at("initial").at("E_s").get<double>());
            deffs.push_back(stats.at("effective_dimension").get<double>());
            per_ic.push_back({{"env_index", k},
                              {"initial_E_s", initial_values.back()},
                              {"late_E_s", stats.at("E_s")},
                              {"late_E_e", stats.at("E_e")},
                              {"late_entropy", stats.at("entropy")}});

            late_s.push_back(read_checked(dir / dist_name("s", stem, "late"), hash));
            late_e.push_back(read_checked(dir / dist_name("e", stem, "late"), hash));

            const json dist = read_json(dir / (stem + "_distributions.json"), hash);
            json state = {{"env_index", k}, {"peak_index", dist.at("peak_index")}, {"selected", dist.at("selected")}};
            json d_s = json::array(), d_e = json::array();
            for (const std::size_t idx : dist.at("selected").get<std::vector<std::size_t>>()) {
                const std::string tail = "eig" + std::to_string(idx);
                eig_s.push_back(read_checked(dir / dist_name("s", stem, tail), hash));
                eig_e.push_back(read_checked(dir / dist_name("e", stem, tail), hash));
                d_s.push_back(total_variation(eig_s.back(), late_s.back()));
                d_e.push_back(total_variation(eig_e.back(), late_e.back()));
                tv_s += d_s.back().get<double>();
                tv_e += d_e.back().get<double>();
                ++tv_count;
            }
            state["tv_sys_to_late"] = std::move(d_s);
            state["tv_env_to_late"] = std::move(d_e);
            eth_states.push_back(std::move(state));
        }

        const double sigma = spread(late_means);
        const double fluct = std::accumulate(fluctuations.begin(), fluctuations.end(), 0.0) /
                             static_cast<double>(fluctuations.size());
        const ThermalizationVerdict verdict = classify(sigma, fluct);
        thermal.push_back({{"E_I", c},
                           {"sigma_ic", sigma},
                           {"initial_spread", spread(initial_values)},
                           {"fluctuation_scale", fluct},
                           {"sigma_over_fluctuation", fluct > 0.0 ? sigma / fluct : (sigma > 0.0 ? 1e300 : 0.0)},
                           {"verdict", to_string(verdict)},
                           {"mean_tv_sys", mean_pairwise_tv(late_s)},
                           {"mean_tv_env", mean_pairwise_tv(late_e)},
                           {"initial_conditions", std::move(per_ic)}});
        eth.push_back({{"E_I", c},
                       {"mean_tv_sys_to_late", tv_count ? tv_s / static_cast<double>(tv_count) : 0.0},
                       {"mean_tv_env_to_late", tv_count ? tv_e / static_cast<double>(tv_count) : 0.0},
                       {"eigenstate_scatter_sys", mean_pairwise_tv(eig_s)},
                       {"eigenstate_scatter_env", mean_pairwise_tv(eig_e)},
                       {"late_scatter_sys", mean_pairwise_tv(late_s)},
                       {"late_scatter_env", mean_pairwise_tv(late_e)},
                       {"states", std::move(eth_states)}});
        deff_inputs.push_back({c, deffs});
        log_line(options, "E_I=" + coupling_label(c) + ": sigma_IC=" + format_double(sigma) +
                              ", fluctuation=" + format_double(fluct) + " -> " + to_string(verdict));
    }

    const auto rows = deff_table(deff_inputs, config.model.world_dim(), config.reference_coupling);
    write_deff_table(dir / "deff_table.csv", hash, rows);
    write_json(dir / "thermalization_report.json",
               {{"config_hash", hash},
                {"definitions",
                 {{"sigma_ic", "population standard deviation across initial conditions of the late-window mean of <H_s>"},
                  {"initial_spread", "population standard deviation across initial conditions of <H_s> at t = 0"},
                  {"fluctuation_scale", "mean over initial conditions of the temporal standard deviation of <H_s> "
                                        "within the late window"},
                  {"verdict", "converged if sigma_ic < 2 x fluctuation_scale, not_converged if > 5 x, else "
                              "inconclusive"},
                  {"late_window", "final " + format_double(config.late_fraction) + " of the time grid"},
                  {"mean_tv_sys", "mean pairwise total-variation distance of late-window P_s across initial "
                                  "conditions"},
                  {"mean_tv_env", "same for P_e binned into " + std::to_string(config.env_bins) + " bins"}}},
                {"couplings", std::move(thermal)}});
    write_json(dir / "eth_report.json",
               {{"config_hash", hash},
                {"definitions",
                 {{"selection", "world eigenstate with the largest |alpha_i|^2 plus its index neighbours"},
                  {"tv_to_late", "total-variation distance between an eigenstate distribution and the late-window "
                                 "distribution of the same initial condition"},
                  {"eigenstate_scatter", "mean pairwise total-variation distance among all selected eigenstates"},
                  {"late_scatter", "mean pairwise total-variation distance among late-window distributions"}}},
                {"couplings", std::move(eth)}});
    log_line(options, "report written to " + dir.string());
}

}  // namespace acl
