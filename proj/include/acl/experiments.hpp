#pragma once

#include "acl/hamiltonian.hpp"
#include "acl/reduced.hpp"
#include "acl/spectral.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace acl {

// One Hamiltonian realization with every spectrum the experiments need.
struct Model {
    ModelParams params;
    ModelTerms terms;
    SpectralDecomposition system_spectrum;
    SpectralDecomposition environment_spectrum;
    SpectralDecomposition world;
    EigenstateEnergies eigenstate_energies;

    kernels::Dims dims() const noexcept { return {params.n_sys, params.n_env}; }
};

// `world` must be the decomposition of H_w for `params` (checked by fingerprint).
Model make_model(const ModelParams& params, SpectralDecomposition world);
Model build_model(const ModelParams& params);

// ------------------------------------------------------------ initial states

struct InitialConditionSpec {
    std::size_t env_index = 0;     // eigenstate of H_e, ascending eigenvalue order
    double target_energy = 25.0;   // <H_w> of the product state
    double alpha_phase = 0.0;      // arg(alpha)
};

struct AlphaTuning {
    std::complex<double> alpha;
    double achieved_energy = 0.0;
    double top_level_weight = 0.0;
    bool leakage_warning = false;
};

// Finds |alpha| such that coherent(alpha) (x) |i>_e has <H_w> = target
// (interaction included) to 1e-10. Throws ErrorKind::Config when no bracket
// exists on the truncated oscillator.
AlphaTuning tune_alpha(const ModelTerms& terms, const SpectralDecomposition& env_spectrum,
                       const InitialConditionSpec& ic);
AlphaTuning tune_alpha(const ModelParams& params, const InitialConditionSpec& ic);

struct PreparedState {
    InitialConditionSpec spec;
    AlphaTuning tuning;
    PureState product;
    EigenbasisState eigen;
};

PreparedState prepare_initial_state(const Model& model, const InitialConditionSpec& ic);

// --------------------------------------------------------------- time series

struct TimeGrid {
    double t_max = 0.0;  // <= 0 selects default_horizon()
    std::size_t n_samples = 1000;

    // Uniform samples t_k = k * t_max / (n - 1), k = 0..n-1.
    std::vector<double> times() const;
};

// 400 / (mean world level spacing).
double default_horizon(const SpectralDecomposition& world);
TimeGrid resolve_grid(const TimeGrid& grid, const SpectralDecomposition& world);

struct TimeSeriesRecord {
    double time = 0.0;
    double entropy = 0.0;
    double e_sys = 0.0;
    double e_env = 0.0;
    double e_int = 0.0;
};

struct TrajectoryOptions {
    bool distributions = false;        // P_s and unbinned P_e per sample
    bool environment_entropy = false;  // S(rho_e) per sample
};

struct TrajectorySample {
    TimeSeriesRecord record;
    double norm = 0.0;
    double env_entropy = 0.0;
    RealVector p_sys;
    RealVector p_env;
};

// Time samples are evaluated in column batches (one GEMM per batch) with an
// OpenMP loop over samples.
std::vector<TrajectorySample> observe_trajectory(const Model& model, const EigenbasisState& state,
                                                 std::span<const double> times, const TrajectoryOptions& options = {});
// Reference path: per-sample propagation and the serial kernels.
std::vector<TrajectorySample> observe_trajectory_serial(const Model& model, const EigenbasisState& state,
                                                        std::span<const double> times,
                                                        const TrajectoryOptions& options = {});

std::vector<TimeSeriesRecord> run_equilibration(const Model& model, const EigenbasisState& state,
                                                const TimeGrid& grid);
std::vector<TimeSeriesRecord> run_equilibration(const Model& model, const InitialConditionSpec& ic,
                                                const TimeGrid& grid);

// ----------------------------------------------------------- window statistics

inline constexpr double kDefaultLateFraction = 0.25;
inline constexpr std::size_t kMinWindowSamples = 50;
inline constexpr std::size_t kBatchCount = 10;

struct ObservableStats {
    double mean = 0.0;
    double stddev = 0.0;     // temporal fluctuation over the window
    double std_error = 0.0;  // of the mean, batch means over kBatchCount batches
};

ObservableStats window_stats(std::span<const double> values);

struct EquilibriumStats {
    double t_start = 0.0;
    double t_end = 0.0;
    std::size_t n_samples = 0;
    ObservableStats entropy, e_sys, e_env, e_int;
    double diagonal_e_sys = 0.0;
    double dephasing_gap = 0.0;  // |window mean E_s - diagonal ensemble E_s|
};

// Index of the first sample in the late window (final `late_fraction` of the grid).
std::size_t late_window_begin(std::size_t n_samples, double late_fraction);

EquilibriumStats equilibrium_stats(std::span<const TimeSeriesRecord> records, double late_fraction,
                                   double diagonal_e_sys);

struct DiagonalEnergies {
    double e_sys = 0.0;
    double e_env = 0.0;
    double e_int = 0.0;
    double e_world = 0.0;
};
DiagonalEnergies diagonal_energies(const Model& model, const EigenbasisState& state);

// Population standard deviation.
double spread(std::span<const double> values);

// ------------------------------------------------------- dephasing comparison

struct PairGap {
    double gap = 0.0;          // |mean_a - mean_b|
    double combined_se = 0.0;  // sqrt(se_a^2 + se_b^2)
    double ratio() const noexcept { return combined_se > 0.0 ? gap / combined_se : (gap > 0.0 ? 1e300 : 0.0); }
};

struct DephasingComparison {
    std::vector<TimeSeriesRecord> ordinary;
    std::vector<std::vector<TimeSeriesRecord>> randomized;  // one per phase seed
    EquilibriumStats ordinary_stats;
    std::vector<EquilibriumStats> randomized_stats;
    std::vector<PairGap> entropy_gap, e_sys_gap, e_env_gap;  // ordinary vs each seed
    double seed_scatter_e_sys = 0.0;  // spread of randomized late means across seeds
    double p_world_max_difference = 0.0;

    // Every seed agrees with the ordinary run within k combined standard errors.
    bool converged(double k = 4.0) const;
};

DephasingComparison run_dephasing_comparison(const Model& model, const InitialConditionSpec& ic,
                                             const TimeGrid& grid, std::size_t n_seeds, std::uint64_t phase_seed,
                                             double late_fraction = kDefaultLateFraction);

// ------------------------------------------------------- thermalization scan

enum class ThermalizationVerdict { Converged, NotConverged, Inconclusive };
const char* to_string(ThermalizationVerdict v) noexcept;

inline constexpr double kConvergedBelow = 2.0;    // sigma_IC < 2 x fluctuation scale
inline constexpr double kNotConvergedAbove = 5.0; // sigma_IC > 5 x fluctuation scale

struct ScanSettings {
    TimeGrid grid;
    double late_fraction = kDefaultLateFraction;
    std::size_t env_bins = kDefaultBins;
};

struct ScanRun {
    InitialConditionSpec ic;
    AlphaTuning tuning;
    TimeSeriesRecord initial;
    EquilibriumStats stats;
    EnergyDistribution initial_p_sys, initial_p_env;  // P_e binned
    EnergyDistribution late_p_sys, late_p_env;        // window averages; P_e binned
    EnergyDistribution p_world;                       // unbinned, time independent
    double effective_dimension = 0.0;
};

struct CouplingScan {
    double coupling = 0.0;
    TimeGrid grid;
    std::vector<ScanRun> runs;
    double sigma_ic = 0.0;           // spread of late mean E_s across initial conditions
    double initial_spread = 0.0;     // spread of initial E_s
    double fluctuation_scale = 0.0;  // mean temporal stddev of E_s in the late window
    ThermalizationVerdict verdict = ThermalizationVerdict::Inconclusive;
    double mean_tv_sys = 0.0;  // mean pairwise TV of late P_s across initial conditions
    double mean_tv_env = 0.0;  // same for binned late P_e
};

ThermalizationVerdict classify(double sigma_ic, double fluctuation_scale) noexcept;

CouplingScan scan_coupling(const Model& model, std::span<const InitialConditionSpec> ics,
                           const ScanSettings& settings);
// Builds one model per coupling; every other parameter is shared.
std::vector<CouplingScan> thermalization_scan(const ModelParams& base, std::span<const double> couplings,
                                              std::span<const InitialConditionSpec> ics,
                                              const ScanSettings& settings);

// ---------------------------------------------------------- eigenstate anatomy

struct EigenstateProfile {
    std::size_t index = 0;
    double energy = 0.0;
    EnergyDistribution p_sys;
    EnergyDistribution p_env;  // binned
};

std::vector<EigenstateProfile> eigenstate_scan(const Model& model, std::span<const std::size_t> indices,
                                               std::size_t env_bins = kDefaultBins);

// `count` indices spread evenly from the lowest to the highest eigenvalue.
std::vector<std::size_t> spread_selection(std::size_t n, std::size_t count);
// {center - 1, center, center + 1}, shifted to stay inside [0, n).
std::vector<std::size_t> adjacent_triple(std::size_t n, std::size_t center);

// Mean TV distance between P_s of eigenstates k and k+1 for k in [begin, end - 1).
double mean_adjacent_tv_sys(const Model& model, std::size_t begin, std::size_t end);
// Middle half of the spectrum: [n/4, 3n/4).
double mean_adjacent_tv_sys_mid(const Model& model);

// --------------------------------------------------------------------- d_eff

std::vector<double> state_effective_dimensions(const Model& model, std::span<const InitialConditionSpec> ics);

struct DeffRow {
    double coupling = 0.0;
    std::vector<double> per_state;
    double mean_deff_over_nw = 0.0;
    double delta_pct = 0.0;          // spread / mean, percent
    double pct_of_reference = 0.0;
};

struct DeffInput {
    double coupling = 0.0;
    std::vector<double> per_state;
};

std::vector<DeffRow> deff_table(std::span<const DeffInput> inputs, std::size_t world_dim, double reference_coupling);

// ----------------------------------------------------------------------- ETH

struct EthStateReport {
    std::size_t ic = 0;
    std::size_t peak_index = 0;
    std::vector<std::size_t> selected;
    std::vector<double> tv_sys_to_late;
    std::vector<double> tv_env_to_late;
};

struct EthReport {
    double coupling = 0.0;
    std::vector<EthStateReport> states;
    double mean_tv_sys_to_late = 0.0;
    double mean_tv_env_to_late = 0.0;
    double eigenstate_scatter_sys = 0.0;  // mean pairwise TV among selected eigenstates
    double eigenstate_scatter_env = 0.0;
    double late_scatter_sys = 0.0;        // mean pairwise TV among late-time distributions
    double late_scatter_env = 0.0;
};

EthReport eth_diagnostic(const Model& model, std::span<const EigenbasisState> states,
                         std::span<const EnergyDistribution> late_p_sys, std::span<const EnergyDistribution> late_p_env,
                         std::size_t env_bins = kDefaultBins);

double mean_pairwise_tv(std::span<const EnergyDistribution> dists);

}  // namespace acl
