#include "acl/experiments.hpp"

#include "acl/error.hpp"
#include "acl/kernels.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace acl {

// ------------------------------------------------------------------ model

Model make_model(const ModelParams& params, SpectralDecomposition world) {
    params.validate();
    require(world.source == params.fingerprint(), ErrorKind::Dependency,
            "make_model: world decomposition was built from different model parameters");
    require(world.dim() == params.world_dim(), ErrorKind::DimensionMismatch,
            "make_model: world decomposition has the wrong dimension");
    Model m;
    m.params = params;
    m.terms = build_terms(params);
    m.system_spectrum = decompose(m.terms.h_sys);
    m.environment_spectrum = decompose(m.terms.h_env);
    m.world = std::move(world);
    m.eigenstate_energies = eigenstate_energies(m.world, m.terms);
    return m;
}

Model build_model(const ModelParams& params) {
    params.validate();
    return make_model(params, decompose_world(build_terms(params), params.fingerprint()));
}

// --------------------------------------------------------- initial states

AlphaTuning tune_alpha(const ModelTerms& terms, const SpectralDecomposition& env_spectrum,
                       const InitialConditionSpec& ic) {
    require(ic.env_index < env_spectrum.dim(), ErrorKind::Config,
            "tune_alpha: environment eigenstate index " + std::to_string(ic.env_index) + " out of range");
    require(std::isfinite(ic.target_energy), ErrorKind::Config, "tune_alpha: target energy must be finite");
    const auto idx = static_cast<Eigen::Index>(ic.env_index);
    const double env_energy = env_spectrum.eigenvalues(idx);
    const ComplexVector u = env_spectrum.eigenvectors.col(idx);
    const double coupling_diag = u.dot(terms.h_int_env.matrix() * u).real();
    const OscillatorSpace space{terms.n_sys, 1.0};

    auto energy_at = [&](double r) {
        const CoherentState cs = coherent_state(space, std::polar(r, ic.alpha_phase));
        const ComplexVector& v = cs.state.amplitudes();
        const double e_sys = v.dot(terms.h_sys.matrix() * v).real();
        const double q = v.dot(terms.q_sys.matrix() * v).real();
        return e_sys + env_energy + q * coupling_diag;
    };
    auto f = [&](double r) { return energy_at(r) - ic.target_energy; };

    auto finish = [&](double r) {
        const CoherentState cs = coherent_state(space, std::polar(r, ic.alpha_phase));
        return AlphaTuning{std::polar(r, ic.alpha_phase), energy_at(r), cs.top_level_weight, cs.leakage_warning};
    };

    const double f0 = f(0.0);
    if (std::abs(f0) <= 1e-10) return finish(0.0);
    if (f0 > 0.0) {
        throw Error(ErrorKind::Config, "tune_alpha: target energy " + std::to_string(ic.target_energy) +
                                           " lies below the vacuum product-state energy " +
                                           std::to_string(f0 + ic.target_energy));
    }

    // First sign change on a coarse scan; beyond sqrt(N_s) + 1 the truncated
    // displacement wraps around the top level and <H_s> stops being monotone.
    const double r_max = std::sqrt(static_cast<double>(terms.n_sys)) + 1.0;
    constexpr double step = 0.05;
    double lo = 0.0, f_lo = f0, hi = 0.0, f_hi = f0;
    bool bracketed = false;
    for (double r = step; r <= r_max + 1e-12; r += step) {
        const double fr = f(r);
        if (fr >= 0.0) {
            hi = r;
            f_hi = fr;
            bracketed = true;
            break;
        }
        lo = r;
        f_lo = fr;
    }
    if (!bracketed) {
        throw Error(ErrorKind::Config, "tune_alpha: target energy " + std::to_string(ic.target_energy) +
                                           " not reachable with a coherent state on " +
                                           std::to_string(terms.n_sys) + " oscillator levels (bracketing failed)");
    }
    if (f_hi == 0.0) return finish(hi);

    std::uintmax_t max_iter = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi,
                                                          boost::math::tools::eps_tolerance<double>(52), max_iter);
    const double r = std::abs(f(a)) <= std::abs(f(b)) ? a : b;
    const AlphaTuning out = finish(r);
    if (std::abs(out.achieved_energy - ic.target_energy) > 1e-10) {
        throw Error(ErrorKind::Numerical, "tune_alpha: root refinement stalled at |<H_w> - target| = " +
                                              std::to_string(std::abs(out.achieved_energy - ic.target_energy)));
    }
    return out;
}

AlphaTuning tune_alpha(const ModelParams& params, const InitialConditionSpec& ic) {
    const ModelTerms terms = build_terms(params);
    return tune_alpha(terms, decompose(terms.h_env), ic);
}

PreparedState prepare_initial_state(const Model& model, const InitialConditionSpec& ic) {
    const AlphaTuning tuning = tune_alpha(model.terms, model.environment_spectrum, ic);
    const CoherentState cs = coherent_state({model.params.n_sys, 1.0}, tuning.alpha);
    const PureState env = PureState::normalized(
        model.environment_spectrum.eigenvectors.col(static_cast<Eigen::Index>(ic.env_index)));
    PureState product = PureState::product(cs.state, env);
    EigenbasisState eigen = to_eigenbasis(model.world, product);
    return {ic, tuning, std::move(product), std::move(eigen)};
}

// ------------------------------------------------------------ time series

std::vector<double> TimeGrid::times() const {
    require(n_samples >= 2, ErrorKind::Config, "TimeGrid: need at least two samples");
    require(std::isfinite(t_max) && t_max > 0.0, ErrorKind::Config, "TimeGrid: t_max must be positive");
    std::vector<double> t(n_samples);
    const double dt = t_max / static_cast<double>(n_samples - 1);
    for (std::size_t k = 0; k < n_samples; ++k) t[k] = dt * static_cast<double>(k);
    t.back() = t_max;
    return t;
}

double default_horizon(const SpectralDecomposition& world) {
    const auto n = world.eigenvalues.size();
    if (n < 2) return 1.0;
    const double spacing = (world.eigenvalues(n - 1) - world.eigenvalues(0)) / static_cast<double>(n - 1);
    // Late window (final quarter) spans 100 / spacing, about 16 Heisenberg times.
    return spacing > 0.0 ? 400.0 / spacing : 1.0;
}

TimeGrid resolve_grid(const TimeGrid& grid, const SpectralDecomposition& world) {
    TimeGrid out = grid;
    if (out.t_max <= 0.0) out.t_max = default_horizon(world);
    return out;
}

namespace {

TrajectorySample sample_observables(const Model& model, const cplx* psi, double t, const TrajectoryOptions& options) {
    const auto ns = static_cast<Eigen::Index>(model.params.n_sys);
    const auto ne = static_cast<Eigen::Index>(model.params.n_env);
    const Eigen::Map<const ComplexMatrix> x(psi, ne, ns);  // x(e, s) = psi[s * ne + e]
    const ComplexMatrix& hs = model.terms.h_sys.matrix();
    const ComplexMatrix& q = model.terms.q_sys.matrix();
    const ComplexMatrix& he = model.terms.h_env.matrix();
    const ComplexMatrix& hi = model.terms.h_int_env.matrix();

    TrajectorySample out;
    const ComplexMatrix rho_s = (x.adjoint() * x).conjugate();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho_s, Eigen::EigenvaluesOnly);
    out.record.time = t;
    out.record.entropy = entropy_of_spectrum(solver.eigenvalues());
    out.record.e_sys = rho_s.cwiseProduct(hs.transpose()).sum().real();
    out.record.e_env = x.conjugate().cwiseProduct(he * x).sum().real();
    out.record.e_int = x.conjugate().cwiseProduct(hi * x * q.transpose()).sum().real();
    out.norm = x.norm();
    if (options.distributions) {
        const ComplexMatrix& us = model.system_spectrum.eigenvectors;
        out.p_sys = us.conjugate().cwiseProduct(rho_s * us).colwise().sum().real().transpose();
        out.p_env = (model.environment_spectrum.eigenvectors.adjoint() * x).cwiseAbs2().rowwise().sum();
    }
    if (options.environment_entropy) {
        const ComplexMatrix rho_e = x * x.adjoint();
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> env_solver(rho_e, Eigen::EigenvaluesOnly);
        out.env_entropy = entropy_of_spectrum(env_solver.eigenvalues());
    }
    return out;
}

void check_state_for(const Model& model, const EigenbasisState& state) {
    require(static_cast<std::size_t>(state.amplitudes.size()) == model.world.dim(), ErrorKind::DimensionMismatch,
            "trajectory: state dimension does not match the model");
}

}  // namespace

std::vector<TrajectorySample> observe_trajectory(const Model& model, const EigenbasisState& state,
                                                 std::span<const double> times, const TrajectoryOptions& options) {
    check_state_for(model, state);
    const auto n = static_cast<Eigen::Index>(model.world.dim());
    const auto nt = static_cast<Eigen::Index>(times.size());
    const std::size_t un = model.world.dim();
    constexpr Eigen::Index kBatch = 64;

    std::vector<TrajectorySample> out(times.size());
    ComplexMatrix phased(n, kBatch);
    for (Eigen::Index c0 = 0; c0 < nt; c0 += kBatch) {
        const Eigen::Index w = std::min(kBatch, nt - c0);
        for (Eigen::Index c = 0; c < w; ++c) {
            kernels::parallel::propagate({state.amplitudes.data(), un}, {model.world.eigenvalues.data(), un},
                                         times[c0 + c], {phased.col(c).data(), un});
        }
        const ComplexMatrix psi = model.world.eigenvectors * phased.leftCols(w);
#pragma omp parallel for schedule(dynamic)
        for (Eigen::Index c = 0; c < w; ++c) {
            out[c0 + c] = sample_observables(model, psi.col(c).data(), times[c0 + c], options);
        }
    }
    return out;
}

std::vector<TrajectorySample> observe_trajectory_serial(const Model& model, const EigenbasisState& state,
                                                        std::span<const double> times,
                                                        const TrajectoryOptions& options) {
    check_state_for(model, state);
    const std::size_t n = model.world.dim();
    const std::size_t ns = model.params.n_sys, ne = model.params.n_env;
    const kernels::Dims dims = model.dims();
    const ComplexMatrix& v = model.world.eigenvectors;
    const ComplexMatrix& hs = model.terms.h_sys.matrix();
    const ComplexMatrix identity_s = ComplexMatrix::Identity(ns, ns);

    std::vector<TrajectorySample> out;
    out.reserve(times.size());
    std::vector<cplx> alpha_t(n), psi(n);
    for (const double t : times) {
        kernels::serial::propagate({state.amplitudes.data(), n}, {model.world.eigenvalues.data(), n}, t, alpha_t);
        for (std::size_t k = 0; k < n; ++k) {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += v(k, i) * alpha_t[i];
            psi[k] = acc;
        }
        TrajectorySample s;
        const ComplexMatrix rho_s = kernels::serial::reduce_to_system(psi, dims);
        s.record.time = t;
        s.record.entropy = entropy_of_spectrum(
            Eigen::SelfAdjointEigenSolver<ComplexMatrix>(rho_s, Eigen::EigenvaluesOnly).eigenvalues());
        cplx e_sys = 0.0;
        for (std::size_t i = 0; i < ns; ++i)
            for (std::size_t j = 0; j < ns; ++j) e_sys += rho_s(i, j) * hs(j, i);
        s.record.e_sys = e_sys.real();
        s.record.e_env = kernels::serial::product_expectation(identity_s, model.terms.h_env.matrix(), psi, dims).real();
        s.record.e_int =
            kernels::serial::product_expectation(model.terms.q_sys.matrix(), model.terms.h_int_env.matrix(), psi, dims)
                .real();
        double norm2 = 0.0;
        for (const auto& a : psi) norm2 += std::norm(a);
        s.norm = std::sqrt(norm2);

        if (options.distributions || options.environment_entropy) {
            const ComplexMatrix rho_e = kernels::serial::reduce_to_environment(psi, dims);
            if (options.distributions) {
                auto diag_in_basis = [](const ComplexMatrix& rho, const ComplexMatrix& u) {
                    RealVector p(u.cols());
                    for (Eigen::Index k = 0; k < u.cols(); ++k) {
                        cplx acc = 0.0;
                        for (Eigen::Index i = 0; i < u.rows(); ++i)
                            for (Eigen::Index j = 0; j < u.rows(); ++j) acc += std::conj(u(i, k)) * rho(i, j) * u(j, k);
                        p(k) = acc.real();
                    }
                    return p;
                };
                s.p_sys = diag_in_basis(rho_s, model.system_spectrum.eigenvectors);
                s.p_env = diag_in_basis(rho_e, model.environment_spectrum.eigenvectors);
            }
            if (options.environment_entropy) {
                s.env_entropy = entropy_of_spectrum(
                    Eigen::SelfAdjointEigenSolver<ComplexMatrix>(rho_e, Eigen::EigenvaluesOnly).eigenvalues());
            }
        }
        out.push_back(std::move(s));
    }
    (void)ne;
    return out;
}

std::vector<TimeSeriesRecord> run_equilibration(const Model& model, const EigenbasisState& state,
                                                const TimeGrid& grid) {
    const std::vector<double> times = resolve_grid(grid, model.world).times();
    const auto samples = observe_trajectory(model, state, times);
    std::vector<TimeSeriesRecord> records;
    records.reserve(samples.size());
    for (const auto& s : samples) records.push_back(s.record);
    return records;
}

std::vector<TimeSeriesRecord> run_equilibration(const Model& model, const InitialConditionSpec& ic,
                                                const TimeGrid& grid) {
    return run_equilibration(model, prepare_initial_state(model, ic).eigen, grid);
}

// ------------------------------------------------------ window statistics

double spread(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size()));
}

ObservableStats window_stats(std::span<const double> values) {
    require(values.size() >= kMinWindowSamples, ErrorKind::Config,
            "window_stats: late window needs at least " + std::to_string(kMinWindowSamples) + " samples");
    ObservableStats s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    s.stddev = spread(values);

    const std::size_t batch = values.size() / kBatchCount;
    const std::size_t skip = values.size() - batch * kBatchCount;
    std::vector<double> means(kBatchCount);
    for (std::size_t b = 0; b < kBatchCount; ++b) {
        const auto first = values.begin() + static_cast<std::ptrdiff_t>(skip + b * batch);
        means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(batch), 0.0) / static_cast<double>(batch);
    }
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(kBatchCount);
    double ss = 0.0;
    for (double m : means) ss += (m - grand) * (m - grand);
    s.std_error = std::sqrt(ss / static_cast<double>(kBatchCount - 1) / static_cast<double>(kBatchCount));
    return s;
}

std::size_t late_window_begin(std::size_t n_samples, double late_fraction) {
    require(late_fraction > 0.0 && late_fraction <= 1.0, ErrorKind::Config,
            "late window fraction must lie in (0, 1]");
    const auto count = static_cast<std::size_t>(std::llround(late_fraction * static_cast<double>(n_samples)));
    return n_samples - std::min(count, n_samples);
}

EquilibriumStats equilibrium_stats(std::span<const TimeSeriesRecord> records, double late_fraction,
                                   double diagonal_e_sys) {
    const std::size_t begin = late_window_begin(records.size(), late_fraction);
    const std::size_t count = records.size() - begin;
    require(count >= kMinWindowSamples, ErrorKind::Config,
            "equilibrium_stats: late window has " + std::to_string(count) + " samples, need " +
                std::to_string(kMinWindowSamples));
    std::vector<double> s(count), es(count), ee(count), ei(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto& r = records[begin + k];
        s[k] = r.entropy;
        es[k] = r.e_sys;
        ee[k] = r.e_env;
        ei[k] = r.e_int;
    }
    EquilibriumStats out;
    out.t_start = records[begin].time;
    out.t_end = records.back().time;
    require(out.t_end > out.t_start, ErrorKind::Config, "equilibrium_stats: empty time window");
    out.n_samples = count;
    out.entropy = window_stats(s);
    out.e_sys = window_stats(es);
    out.e_env = window_stats(ee);
    out.e_int = window_stats(ei);
    out.diagonal_e_sys = diagonal_e_sys;
    out.dephasing_gap = std::abs(out.e_sys.mean - diagonal_e_sys);
    return out;
}

DiagonalEnergies diagonal_energies(const Model& model, const EigenbasisState& state) {
    check_state_for(model, state);
    const RealVector p = state.amplitudes.cwiseAbs2();
    return {p.dot(model.eigenstate_energies.system), p.dot(model.eigenstate_energies.environment),
            p.dot(model.eigenstate_energies.interaction), p.dot(model.world.eigenvalues)};
}

// --------------------------------------------------- dephasing comparison

namespace {

PairGap pair_gap(const ObservableStats& a, const ObservableStats& b) {
    return {std::abs(a.mean - b.mean), std::hypot(a.std_error, b.std_error)};
}

}  // namespace

bool DephasingComparison::converged(double k) const {
    for (std::size_t j = 0; j < randomized_stats.size(); ++j) {
        for (const auto* gaps : {&entropy_gap, &e_sys_gap, &e_env_gap}) {
            const PairGap& g = (*gaps)[j];
            if (g.gap > k * g.combined_se) return false;
        }
    }
    return true;
}

DephasingComparison run_dephasing_comparison(const Model& model, const InitialConditionSpec& ic,
                                             const TimeGrid& grid, std::size_t n_seeds, std::uint64_t phase_seed,
                                             double late_fraction) {
    require(n_seeds >= 1, ErrorKind::Config, "run_dephasing_comparison: need at least one phase seed");
    const PreparedState prep = prepare_initial_state(model, ic);
    const TimeGrid resolved = resolve_grid(grid, model.world);
    const double diag_e_sys = diagonal_energies(model, prep.eigen).e_sys;

    DephasingComparison out;
    out.ordinary = run_equilibration(model, prep.eigen, resolved);
    out.ordinary_stats = equilibrium_stats(out.ordinary, late_fraction, diag_e_sys);
    const RealVector p_ordinary = prep.eigen.amplitudes.cwiseAbs2();

    std::vector<double> late_means;
    for (std::size_t j = 0; j < n_seeds; ++j) {
        const EigenbasisState shuffled = randomize_phases(prep.eigen, phase_seed + j);
        out.p_world_max_difference = std::max(
            out.p_world_max_difference, (shuffled.amplitudes.cwiseAbs2() - p_ordinary).cwiseAbs().maxCoeff());
        out.randomized.push_back(run_equilibration(model, shuffled, resolved));
        out.randomized_stats.push_back(equilibrium_stats(out.randomized.back(), late_fraction, diag_e_sys));
        const auto& rs = out.randomized_stats.back();
        out.entropy_gap.push_back(pair_gap(out.ordinary_stats.entropy, rs.entropy));
        out.e_sys_gap.push_back(pair_gap(out.ordinary_stats.e_sys, rs.e_sys));
        out.e_env_gap.push_back(pair_gap(out.ordinary_stats.e_env, rs.e_env));
        late_means.push_back(rs.e_sys.mean);
    }
    out.seed_scatter_e_sys = spread(late_means);
    return out;
}

// ----------------------------------------------------- thermalization scan

const char* to_string(ThermalizationVerdict v) noexcept {
    switch (v) {
    case ThermalizationVerdict::Converged: return "converged";
    case ThermalizationVerdict::NotConverged: return "not_converged";
    default: return "inconclusive";
    }
}

ThermalizationVerdict classify(double sigma_ic, double fluctuation_scale) noexcept {
    if (sigma_ic < kConvergedBelow * fluctuation_scale || (sigma_ic == 0.0 && fluctuation_scale == 0.0)) {
        return ThermalizationVerdict::Converged;
    }
    if (sigma_ic > kNotConvergedAbove * fluctuation_scale) return ThermalizationVerdict::NotConverged;
    return ThermalizationVerdict::Inconclusive;
}

double mean_pairwise_tv(std::span<const EnergyDistribution> dists) {
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < dists.size(); ++i) {
        for (std::size_t j = i + 1; j < dists.size(); ++j) {
            total += total_variation(dists[i], dists[j]);
            ++pairs;
        }
    }
    return pairs > 0 ? total / static_cast<double>(pairs) : 0.0;
}

CouplingScan scan_coupling(const Model& model, std::span<const InitialConditionSpec> ics,
                           const ScanSettings& settings) {
    require(!ics.empty(), ErrorKind::Config, "scan_coupling: no initial conditions");
    CouplingScan scan;
    scan.coupling = model.params.coupling;
    scan.grid = resolve_grid(settings.grid, model.world);
    const std::vector<double> times = scan.grid.times();
    const std::size_t begin = late_window_begin(times.size(), settings.late_fraction);
    const RealVector& sys_levels = model.system_spectrum.eigenvalues;
    const RealVector& env_levels = model.environment_spectrum.eigenvalues;

    std::vector<double> late_means, initial_values, fluctuations;
    std::vector<EnergyDistribution> late_sys, late_env;
    for (const auto& ic : ics) {
        const PreparedState prep = prepare_initial_state(model, ic);
        const auto samples = observe_trajectory(model, prep.eigen, times, {.distributions = true});
        std::vector<TimeSeriesRecord> records;
        records.reserve(samples.size());
        for (const auto& s : samples) records.push_back(s.record);

        ScanRun run;
        run.ic = ic;
        run.tuning = prep.tuning;
        run.initial = records.front();
        run.stats = equilibrium_stats(records, settings.late_fraction, diagonal_energies(model, prep.eigen).e_sys);
        run.initial_p_sys = distribution_on_grid(sys_levels, samples.front().p_sys);
        run.initial_p_env = bin_distribution(distribution_on_grid(env_levels, samples.front().p_env), settings.env_bins);

        RealVector avg_sys = RealVector::Zero(sys_levels.size());
        RealVector avg_env = RealVector::Zero(env_levels.size());
        for (std::size_t k = begin; k < samples.size(); ++k) {
            avg_sys += samples[k].p_sys;
            avg_env += samples[k].p_env;
        }
        const double count = static_cast<double>(samples.size() - begin);
        run.late_p_sys = distribution_on_grid(sys_levels, avg_sys / count);
        run.late_p_env = bin_distribution(distribution_on_grid(env_levels, avg_env / count), settings.env_bins);
        run.p_world = world_energy_distribution(prep.eigen, model.world);
        run.effective_dimension = effective_dimension(run.p_world);

        late_means.push_back(run.stats.e_sys.mean);
        initial_values.push_back(run.initial.e_sys);
        fluctuations.push_back(run.stats.e_sys.stddev);
        late_sys.push_back(run.late_p_sys);
        late_env.push_back(run.late_p_env);
        scan.runs.push_back(std::move(run));
    }
    scan.sigma_ic = spread(late_means);
    scan.initial_spread = spread(initial_values);
    scan.fluctuation_scale =
        std::accumulate(fluctuations.begin(), fluctuations.end(), 0.0) / static_cast<double>(fluctuations.size());
    scan.verdict = classify(scan.sigma_ic, scan.fluctuation_scale);
    scan.mean_tv_sys = mean_pairwise_tv(late_sys);
    scan.mean_tv_env = mean_pairwise_tv(late_env);
    return scan;
}

std::vector<CouplingScan> thermalization_scan(const ModelParams& base, std::span<const double> couplings,
                                              std::span<const InitialConditionSpec> ics,
                                              const ScanSettings& settings) {
    std::vector<CouplingScan> out;
    for (const double c : couplings) {
        ModelParams p = base;
        p.coupling = c;
        out.push_back(scan_coupling(build_model(p), ics, settings));
    }
    return out;
}

// ------------------------------------------------------ eigenstate anatomy

namespace {

std::span<const cplx> eigenvector(const Model& model, std::size_t k) {
    return {model.world.eigenvectors.col(static_cast<Eigen::Index>(k)).data(), model.world.dim()};
}

EnergyDistribution eigenstate_p_sys(const Model& model, std::size_t k) {
    const DensityMatrix rho{kernels::parallel::reduce_to_system(eigenvector(model, k), model.dims()),
                            Subsystem::System};
    return energy_distribution(rho, model.system_spectrum);
}

}  // namespace

std::vector<EigenstateProfile> eigenstate_scan(const Model& model, std::span<const std::size_t> indices,
                                               std::size_t env_bins) {
    std::vector<EigenstateProfile> out;
    for (const std::size_t k : indices) {
        require(k < model.world.dim(), ErrorKind::InvalidArgument,
                "eigenstate_scan: index " + std::to_string(k) + " out of range");
        EigenstateProfile p;
        p.index = k;
        p.energy = model.world.eigenvalues(static_cast<Eigen::Index>(k));
        p.p_sys = eigenstate_p_sys(model, k);
        const DensityMatrix rho_e{kernels::parallel::reduce_to_environment(eigenvector(model, k), model.dims()),
                                  Subsystem::Environment};
        p.p_env = bin_distribution(energy_distribution(rho_e, model.environment_spectrum), env_bins);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<std::size_t> spread_selection(std::size_t n, std::size_t count) {
    require(n >= 1 && count >= 1, ErrorKind::InvalidArgument, "spread_selection: empty selection");
    if (count == 1) return {0};
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < count; ++j) {
        const double pos = static_cast<double>(j) * static_cast<double>(n - 1) / static_cast<double>(count - 1);
        const auto idx = static_cast<std::size_t>(std::llround(pos));
        if (out.empty() || out.back() != idx) out.push_back(idx);
    }
    return out;
}

std::vector<std::size_t> adjacent_triple(std::size_t n, std::size_t center) {
    require(center < n, ErrorKind::InvalidArgument, "adjacent_triple: center out of range");
    if (n < 3) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    const std::size_t c = std::clamp<std::size_t>(center, 1, n - 2);
    return {c - 1, c, c + 1};
}

double mean_adjacent_tv_sys(const Model& model, std::size_t begin, std::size_t end) {
    require(begin + 1 < end && end <= model.world.dim(), ErrorKind::InvalidArgument,
            "mean_adjacent_tv_sys: invalid index range");
    double total = 0.0;
    EnergyDistribution prev = eigenstate_p_sys(model, begin);
    for (std::size_t k = begin + 1; k < end; ++k) {
        EnergyDistribution cur = eigenstate_p_sys(model, k);
        total += total_variation(prev, cur);
        prev = std::move(cur);
    }
    return total / static_cast<double>(end - begin - 1);
}

double mean_adjacent_tv_sys_mid(const Model& model) {
    const std::size_t n = model.world.dim();
    return mean_adjacent_tv_sys(model, n / 4, 3 * n / 4);
}

// -------------------------------------------------------------------- d_eff

std::vector<double> state_effective_dimensions(const Model& model, std::span<const InitialConditionSpec> ics) {
    std::vector<double> out;
    for (const auto& ic : ics) {
        const PreparedState prep = prepare_initial_state(model, ic);
        out.push_back(effective_dimension(world_energy_distribution(prep.eigen, model.world)));
    }
    return out;
}

std::vector<DeffRow> deff_table(std::span<const DeffInput> inputs, std::size_t world_dim, double reference_coupling) {
    require(world_dim > 0, ErrorKind::InvalidArgument, "deff_table: world dimension must be positive");
    std::vector<DeffRow> rows;
    const DeffRow* reference = nullptr;
    for (const auto& in : inputs) {
        require(!in.per_state.empty(), ErrorKind::InvalidArgument, "deff_table: empty row");
        DeffRow row;
        row.coupling = in.coupling;
        row.per_state = in.per_state;
        const double mean = std::accumulate(in.per_state.begin(), in.per_state.end(), 0.0) /
                            static_cast<double>(in.per_state.size());
        row.mean_deff_over_nw = mean / static_cast<double>(world_dim);
        row.delta_pct = 100.0 * spread(in.per_state) / mean;
        rows.push_back(std::move(row));
    }
    for (const auto& row : rows) {
        if (std::abs(row.coupling - reference_coupling) <= 1e-12 * std::max(1.0, std::abs(reference_coupling))) {
            reference = &row;
        }
    }
    require(reference != nullptr, ErrorKind::Config, "deff_table: reference coupling not among the table rows");
    const double ref = reference->mean_deff_over_nw;
    for (auto& row : rows) row.pct_of_reference = 100.0 * row.mean_deff_over_nw / ref;
    return rows;
}

// ---------------------------------------------------------------------- ETH

EthReport eth_diagnostic(const Model& model, std::span<const EigenbasisState> states,
                         std::span<const EnergyDistribution> late_p_sys, std::span<const EnergyDistribution> late_p_env,
                         std::size_t env_bins) {
    require(states.size() == late_p_sys.size() && states.size() == late_p_env.size() && !states.empty(),
            ErrorKind::InvalidArgument, "eth_diagnostic: need one late-time distribution pair per state");
    EthReport report;
    report.coupling = model.params.coupling;
    std::vector<EnergyDistribution> eig_sys, eig_env;
    double tv_sys = 0.0, tv_env = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < states.size(); ++j) {
        EthStateReport sr;
        sr.ic = j;
        Eigen::Index peak = 0;
        states[j].amplitudes.cwiseAbs2().maxCoeff(&peak);
        sr.peak_index = static_cast<std::size_t>(peak);
        sr.selected = adjacent_triple(model.world.dim(), sr.peak_index);
        for (const auto& prof : eigenstate_scan(model, sr.selected, env_bins)) {
            sr.tv_sys_to_late.push_back(total_variation(prof.p_sys, late_p_sys[j]));
            sr.tv_env_to_late.push_back(total_variation(prof.p_env, late_p_env[j]));
            tv_sys += sr.tv_sys_to_late.back();
            tv_env += sr.tv_env_to_late.back();
            ++count;
            eig_sys.push_back(prof.p_sys);
            eig_env.push_back(prof.p_env);
        }
        report.states.push_back(std::move(sr));
    }
    report.mean_tv_sys_to_late = tv_sys / static_cast<double>(count);
    report.mean_tv_env_to_late = tv_env / static_cast<double>(count);
    report.eigenstate_scatter_sys = mean_pairwise_tv(eig_sys);
    report.eigenstate_scatter_env = mean_pairwise_tv(eig_env);
    report.late_scatter_sys = mean_pairwise_tv(late_p_sys);
    report.late_scatter_env = mean_pairwise_tv(late_p_env);
    return report;
}

}  // namespace acl
