#include "acl/experiments.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numeric>

using namespace acl;

namespace {

ModelParams small_params(double coupling) {
    ModelParams p;
    p.n_sys = 8;
    p.n_env = 24;
    p.coupling = coupling;
    p.seed = 0;
    return p;
}

const Model& coupled_model() {
    static const Model m = build_model(small_params(0.3));
    return m;
}

const Model& uncoupled_model() {
    static const Model m = build_model(small_params(0.0));
    return m;
}

std::vector<InitialConditionSpec> small_ics() {
    std::vector<InitialConditionSpec> out;
    for (std::size_t k : {8u, 11u, 14u, 17u}) out.push_back({k, 4.0, 0.0});
    return out;
}

TimeGrid short_grid() { return {0.0, 400}; }

}  // namespace

TEST_CASE("tune_alpha without coupling matches energy additivity") {
    ModelParams p = small_params(0.0);
    p.n_sys = 30;
    const ModelTerms terms = build_terms(p);
    const auto env = decompose(terms.h_env);
    for (std::size_t j : {3u, 12u, 20u}) {
        const auto t = tune_alpha(p, {j, 10.0, 0.0});
        const double e_env = env.eigenvalues(static_cast<Eigen::Index>(j));
        const auto ref = oracle::coherent(30, t.alpha);
        double e_sys = 0.0;
        for (std::size_t n = 0; n < 30; ++n) e_sys += (static_cast<double>(n) + 0.5) * std::norm(ref[n]);
        CHECK(std::abs(e_sys + e_env - 10.0) < 1e-8);
        // Truncation shifts |alpha|^2 slightly from the untruncated value.
        CHECK(std::abs(std::norm(t.alpha) - (10.0 - e_env - 0.5)) < 1e-4);
        CHECK(t.alpha.imag() == 0.0);
        CHECK(t.alpha.real() > 0.0);
    }
}

TEST_CASE("tune_alpha depends only weakly on the coupling") {
    ModelParams weak = small_params(0.007), strong = small_params(0.1);
    weak.n_sys = strong.n_sys = 30;
    for (std::size_t j : {5u, 12u, 19u}) {
        const double a = std::abs(tune_alpha(weak, {j, 10.0, 0.0}).alpha);
        const double b = std::abs(tune_alpha(strong, {j, 10.0, 0.0}).alpha);
        CHECK(std::abs(a - b) / b < 0.05);
    }
}

TEST_CASE("tuned product state has the target world energy") {
    const Model& m = coupled_model();
    const WorldOperators ops = assemble_world(m.params);
    for (const auto& ic : small_ics()) {
        const PreparedState prep = prepare_initial_state(m, ic);
        CHECK(std::abs(expectation(ops.world, prep.product) - 4.0) < 1e-10);
        CHECK(std::abs(prep.tuning.achieved_energy - 4.0) < 1e-10);
        const auto ref = oracle::expectation(oracle::from(ops.world.matrix()),
                                             {prep.product.amplitudes().data(),
                                              prep.product.amplitudes().data() + prep.product.dim()});
        CHECK(std::abs(ref.real() - 4.0) < 1e-10);
        CHECK(std::abs(diagonal_energies(m, prep.eigen).e_world - 4.0) < 1e-10);
    }
    const auto phased = prepare_initial_state(m, {11, 4.0, 0.8});
    CHECK(std::arg(phased.tuning.alpha) == doctest::Approx(0.8));
    CHECK(std::abs(expectation(ops.world, phased.product) - 4.0) < 1e-10);
}

TEST_CASE("tune_alpha reports unreachable targets") {
    const Model& m = coupled_model();
    CHECK_ERROR_KIND(tune_alpha(m.terms, m.environment_spectrum, {11, -50.0, 0.0}), ErrorKind::Config);
    CHECK_ERROR_KIND(tune_alpha(m.terms, m.environment_spectrum, {11, 500.0, 0.0}), ErrorKind::Config);
    CHECK_ERROR_KIND(tune_alpha(m.terms, m.environment_spectrum, {24, 4.0, 0.0}), ErrorKind::Config);
    const double vacuum = 0.5 + m.environment_spectrum.eigenvalues(11) +
                          0.0;  // <0|q|0> = 0, so the interaction adds nothing at alpha = 0
    const auto t = tune_alpha(m.terms, m.environment_spectrum, {11, vacuum, 0.0});
    CHECK(t.alpha == cplx(0.0));
}

TEST_CASE("time grid") {
    const TimeGrid g{10.0, 11};
    const auto t = g.times();
    REQUIRE(t.size() == 11);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 10.0);
    CHECK(t[3] == doctest::Approx(3.0));
    CHECK_ERROR_KIND((TimeGrid{10.0, 1}.times()), ErrorKind::Config);
    CHECK_ERROR_KIND((TimeGrid{-1.0, 10}.times()), ErrorKind::Config);
    const auto& w = coupled_model().world;
    const double spacing = (w.eigenvalues(w.eigenvalues.size() - 1) - w.eigenvalues(0)) / static_cast<double>(w.dim() - 1);
    CHECK(resolve_grid({0.0, 10}, w).t_max == doctest::Approx(400.0 / spacing));
    CHECK(resolve_grid({5.0, 10}, w).t_max == 5.0);
}

TEST_CASE("trajectory conservation laws") {
    const Model& m = coupled_model();
    const PreparedState prep = prepare_initial_state(m, small_ics()[1]);
    const auto times = resolve_grid(short_grid(), m.world).times();
    const auto samples = observe_trajectory(m, prep.eigen, times, {.environment_entropy = true});
    const double e0 = 4.0;
    for (const auto& s : samples) {
        const auto& r = s.record;
        CHECK(std::abs(s.norm - 1.0) < 1e-10);
        CHECK(std::abs(r.e_sys + r.e_env + r.e_int - e0) < 1e-8 * e0);
        CHECK(std::abs(r.entropy - s.env_entropy) < 1e-8);
    }
    const auto& first = samples.front().record;
    CHECK(std::abs(first.entropy) < 1e-10);
    const WorldOperators ops = assemble_world(m.params);
    CHECK(std::abs(first.e_sys - expectation(ops.system, prep.product)) < 1e-10);
    CHECK(std::abs(first.e_env - expectation(ops.environment, prep.product)) < 1e-10);
    CHECK(std::abs(first.e_int - expectation(ops.interaction, prep.product)) < 1e-10);
    // Entropy rises from zero.
    double late = 0.0;
    for (std::size_t k = 300; k < samples.size(); ++k) late += samples[k].record.entropy;
    CHECK(late / 100.0 > 0.1);
}

TEST_CASE("batched and reference trajectories agree") {
    const Model& m = coupled_model();
    const PreparedState prep = prepare_initial_state(m, small_ics()[2]);
    std::vector<double> times(130);
    for (std::size_t k = 0; k < times.size(); ++k) times[k] = 0.37 * static_cast<double>(k);
    const TrajectoryOptions opts{.distributions = true, .environment_entropy = true};
    const auto a = observe_trajectory(m, prep.eigen, times, opts);
    const auto b = observe_trajectory_serial(m, prep.eigen, times, opts);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].record.time == b[k].record.time);
        CHECK(std::abs(a[k].record.entropy - b[k].record.entropy) < 1e-10);
        CHECK(std::abs(a[k].record.e_sys - b[k].record.e_sys) < 1e-10);
        CHECK(std::abs(a[k].record.e_env - b[k].record.e_env) < 1e-10);
        CHECK(std::abs(a[k].record.e_int - b[k].record.e_int) < 1e-10);
        CHECK(std::abs(a[k].env_entropy - b[k].env_entropy) < 1e-10);
        CHECK((a[k].p_sys - b[k].p_sys).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((a[k].p_env - b[k].p_env).cwiseAbs().maxCoeff() < 1e-10);
    }
    // First moment of P_s is <H_s>.
    for (const auto& s : a) CHECK(std::abs(s.p_sys.dot(m.system_spectrum.eigenvalues) - s.record.e_sys) < 1e-8);
}

TEST_CASE("reruns are bit-identical") {
    const Model& m = coupled_model();
    const auto a = run_equilibration(m, small_ics()[0], short_grid());
    const auto b = run_equilibration(m, small_ics()[0], short_grid());
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(TimeSeriesRecord)) == 0);
    const Model again = build_model(small_params(0.3));
    CHECK((again.world.eigenvalues - m.world.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("window statistics") {
    std::vector<double> v(100);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = (k % 2 == 0) ? 1.0 : -1.0;
    const auto s = window_stats(v);
    CHECK(s.mean == 0.0);
    CHECK(s.stddev == 1.0);
    CHECK(s.std_error == 0.0);

    std::vector<double> ramp(100);
    std::iota(ramp.begin(), ramp.end(), 0.0);
    const auto r = window_stats(ramp);
    CHECK(r.mean == doctest::Approx(49.5));
    // Batch means 4.5, 14.5, ..., 94.5: sd 30.2765, se = sd / sqrt(10).
    CHECK(r.std_error == doctest::Approx(std::sqrt(9166.6666666666667 / 10.0 / 10.0)).epsilon(1e-10));
    CHECK(spread(std::vector<double>{1.0, 3.0}) == 1.0);
    CHECK_ERROR_KIND(window_stats(std::vector<double>(49, 1.0)), ErrorKind::Config);

    CHECK(late_window_begin(1000, 0.25) == 750);
    CHECK(late_window_begin(1000, 1.0) == 0);
    CHECK_ERROR_KIND(late_window_begin(1000, 0.0), ErrorKind::Config);
    std::vector<TimeSeriesRecord> recs(100);
    CHECK_ERROR_KIND(equilibrium_stats(recs, 0.25, 0.0), ErrorKind::Config);
}

TEST_CASE("late-window mean approaches the diagonal ensemble") {
    const Model& m = coupled_model();
    for (const auto& ic : small_ics()) {
        const PreparedState prep = prepare_initial_state(m, ic);
        const auto recs = run_equilibration(m, prep.eigen, TimeGrid{0.0, 1000});
        const auto d = diagonal_energies(m, prep.eigen);
        const auto st = equilibrium_stats(recs, kDefaultLateFraction, d.e_sys);
        CHECK(st.n_samples == 250);
        CHECK(st.dephasing_gap <= 4.0 * st.e_sys.std_error + 1e-12);
        CHECK(std::abs(st.e_env.mean - d.e_env) <= 4.0 * st.e_env.std_error + 1e-12);
    }
}

TEST_CASE("dephasing comparison") {
    const Model& m = coupled_model();
    const auto c = run_dephasing_comparison(m, small_ics()[1], TimeGrid{0.0, 1000}, 3, 1);
    CHECK(c.randomized.size() == 3);
    CHECK(c.p_world_max_difference < 1e-15);
    CHECK(c.converged(4.0));
    // Randomized run starts already close to the plateau.
    CHECK(std::abs(c.randomized[0].front().entropy - c.ordinary_stats.entropy.mean) <
          0.25 * c.ordinary_stats.entropy.mean);
    CHECK(c.ordinary.front().entropy < 1e-10);
    const PairGap g{1.0, 0.5};
    CHECK(g.ratio() == 2.0);
}

TEST_CASE("classification thresholds") {
    CHECK(classify(1.0, 1.0) == ThermalizationVerdict::Converged);
    CHECK(classify(3.0, 1.0) == ThermalizationVerdict::Inconclusive);
    CHECK(classify(6.0, 1.0) == ThermalizationVerdict::NotConverged);
    CHECK(classify(0.0, 0.0) == ThermalizationVerdict::Converged);
    CHECK(classify(1e-3, 0.0) == ThermalizationVerdict::NotConverged);
    CHECK(std::string(to_string(ThermalizationVerdict::NotConverged)) == "not_converged");
}

TEST_CASE("uncoupled limit") {
    const Model& m = uncoupled_model();
    const auto ics = small_ics();
    const ScanSettings settings{short_grid(), kDefaultLateFraction, 10};
    const CouplingScan scan = scan_coupling(m, ics, settings);
    CHECK(scan.sigma_ic == doctest::Approx(scan.initial_spread).epsilon(1e-12));
    CHECK(std::abs(scan.fluctuation_scale) < 1e-10);
    for (const auto& run : scan.runs) {
        CHECK(std::abs(run.stats.e_sys.mean - run.initial.e_sys) < 1e-10);
        CHECK(std::abs(run.initial.e_int) < 1e-10);
        CHECK(total_variation(run.initial_p_sys, run.late_p_sys) < 1e-10);
        CHECK(total_variation(run.initial_p_env, run.late_p_env) < 1e-10);
    }
    const PreparedState prep = prepare_initial_state(m, ics[0]);
    const auto samples = observe_trajectory(m, prep.eigen, resolve_grid(short_grid(), m.world).times(),
                                            {.distributions = true});
    for (const auto& s : samples) {
        CHECK(std::abs(s.record.e_sys - samples.front().record.e_sys) < 1e-10);
        CHECK(std::abs(s.record.e_env - samples.front().record.e_env) < 1e-10);
        CHECK(std::abs(s.record.e_int) < 1e-10);
        CHECK(std::abs(s.record.entropy) < 1e-10);
        CHECK((s.p_sys - samples.front().p_sys).cwiseAbs().maxCoeff() < 1e-10);
    }
    const auto all = spread_selection(m.world.dim(), m.world.dim());
    for (const auto& prof : eigenstate_scan(m, all, 10)) {
        CHECK(std::abs(*std::max_element(prof.p_sys.probabilities.begin(), prof.p_sys.probabilities.end()) - 1.0) < 1e-10);
        CHECK(std::abs(*std::max_element(prof.p_env.probabilities.begin(), prof.p_env.probabilities.end()) - 1.0) < 1e-10);
    }
}

TEST_CASE("thermalization scan over couplings") {
    const std::vector<double> couplings = {0.0, 0.3};
    const ScanSettings settings{short_grid(), kDefaultLateFraction, 10};
    const auto ics = small_ics();
    const auto scans = thermalization_scan(small_params(0.0), couplings, ics, settings);
    REQUIRE(scans.size() == 2);
    CHECK(scans[0].coupling == 0.0);
    CHECK(scans[1].coupling == 0.3);
    for (const auto& s : scans) {
        CHECK(s.runs.size() == ics.size());
        CHECK(s.mean_tv_sys >= 0.0);
        CHECK(s.mean_tv_sys <= 1.0);
        for (const auto& r : s.runs) {
            CHECK(r.late_p_sys.total() == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(r.late_p_env.total() == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(r.late_p_env.probabilities.size() == 10);
            CHECK(r.effective_dimension >= 1.0);
        }
    }
    CHECK(scans[0].sigma_ic > scans[1].sigma_ic);
}

TEST_CASE("selections") {
    CHECK(spread_selection(10, 1) == std::vector<std::size_t>{0});
    CHECK(spread_selection(10, 4) == std::vector<std::size_t>{0, 3, 6, 9});
    CHECK(spread_selection(3, 5) == std::vector<std::size_t>{0, 1, 2});
    CHECK(adjacent_triple(10, 0) == std::vector<std::size_t>{0, 1, 2});
    CHECK(adjacent_triple(10, 5) == std::vector<std::size_t>{4, 5, 6});
    CHECK(adjacent_triple(10, 9) == std::vector<std::size_t>{7, 8, 9});
    CHECK(adjacent_triple(2, 1) == std::vector<std::size_t>{0, 1});
    CHECK_ERROR_KIND(adjacent_triple(10, 10), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(eigenstate_scan(coupled_model(), std::vector<std::size_t>{192}, 10), ErrorKind::InvalidArgument);
}

TEST_CASE("adjacent eigenstates differ more without coupling") {
    const double weak = mean_adjacent_tv_sys_mid(uncoupled_model());
    const double strong = mean_adjacent_tv_sys_mid(coupled_model());
    CHECK(weak > strong);
    CHECK(weak <= 1.0);
}

TEST_CASE("effective dimension table") {
    const std::vector<DeffInput> in = {{0.1, {10.0, 20.0}}, {0.02, {4.0, 4.0}}};
    const auto rows = deff_table(in, 100, 0.1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mean_deff_over_nw == doctest::Approx(0.15));
    CHECK(rows[0].delta_pct == doctest::Approx(100.0 * 5.0 / 15.0));
    CHECK(rows[0].pct_of_reference == doctest::Approx(100.0));
    CHECK(rows[1].delta_pct == 0.0);
    CHECK(rows[1].pct_of_reference == doctest::Approx(100.0 * 0.04 / 0.15));
    CHECK_ERROR_KIND(deff_table(in, 100, 0.5), ErrorKind::Config);

    // Vacuum oscillator times an environment eigenstate is a world eigenstate
    // when uncoupled: a delta-function energy distribution.
    const Model& m = uncoupled_model();
    std::vector<InitialConditionSpec> ics;
    for (std::size_t j : {4u, 9u, 15u}) ics.push_back({j, 0.5 + m.environment_spectrum.eigenvalues(static_cast<Eigen::Index>(j)), 0.0});
    const auto deff = state_effective_dimensions(m, ics);
    for (double d : deff) CHECK(std::abs(d - 1.0) < 1e-10);
    const std::vector<DeffInput> delta_in = {{0.0, deff}};
    CHECK(deff_table(delta_in, m.world.dim(), 0.0)[0].mean_deff_over_nw ==
          doctest::Approx(1.0 / static_cast<double>(m.world.dim())).epsilon(1e-10));

    const auto coupled = state_effective_dimensions(coupled_model(), small_ics());
    const auto uncoupled = state_effective_dimensions(m, small_ics());
    CHECK(std::accumulate(coupled.begin(), coupled.end(), 0.0) > std::accumulate(uncoupled.begin(), uncoupled.end(), 0.0));
}

TEST_CASE("ETH diagnostic") {
    for (const Model* m : {&uncoupled_model(), &coupled_model()}) {
        const ScanSettings settings{short_grid(), kDefaultLateFraction, 10};
        const auto ics = small_ics();
        const CouplingScan scan = scan_coupling(*m, ics, settings);
        std::vector<EigenbasisState> states;
        std::vector<EnergyDistribution> ls, le;
        for (std::size_t j = 0; j < ics.size(); ++j) {
            states.push_back(prepare_initial_state(*m, ics[j]).eigen);
            ls.push_back(scan.runs[j].late_p_sys);
            le.push_back(scan.runs[j].late_p_env);
        }
        const EthReport r = eth_diagnostic(*m, states, ls, le, 10);
        REQUIRE(r.states.size() == ics.size());
        for (std::size_t j = 0; j < ics.size(); ++j) {
            const auto& s = r.states[j];
            Eigen::Index peak = 0;
            states[j].amplitudes.cwiseAbs2().maxCoeff(&peak);
            CHECK(s.peak_index == static_cast<std::size_t>(peak));
            CHECK(s.selected.size() == 3);
            CHECK(std::find(s.selected.begin(), s.selected.end(), s.peak_index) != s.selected.end());
            for (double tv : s.tv_sys_to_late) {
                CHECK(tv >= 0.0);
                CHECK(tv <= 1.0 + 1e-12);
            }
        }
        if (m == &uncoupled_model()) {
            const auto prof = eigenstate_scan(*m, r.states[0].selected, 10);
            for (const auto& p : prof)
                CHECK(*std::max_element(p.p_sys.probabilities.begin(), p.p_sys.probabilities.end()) ==
                      doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    CHECK_ERROR_KIND(eth_diagnostic(coupled_model(), {}, {}, {}, 10), ErrorKind::InvalidArgument);
}

TEST_CASE("model construction checks the decomposition source") {
    const Model& m = coupled_model();
    CHECK_ERROR_KIND(make_model(small_params(0.2), m.world), ErrorKind::Dependency);
    const Model again = make_model(small_params(0.3), m.world);
    CHECK(again.world.dim() == 192);
}
