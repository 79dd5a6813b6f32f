#include "acl/hamiltonian.hpp"
#include "acl/randmat.hpp"
#include "acl/reduced.hpp"
#include "acl/spectral.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace acl;

namespace {

PureState random_state(std::size_t n) {
    return PureState::normalized(ComplexVector::Random(static_cast<Eigen::Index>(n)));
}

}  // namespace

TEST_CASE("product states reduce to pure projectors") {
    const SubsystemDims dims{3, 4};
    const PureState s = PureState::product(PureState::basis(3, 2), PureState::basis(4, 1));
    const auto rho = partial_trace(s, Subsystem::System, dims);
    ComplexMatrix expected = ComplexMatrix::Zero(3, 3);
    expected(2, 2) = 1.0;
    CHECK((rho.matrix - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(entanglement_entropy(rho) == 0.0);
    CHECK(entanglement_entropy(partial_trace(s, Subsystem::Environment, dims)) == 0.0);
}

TEST_CASE("Bell state reduces to the maximally mixed qubit") {
    ComplexVector v = ComplexVector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    const auto rho = partial_trace(PureState(v), Subsystem::System, {2, 2});
    CHECK((rho.matrix - 0.5 * ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(entanglement_entropy(rho) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(entanglement_entropy(rho, LogBase::Two) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("random 2x3 state matches the double-loop oracle") {
    for (int trial = 0; trial < 5; ++trial) {
        const PureState s = random_state(6);
        const std::vector<cplx> psi(s.amplitudes().data(), s.amplitudes().data() + 6);
        const auto rs = partial_trace(s, Subsystem::System, {2, 3});
        const auto re = partial_trace(s, Subsystem::Environment, {2, 3});
        const auto ref_s = oracle::trace_out_environment(psi, 2, 3);
        CHECK(oracle::max_diff(ref_s, rs.matrix) < 1e-12);
        CHECK(oracle::max_diff(oracle::trace_out_system(psi, 2, 3), re.matrix) < 1e-12);
        CHECK(std::abs(entanglement_entropy(rs) - oracle::entropy_2x2(ref_s)) < 1e-12);
    }
}

TEST_CASE("entropy of standard spectra") {
    DensityMatrix pure{ComplexMatrix::Zero(3, 3)};
    pure.matrix(1, 1) = 1.0;
    CHECK(entanglement_entropy(pure) == 0.0);
    for (int n : {2, 5, 30}) {
        DensityMatrix mixed{ComplexMatrix::Identity(n, n) / static_cast<double>(n)};
        CHECK(entanglement_entropy(mixed) == doctest::Approx(std::log(static_cast<double>(n))).epsilon(1e-13));
    }
    CHECK(entropy_of_spectrum(RealVector{{0.5, 0.5, -5e-11}}) == doctest::Approx(std::log(2.0)));
    CHECK_ERROR_KIND(entropy_of_spectrum(RealVector{{0.5, 0.5, -1e-6}}), ErrorKind::Numerical);
}

TEST_CASE("Schmidt symmetry and entropy bounds") {
    for (auto dims : {SubsystemDims{2, 3}, SubsystemDims{5, 4}, SubsystemDims{10, 120}}) {
        for (int trial = 0; trial < 3; ++trial) {
            const PureState s = random_state(dims.world());
            const double ss = entanglement_entropy(partial_trace(s, Subsystem::System, dims));
            const double se = entanglement_entropy(partial_trace(s, Subsystem::Environment, dims));
            CHECK(std::abs(ss - se) < 1e-8);
            CHECK(ss >= 0.0);
            CHECK(ss <= std::log(static_cast<double>(std::min(dims.n_sys, dims.n_env))) + 1e-12);
        }
    }
}

TEST_CASE("subsystem energy distributions") {
    ModelParams p;
    p.n_sys = 4;
    p.n_env = 9;
    p.coupling = 0.5;
    p.seed = 3;
    const ModelTerms terms = build_terms(p);
    const auto sys = decompose(terms.h_sys);
    const auto env = decompose(terms.h_env);
    const WorldOperators ops = assemble_world(p);
    const SubsystemDims dims{4, 9};

    const PureState s = random_state(36);
    const auto ps = energy_distribution(partial_trace(s, Subsystem::System, dims), sys);
    const auto pe = energy_distribution(partial_trace(s, Subsystem::Environment, dims), env);
    CHECK(ps.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pe.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(ps.mean_energy() - expectation(ops.system, s)) < 1e-8);
    CHECK(std::abs(pe.mean_energy() - expectation(ops.environment, s)) < 1e-8);

    // |E_k> of the environment gives a delta at k.
    const PureState ek = PureState::product(PureState::basis(4, 0), PureState(env.eigenvectors.col(5)));
    const auto delta = energy_distribution(partial_trace(ek, Subsystem::Environment, dims), env);
    for (std::size_t k = 0; k < 9; ++k) CHECK(std::abs(delta.probabilities[k] - (k == 5 ? 1.0 : 0.0)) < 1e-12);
    CHECK(effective_dimension(delta) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("binning") {
    const RealVector e{{-1.0, -0.2, 0.0, 0.4, 2.0}};
    const RealVector p{{0.1, 0.2, 0.3, 0.15, 0.25}};
    const auto d = distribution_on_grid(e, p);
    const auto one = bin_distribution(d, 1);
    REQUIRE(one.probabilities.size() == 1);
    CHECK(one.probabilities[0] == doctest::Approx(1.0));
    CHECK(one.bin_edges.front() == -1.0);
    CHECK(one.bin_edges.back() == 2.0);

    const auto three = bin_distribution(d, 3);
    // Edges -1, 0, 1, 2; an energy on an interior edge belongs to the upper bin.
    CHECK(three.probabilities[0] == doctest::Approx(0.3));
    CHECK(three.probabilities[1] == doctest::Approx(0.45));
    CHECK(three.probabilities[2] == doctest::Approx(0.25));
    CHECK(three.total() == doctest::Approx(1.0));

    const auto delta = distribution_on_grid(e, RealVector{{0.0, 0.0, 0.0, 1.0, 0.0}});
    const auto db = bin_distribution(delta, 6);
    for (std::size_t b = 0; b < 6; ++b) {
        const bool contains = db.bin_edges[b] <= 0.4 && 0.4 < db.bin_edges[b + 1];
        CHECK(db.probabilities[b] == (contains ? 1.0 : 0.0));
    }
    CHECK_ERROR_KIND(bin_distribution(d, 0), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(bin_distribution(three, 2), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(effective_dimension(three), ErrorKind::InvalidArgument);
}

TEST_CASE("world distribution and effective dimension") {
    const auto d = decompose(sample_hermitian({40, 1, MatrixLabel::Environment}));
    const auto k = to_eigenbasis(d, PureState(d.eigenvectors.col(12)));
    const auto pw = world_energy_distribution(k, d);
    for (std::size_t i = 0; i < 40; ++i) CHECK(std::abs(pw.probabilities[i] - (i == 12 ? 1.0 : 0.0)) < 1e-12);
    CHECK(effective_dimension(pw) == doctest::Approx(1.0).epsilon(1e-10));

    EigenbasisState uniform{ComplexVector::Constant(40, 1.0 / std::sqrt(40.0)), {}};
    CHECK(effective_dimension(world_energy_distribution(uniform, d)) == doctest::Approx(40.0).epsilon(1e-12));

    const auto s = to_eigenbasis(d, random_state(40));
    const double deff = effective_dimension(world_energy_distribution(s, d));
    CHECK(deff == doctest::Approx(effective_dimension(world_energy_distribution(evolve(s, d, 12.3), d))).epsilon(1e-12));
    CHECK(deff == doctest::Approx(effective_dimension(world_energy_distribution(randomize_phases(s, 4), d))).epsilon(1e-12));
}

TEST_CASE("total variation") {
    const RealVector p{{0.5, 0.5, 0.0}}, q{{0.0, 0.5, 0.5}};
    CHECK(total_variation(p, q) == doctest::Approx(0.5));
    CHECK(total_variation(q, p) == total_variation(p, q));
    CHECK(total_variation(p, p) == 0.0);
    const RealVector e{{0.0, 1.0, 2.0}};
    CHECK(total_variation(distribution_on_grid(e, RealVector{{1.0, 0.0, 0.0}}),
                          distribution_on_grid(e, RealVector{{0.0, 0.0, 1.0}})) == 1.0);
    CHECK_ERROR_KIND(total_variation(distribution_on_grid(e, p), distribution_on_grid(RealVector{{0.0, 1.0, 3.0}}, q)),
                     ErrorKind::DimensionMismatch);
}

TEST_CASE("partial trace dimension checks") {
    CHECK_ERROR_KIND(partial_trace(random_state(6), Subsystem::System, {2, 4}), ErrorKind::DimensionMismatch);
}
