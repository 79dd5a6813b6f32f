#include "acl/hamiltonian.hpp"

#include "acl/error.hpp"
#include "acl/kernels.hpp"
#include "acl/randmat.hpp"

#include <cmath>
#include <new>
#include <sstream>

namespace acl {

void ModelParams::validate() const {
    require(n_sys >= 2, ErrorKind::Config, "ModelParams: n_sys must be >= 2");
    require(n_env >= 1, ErrorKind::Config, "ModelParams: n_env must be >= 1");
    require(std::isfinite(env_scale) && std::isfinite(coupling) && std::isfinite(env_offset) &&
                std::isfinite(coupling_offset),
            ErrorKind::Config, "ModelParams: energy scales must be finite");
}

Fingerprint ModelParams::fingerprint() const {
    std::ostringstream os;
    os << "acl-model-v1;rng=xoshiro256ss-splitmix64;order=upper-row-major-re-im"
       << ";n_sys=" << n_sys << ";n_env=" << n_env << ";env_scale=" << hex_double(env_scale)
       << ";coupling=" << hex_double(coupling) << ";env_offset=" << hex_double(env_offset)
       << ";coupling_offset=" << hex_double(coupling_offset) << ";seed=" << seed;
    return sha256(os.str());
}

HermitianOperator build_environment(const ModelParams& params) {
    params.validate();
    const auto r = sample_hermitian({params.n_env, params.seed, MatrixLabel::Environment});
    return r.scaled(params.env_scale).plus_identity(params.env_offset);
}

HermitianOperator build_interaction_env(const ModelParams& params) {
    params.validate();
    const auto r = sample_hermitian({params.n_env, params.seed, MatrixLabel::Interaction});
    return r.scaled(params.coupling).plus_identity(params.coupling_offset);
}

ModelTerms build_terms(const ModelParams& params) {
    params.validate();
    const OscillatorSpace space{params.n_sys, 1.0};
    return ModelTerms{params.n_sys,
                      params.n_env,
                      sho_hamiltonian(space),
                      position_operator(space),
                      build_environment(params),
                      build_interaction_env(params)};
}

std::size_t dense_matrix_bytes(std::size_t n) noexcept { return n * n * sizeof(cplx); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

namespace {

[[noreturn]] void allocation_failed(std::size_t n_w, std::size_t count) {
    std::ostringstream os;
    os << "cannot allocate " << count << " dense " << n_w << "x" << n_w << " complex matrices ("
       << count * dense_matrix_bytes(n_w) << " bytes requested)";
    throw Error(ErrorKind::Resource, os.str());
}

}  // namespace

HermitianOperator assemble_world_hamiltonian(const ModelTerms& terms) {
    const std::size_t nw = terms.n_sys * terms.n_env;
    try {
        const auto ns = static_cast<Eigen::Index>(terms.n_sys);
        const auto ne = static_cast<Eigen::Index>(terms.n_env);
        ComplexMatrix h = ComplexMatrix::Zero(ns * ne, ns * ne);
        const ComplexMatrix& hs = terms.h_sys.matrix();
        const ComplexMatrix& q = terms.q_sys.matrix();
        const ComplexMatrix& he = terms.h_env.matrix();
        const ComplexMatrix& hi = terms.h_int_env.matrix();
        // Same per-element addition order as system + interaction + environment.
        for (Eigen::Index s = 0; s < ns; ++s) {
            for (Eigen::Index s2 = 0; s2 < ns; ++s2) {
                auto block = h.block(s * ne, s2 * ne, ne, ne);
                if (hs(s, s2) != cplx(0.0)) block.diagonal().array() += hs(s, s2);
                if (q(s, s2) != cplx(0.0)) block += q(s, s2) * hi;
                if (s == s2) block += he;
            }
        }
        return HermitianOperator(std::move(h));
    } catch (const std::bad_alloc&) {
        allocation_failed(nw, 1);
    }
}

WorldOperators assemble_world(const ModelParams& params) {
    params.validate();
    const std::size_t nw = params.world_dim();
    try {
        const ModelTerms terms = build_terms(params);
        const auto ne = static_cast<Eigen::Index>(params.n_env);
        const auto ns = static_cast<Eigen::Index>(params.n_sys);
        HermitianOperator system(kron(terms.h_sys.matrix(), ComplexMatrix::Identity(ne, ne)));
        HermitianOperator environment(kron(ComplexMatrix::Identity(ns, ns), terms.h_env.matrix()));
        HermitianOperator interaction(kron(terms.q_sys.matrix(), terms.h_int_env.matrix()));
        HermitianOperator world = system + interaction + environment;
        return WorldOperators{std::move(world), std::move(system), std::move(environment), std::move(interaction)};
    } catch (const std::bad_alloc&) {
        allocation_failed(nw, 4);
    }
}

double expectation(const HermitianOperator& op, const PureState& state) {
    require(op.dim() == state.dim(), ErrorKind::DimensionMismatch, "expectation: dimension mismatch");
    const cplx value = kernels::parallel::expectation(op.matrix(), state.view());
    require(std::abs(value.imag()) <= 1e-10, ErrorKind::Numerical,
            "expectation: imaginary part exceeds 1e-10; operator or state corrupted");
    return value.real();
}

}  // namespace acl
