#pragma once

#include "acl/fingerprint.hpp"
#include "acl/oscillator.hpp"
#include "acl/types.hpp"

#include <cstddef>
#include <cstdint>

namespace acl {

struct ModelParams {
    std::size_t n_sys = 30;
    std::size_t n_env = 600;
    double env_scale = 1.0;        // E_e
    double coupling = 0.1;         // E_I
    double env_offset = 0.0;       // E0_e
    double coupling_offset = 0.0;  // E0_I
    std::uint64_t seed = 0;

    std::size_t world_dim() const noexcept { return n_sys * n_env; }
    void validate() const;
    // SHA-256 of a canonical encoding of every field plus the generator
    // revision; keys the decomposition cache.
    Fingerprint fingerprint() const;
};

// The small factors H_w is built from. Enough to evaluate every lifted
// expectation value without forming N_w x N_w operators.
struct ModelTerms {
    std::size_t n_sys = 0;
    std::size_t n_env = 0;
    HermitianOperator h_sys;      // H_s
    HermitianOperator q_sys;      // q_s
    HermitianOperator h_env;      // H_e = E_e R^e + E0_e
    HermitianOperator h_int_env;  // H_e^I = E_I R_I^e + E0_I
};

HermitianOperator build_environment(const ModelParams& params);
HermitianOperator build_interaction_env(const ModelParams& params);
ModelTerms build_terms(const ModelParams& params);

// Lifted operators under the system-major convention k = i_s * N_e + i_e.
struct WorldOperators {
    HermitianOperator world;        // H_w
    HermitianOperator system;       // H_s (x) 1
    HermitianOperator environment;  // 1 (x) H_e
    HermitianOperator interaction;  // q_s (x) H_e^I
};

// Bytes of one dense N x N complex<double> matrix.
std::size_t dense_matrix_bytes(std::size_t n) noexcept;

// Throws ErrorKind::Resource (naming the byte count) when allocation fails.
WorldOperators assemble_world(const ModelParams& params);
// H_w alone; the path used when only the spectrum is needed.
HermitianOperator assemble_world_hamiltonian(const ModelTerms& terms);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// <psi|op|psi>; throws if the imaginary part exceeds 1e-10.
double expectation(const HermitianOperator& op, const PureState& state);

}  // namespace acl
