#pragma once

#include "acl/types.hpp"

#include <complex>
#include <cstddef>

namespace acl {

// Truncated SHO on levels n = 0..dimension-1, units hbar*omega = 1.
struct OscillatorSpace {
    std::size_t dimension = 2;
    double frequency = 1.0;

    void validate() const;
};

// <n-1|a|n> = sqrt(n).
ComplexMatrix lowering_operator(const OscillatorSpace& space);

// diag((n + 1/2) * frequency).
HermitianOperator sho_hamiltonian(const OscillatorSpace& space);

// (a + a^dagger) / sqrt(2).
HermitianOperator position_operator(const OscillatorSpace& space);

inline constexpr double kLeakageWarningThreshold = 1e-6;

struct CoherentState {
    PureState state;
    // Probability on the top oscillator level.
    double top_level_weight = 0.0;
    bool leakage_warning = false;
};

// exp(alpha a^dagger - conj(alpha) a)|0> on the truncated space, computed
// through the eigendecomposition of the Hermitian generator i(alpha a^dagger - conj(alpha) a)
// and renormalized.
CoherentState coherent_state(const OscillatorSpace& space, std::complex<double> alpha);

}  // namespace acl
