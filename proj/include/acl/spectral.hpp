#pragma once

#include "acl/fingerprint.hpp"
#include "acl/hamiltonian.hpp"
#include "acl/types.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace acl {

struct SpectralDecomposition {
    RealVector eigenvalues;     // ascending
    ComplexMatrix eigenvectors; // orthonormal columns
    Fingerprint source{};       // ModelParams fingerprint; zero when not model-derived

    std::size_t dim() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
};

// Full dense Hermitian eigendecomposition (LAPACK zheevd). On solver
// failure throws ErrorKind::Numerical carrying the failing index.
SpectralDecomposition decompose(const HermitianOperator& h, const Fingerprint& source = {});
// Consumes the matrix storage; avoids a second N x N buffer at large N.
SpectralDecomposition decompose(ComplexMatrix&& h, const Fingerprint& source = {});

// Bytes needed by decompose() at dimension n, including LAPACK workspace.
std::size_t decomposition_bytes(std::size_t n) noexcept;

struct DecompositionQuality {
    double operator_norm = 0.0;       // max |lambda|
    double max_residual = 0.0;        // max_k ||H v_k - lambda_k v_k||_2
    double max_orthogonality = 0.0;   // max |V^dagger V - I|
    bool meets_contract() const noexcept;
};

DecompositionQuality check_quality(const HermitianOperator& h, const SpectralDecomposition& d);

// Cheap check for the world Hamiltonian: residuals of `columns` evenly spaced
// eigenpairs via the structured product, and |V^dagger V x - x| for a random
// unit probe x in place of the full Gram matrix.
DecompositionQuality spot_check(const ModelTerms& terms, const SpectralDecomposition& d, std::size_t columns = 16);

// H_w |psi> from the small factors.
ComplexVector apply_world(const ModelTerms& terms, const ComplexVector& psi);

// Decomposes H_w and spot-checks the result. A failed check (seen with some
// OpenBLAS kernel selections) triggers one retry with Eigen's solver, with a
// warning on stderr; a second failure throws ErrorKind::Numerical.
SpectralDecomposition decompose_world(const ModelTerms& terms, const Fingerprint& source = {});

struct EigenbasisState {
    ComplexVector amplitudes;  // alpha_i = <E_i|psi>
    Fingerprint reference{};
};

EigenbasisState to_eigenbasis(const SpectralDecomposition& d, const PureState& state);
PureState from_eigenbasis(const SpectralDecomposition& d, const EigenbasisState& state);

// alpha_i(t) = exp(-i E_i t) alpha_i(0), hbar = 1.
EigenbasisState evolve(const EigenbasisState& state, const SpectralDecomposition& d, double t);

// alpha_i -> exp(i theta_i) alpha_i, theta_i uniform on [0, 2 pi) from the
// phase stream of `seed`.
EigenbasisState randomize_phases(const EigenbasisState& state, std::uint64_t seed);

// <E_i|op|E_i> for every eigenvector.
RealVector eigenstate_expectations(const SpectralDecomposition& d, const HermitianOperator& op);

// sum_i |alpha_i|^2 <E_i|op|E_i>
double diagonal_ensemble_expectation(const EigenbasisState& state, const SpectralDecomposition& d,
                                     const HermitianOperator& op);

// Per-eigenvector expectations of the lifted subsystem operators, computed
// from the small factors.
struct EigenstateEnergies {
    RealVector system;
    RealVector environment;
    RealVector interaction;
};
EigenstateEnergies eigenstate_energies(const SpectralDecomposition& d, const ModelTerms& terms);

// Cache file layout (little-endian):
//   "ACLW" | u32 version | u64 N | 32-byte fingerprint |
//   N f64 eigenvalues | N*N (re, im) f64 pairs, column-major eigenvectors.
inline constexpr std::uint32_t kCacheVersion = 1;

void write_cache(const std::filesystem::path& path, const SpectralDecomposition& d);
// Verifies magic, version, and (unless `expected` is empty) the fingerprint.
SpectralDecomposition read_cache(const std::filesystem::path& path, const Fingerprint* expected);

}  // namespace acl
