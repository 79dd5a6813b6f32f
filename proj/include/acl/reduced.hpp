#pragma once

#include "acl/kernels.hpp"
#include "acl/spectral.hpp"
#include "acl/types.hpp"

#include <cstddef>
#include <vector>

namespace acl {

enum class Subsystem { System, Environment };

// Hermitian, trace one. Positivity is checked where eigenvalues are computed
// (entanglement_entropy).
struct DensityMatrix {
    ComplexMatrix matrix;
    Subsystem space = Subsystem::System;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
};

using SubsystemDims = kernels::Dims;

DensityMatrix partial_trace(const PureState& state, Subsystem keep, SubsystemDims dims);

enum class LogBase { Natural, Two };

// -sum lambda ln lambda. Eigenvalues in [-1e-10, 0) are treated as zero;
// anything more negative throws ErrorKind::Numerical (invalid density).
double entanglement_entropy(const DensityMatrix& rho, LogBase base = LogBase::Natural);
double entropy_of_spectrum(const RealVector& eigenvalues, LogBase base = LogBase::Natural);

struct EnergyDistribution {
    std::vector<double> energies;       // ascending; bin centers when binned
    std::vector<double> probabilities;
    std::vector<double> bin_edges;      // empty unless binned (size = bins + 1)

    bool binned() const noexcept { return !bin_edges.empty(); }
    double total() const noexcept;
    double mean_energy() const noexcept;
};

// p_k = <E_k|rho|E_k> in the eigenbasis of the subsystem self-Hamiltonian.
EnergyDistribution energy_distribution(const DensityMatrix& rho, const SpectralDecomposition& subsystem);
// Same from a probability vector already expressed on the eigenvalue grid.
EnergyDistribution distribution_on_grid(const RealVector& energies, const RealVector& probabilities);

// Uniform bins over [min energy, max energy] of the grid, last bin closed.
EnergyDistribution bin_distribution(const EnergyDistribution& dist, std::size_t n_bins);

// P_w(E_i) = |alpha_i|^2 on the world eigenvalue grid.
EnergyDistribution world_energy_distribution(const EigenbasisState& state, const SpectralDecomposition& world);

// 1 / sum p_i^2 over an unbinned distribution.
double effective_dimension(const EnergyDistribution& dist);

// (1/2) sum |p - q| on a shared grid (same energies, same edges).
double total_variation(const EnergyDistribution& a, const EnergyDistribution& b);
double total_variation(const RealVector& p, const RealVector& q);

inline constexpr std::size_t kDefaultBins = 30;

}  // namespace acl
