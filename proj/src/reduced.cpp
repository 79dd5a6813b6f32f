#include "acl/reduced.hpp"

#include "acl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace acl {

DensityMatrix partial_trace(const PureState& state, Subsystem keep, SubsystemDims dims) {
    require(state.dim() == dims.world(), ErrorKind::DimensionMismatch,
            "partial_trace: state length " + std::to_string(state.dim()) + " != n_sys * n_env");
    if (keep == Subsystem::System) {
        return {kernels::parallel::reduce_to_system(state.view(), dims), Subsystem::System};
    }
    return {kernels::parallel::reduce_to_environment(state.view(), dims), Subsystem::Environment};
}

double entropy_of_spectrum(const RealVector& eigenvalues, LogBase base) {
    double s = 0.0;
    for (const double lambda : eigenvalues) {
        if (lambda < -1e-10) {
            throw Error(ErrorKind::Numerical,
                        "entanglement_entropy: invalid density matrix, eigenvalue " + std::to_string(lambda));
        }
        if (lambda > 0.0) s -= lambda * std::log(lambda);
    }
    return base == LogBase::Two ? s / std::numbers::ln2 : s;
}

double entanglement_entropy(const DensityMatrix& rho, LogBase base) {
    require(rho.matrix.rows() == rho.matrix.cols() && rho.matrix.rows() > 0, ErrorKind::DimensionMismatch,
            "entanglement_entropy: density matrix must be square and non-empty");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho.matrix, Eigen::EigenvaluesOnly);
    require(solver.info() == Eigen::Success, ErrorKind::Numerical, "entanglement_entropy: eigensolver failed");
    return entropy_of_spectrum(solver.eigenvalues(), base);
}

double EnergyDistribution::total() const noexcept {
    double t = 0.0;
    for (double p : probabilities) t += p;
    return t;
}

double EnergyDistribution::mean_energy() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < energies.size(); ++i) m += energies[i] * probabilities[i];
    return m;
}

EnergyDistribution distribution_on_grid(const RealVector& energies, const RealVector& probabilities) {
    require(energies.size() == probabilities.size(), ErrorKind::DimensionMismatch,
            "distribution_on_grid: length mismatch");
    EnergyDistribution out;
    out.energies.assign(energies.begin(), energies.end());
    out.probabilities.resize(out.energies.size());
    for (Eigen::Index k = 0; k < probabilities.size(); ++k) {
        // Rounding can leave -1e-17 on empty levels.
        out.probabilities[k] = std::max(probabilities(k), 0.0);
    }
    return out;
}

EnergyDistribution energy_distribution(const DensityMatrix& rho, const SpectralDecomposition& subsystem) {
    require(rho.dim() == subsystem.dim(), ErrorKind::DimensionMismatch, "energy_distribution: dimension mismatch");
    const ComplexMatrix& u = subsystem.eigenvectors;
    const ComplexMatrix applied = rho.matrix * u;
    const RealVector p = u.conjugate().cwiseProduct(applied).colwise().sum().real().transpose();
    return distribution_on_grid(subsystem.eigenvalues, p);
}

EnergyDistribution bin_distribution(const EnergyDistribution& dist, std::size_t n_bins) {
    require(n_bins >= 1, ErrorKind::InvalidArgument, "bin_distribution: n_bins must be >= 1");
    require(!dist.binned(), ErrorKind::InvalidArgument, "bin_distribution: input is already binned");
    require(!dist.energies.empty(), ErrorKind::InvalidArgument, "bin_distribution: empty distribution");
    const auto [lo_it, hi_it] = std::minmax_element(dist.energies.begin(), dist.energies.end());
    const double lo = *lo_it, hi = *hi_it;
    const double width = (hi - lo) / static_cast<double>(n_bins);

    EnergyDistribution out;
    out.bin_edges.resize(n_bins + 1);
    for (std::size_t b = 0; b <= n_bins; ++b) out.bin_edges[b] = lo + width * static_cast<double>(b);
    out.bin_edges.back() = hi;
    out.energies.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) out.energies[b] = 0.5 * (out.bin_edges[b] + out.bin_edges[b + 1]);
    out.probabilities.assign(n_bins, 0.0);

    for (std::size_t k = 0; k < dist.energies.size(); ++k) {
        std::size_t b = 0;
        if (width > 0.0) {
            const double pos = std::floor((dist.energies[k] - lo) / width);
            b = pos <= 0.0 ? 0 : std::min(static_cast<std::size_t>(pos), n_bins - 1);
        }
        out.probabilities[b] += dist.probabilities[k];
    }
    return out;
}

EnergyDistribution world_energy_distribution(const EigenbasisState& state, const SpectralDecomposition& world) {
    require(static_cast<std::size_t>(state.amplitudes.size()) == world.dim(), ErrorKind::DimensionMismatch,
            "world_energy_distribution: dimension mismatch");
    return distribution_on_grid(world.eigenvalues, state.amplitudes.cwiseAbs2());
}

double effective_dimension(const EnergyDistribution& dist) {
    require(!dist.binned(), ErrorKind::InvalidArgument, "effective_dimension: requires an unbinned distribution");
    double sum_sq = 0.0;
    for (double p : dist.probabilities) sum_sq += p * p;
    require(sum_sq > 0.0, ErrorKind::InvalidArgument, "effective_dimension: zero distribution");
    return 1.0 / sum_sq;
}

double total_variation(const RealVector& p, const RealVector& q) {
    require(p.size() == q.size(), ErrorKind::DimensionMismatch, "total_variation: length mismatch");
    return 0.5 * (p - q).cwiseAbs().sum();
}

double total_variation(const EnergyDistribution& a, const EnergyDistribution& b) {
    require(a.energies == b.energies && a.bin_edges == b.bin_edges, ErrorKind::DimensionMismatch,
            "total_variation: distributions are on different grids");
    double tv = 0.0;
    for (std::size_t i = 0; i < a.probabilities.size(); ++i) tv += std::abs(a.probabilities[i] - b.probabilities[i]);
    return 0.5 * tv;
}

}  // namespace acl
