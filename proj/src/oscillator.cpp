#include "acl/oscillator.hpp"

#include "acl/error.hpp"

#include <cmath>
#include <numbers>

namespace acl {

void OscillatorSpace::validate() const {
    require(dimension >= 2, ErrorKind::InvalidArgument, "OscillatorSpace: dimension must be >= 2");
    require(std::isfinite(frequency) && frequency > 0.0, ErrorKind::InvalidArgument,
            "OscillatorSpace: frequency must be positive");
}

ComplexMatrix lowering_operator(const OscillatorSpace& space) {
    space.validate();
    const auto n = static_cast<Eigen::Index>(space.dimension);
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) {
        a(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    return a;
}

HermitianOperator sho_hamiltonian(const OscillatorSpace& space) {
    space.validate();
    const auto n = static_cast<Eigen::Index>(space.dimension);
    RealVector levels(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        levels(k) = (static_cast<double>(k) + 0.5) * space.frequency;
    }
    return HermitianOperator::diagonal(levels);
}

HermitianOperator position_operator(const OscillatorSpace& space) {
    const ComplexMatrix a = lowering_operator(space);
    return HermitianOperator((a + a.adjoint()) * (1.0 / std::numbers::sqrt2));
}

CoherentState coherent_state(const OscillatorSpace& space, std::complex<double> alpha) {
    const ComplexMatrix a = lowering_operator(space);
    if (alpha == cplx(0.0, 0.0)) {
        return {PureState::basis(space.dimension, 0), 0.0, false};
    }
    const ComplexMatrix generator = alpha * a.adjoint() - std::conj(alpha) * a;
    // generator is anti-Hermitian: exp(G) = exp(-i K) with K = iG Hermitian.
    const ComplexMatrix k = cplx(0.0, 1.0) * generator;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(k);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::Numerical, "coherent_state: generator diagonalization failed");
    }
    const ComplexMatrix& v = solver.eigenvectors();
    const RealVector& lambda = solver.eigenvalues();

    // exp(-iK)|0> = V diag(exp(-i lambda)) V^dagger e_0
    ComplexVector coeffs = v.row(0).adjoint();
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        coeffs(i) *= std::polar(1.0, -lambda(i));
    }
    ComplexVector psi = v * coeffs;

    CoherentState out{PureState::normalized(std::move(psi)), 0.0, false};
    out.top_level_weight = std::norm(out.state.amplitudes()(out.state.amplitudes().size() - 1));
    out.leakage_warning = out.top_level_weight > kLeakageWarningThreshold;
    return out;
}

}  // namespace acl
