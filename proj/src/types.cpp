#include "acl/types.hpp"

#include "acl/error.hpp"

#include <cmath>
#include <string>

namespace acl {

double hermiticity_error(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(ComplexMatrix matrix, double tolerance) : m_(std::move(matrix)) {
    require(m_.rows() == m_.cols(), ErrorKind::DimensionMismatch, "HermitianOperator: matrix must be square");
    const double err = hermiticity_error(m_);
    require(err <= tolerance, ErrorKind::InvalidArgument,
            "HermitianOperator: max |M - M^dagger| = " + std::to_string(err) + " exceeds tolerance");
}

HermitianOperator HermitianOperator::zero(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    return {ComplexMatrix::Zero(n, n), Unchecked{}};
}

HermitianOperator HermitianOperator::identity(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    return {ComplexMatrix::Identity(n, n), Unchecked{}};
}

HermitianOperator HermitianOperator::diagonal(const RealVector& entries) {
    return {entries.cast<cplx>().asDiagonal().toDenseMatrix(), Unchecked{}};
}

HermitianOperator HermitianOperator::scaled(double factor) const {
    return {m_ * factor, Unchecked{}};
}

HermitianOperator HermitianOperator::plus_identity(double offset) const {
    ComplexMatrix out = m_;
    out.diagonal().array() += offset;
    return {std::move(out), Unchecked{}};
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    require(a.dim() == b.dim(), ErrorKind::DimensionMismatch, "HermitianOperator: sum of unequal dimensions");
    return {a.m_ + b.m_, HermitianOperator::Unchecked{}};
}

PureState::PureState(ComplexVector amplitudes) : v_(std::move(amplitudes)) {
    const double norm = v_.norm();
    require(std::abs(norm - 1.0) <= kNormTolerance, ErrorKind::InvalidArgument,
            "PureState: amplitudes not normalized (norm = " + std::to_string(norm) + ")");
}

PureState PureState::normalized(ComplexVector amplitudes) {
    const double norm = amplitudes.norm();
    require(norm > 0.0 && std::isfinite(norm), ErrorKind::InvalidArgument, "PureState: cannot normalize zero vector");
    amplitudes /= norm;
    return PureState(std::move(amplitudes));
}

PureState PureState::basis(std::size_t dim, std::size_t index) {
    require(index < dim, ErrorKind::InvalidArgument, "PureState::basis: index out of range");
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(v));
}

PureState PureState::product(const PureState& system, const PureState& environment) {
    const auto ns = static_cast<Eigen::Index>(system.dim());
    const auto ne = static_cast<Eigen::Index>(environment.dim());
    ComplexVector v(ns * ne);
    for (Eigen::Index s = 0; s < ns; ++s) {
        v.segment(s * ne, ne) = system.v_(s) * environment.v_;
    }
    // Product of unit vectors; re-normalize only to absorb rounding.
    return normalized(std::move(v));
}

}  // namespace acl
