#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>

namespace acl {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kNormTolerance = 1e-10;

// Dense complex Hermitian matrix. Hermiticity is checked on construction
// against `tolerance` (max |M - M^dagger|); operators assembled from exact
// conjugate pairs pass with tolerance 0.
class HermitianOperator {
public:
    HermitianOperator() = default;
    explicit HermitianOperator(ComplexMatrix matrix, double tolerance = 0.0);

    static HermitianOperator zero(std::size_t dim);
    static HermitianOperator identity(std::size_t dim);
    static HermitianOperator diagonal(const RealVector& entries);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    ComplexMatrix release() && noexcept { return std::move(m_); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

    HermitianOperator scaled(double factor) const;
    HermitianOperator plus_identity(double offset) const;

    friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);

private:
    struct Unchecked {};
    HermitianOperator(ComplexMatrix matrix, Unchecked) : m_(std::move(matrix)) {}

    ComplexMatrix m_;
};

double hermiticity_error(const ComplexMatrix& m);

// Normalized state vector. World states use the system-major index
// k = i_s * N_e + i_e.
class PureState {
public:
    PureState() = default;
    // Throws unless the norm is 1 within kNormTolerance.
    explicit PureState(ComplexVector amplitudes);

    static PureState normalized(ComplexVector amplitudes);
    static PureState basis(std::size_t dim, std::size_t index);
    // |a> (x) |b> in system-major order.
    static PureState product(const PureState& system, const PureState& environment);

    const ComplexVector& amplitudes() const noexcept { return v_; }
    std::span<const cplx> view() const noexcept { return {v_.data(), static_cast<std::size_t>(v_.size())}; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(v_.size()); }

private:
    ComplexVector v_;
};

}  // namespace acl
