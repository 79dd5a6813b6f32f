#pragma once

// Hot loops over world-space vectors. Each kernel exists twice:
//   serial::   plain index-summation loops, the reference used in tests;
//   parallel:: OpenMP versions that split work over independent output
//              rows, so results do not depend on the thread count.
// Vectors use the system-major index k = i_s * n_env + i_e.

#include "acl/types.hpp"

#include <cstddef>
#include <span>

namespace acl::kernels {

struct Dims {
    std::size_t n_sys = 0;
    std::size_t n_env = 0;
    std::size_t world() const noexcept { return n_sys * n_env; }
};

namespace serial {

// rho_s(i, j) = sum_e psi[i, e] conj(psi[j, e])
ComplexMatrix reduce_to_system(std::span<const cplx> psi, Dims dims);
// rho_e(a, b) = sum_s psi[s, a] conj(psi[s, b])
ComplexMatrix reduce_to_environment(std::span<const cplx> psi, Dims dims);
// <psi|op|psi>
cplx expectation(const ComplexMatrix& op, std::span<const cplx> psi);
// <psi| q (x) b |psi>
cplx product_expectation(const ComplexMatrix& q, const ComplexMatrix& b, std::span<const cplx> psi, Dims dims);
// out[i] = exp(-i E_i t) alpha[i]
void propagate(std::span<const cplx> alpha, std::span<const double> energies, double t, std::span<cplx> out);

}  // namespace serial

namespace parallel {

ComplexMatrix reduce_to_system(std::span<const cplx> psi, Dims dims);
ComplexMatrix reduce_to_environment(std::span<const cplx> psi, Dims dims);
cplx expectation(const ComplexMatrix& op, std::span<const cplx> psi);
cplx product_expectation(const ComplexMatrix& q, const ComplexMatrix& b, std::span<const cplx> psi, Dims dims);
void propagate(std::span<const cplx> alpha, std::span<const double> energies, double t, std::span<cplx> out);

}  // namespace parallel

// Number of OpenMP threads the parallel kernels will use.
int thread_count() noexcept;
void set_thread_count(int n) noexcept;

}  // namespace acl::kernels
