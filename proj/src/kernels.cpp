#include "acl/kernels.hpp"

#include "acl/error.hpp"

#include <omp.h>

#include <complex>
#include <vector>

namespace acl::kernels {

namespace {

void check_state(std::span<const cplx> psi, Dims dims) {
    require(psi.size() == dims.world(), ErrorKind::DimensionMismatch,
            "kernels: state length does not match n_sys * n_env");
}

void check_square(const ComplexMatrix& op, std::size_t n, const char* what) {
    require(op.rows() == op.cols() && static_cast<std::size_t>(op.rows()) == n, ErrorKind::DimensionMismatch, what);
}

}  // namespace

namespace serial {

ComplexMatrix reduce_to_system(std::span<const cplx> psi, Dims dims) {
    check_state(psi, dims);
    const std::size_t ns = dims.n_sys, ne = dims.n_env;
    ComplexMatrix rho(ns, ns);
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < ns; ++j) {
            cplx acc = 0.0;
            for (std::size_t e = 0; e < ne; ++e) acc += psi[i * ne + e] * std::conj(psi[j * ne + e]);
            rho(i, j) = acc;
        }
    }
    return rho;
}

ComplexMatrix reduce_to_environment(std::span<const cplx> psi, Dims dims) {
    check_state(psi, dims);
    const std::size_t ns = dims.n_sys, ne = dims.n_env;
    ComplexMatrix rho(ne, ne);
    for (std::size_t a = 0; a < ne; ++a) {
        for (std::size_t b = 0; b < ne; ++b) {
            cplx acc = 0.0;
            for (std::size_t s = 0; s < ns; ++s) acc += psi[s * ne + a] * std::conj(psi[s * ne + b]);
            rho(a, b) = acc;
        }
    }
    return rho;
}

cplx expectation(const ComplexMatrix& op, std::span<const cplx> psi) {
    const std::size_t n = psi.size();
    check_square(op, n, "expectation: operator dimension does not match state");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cplx row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += op(i, j) * psi[j];
        acc += std::conj(psi[i]) * row;
    }
    return acc;
}

cplx product_expectation(const ComplexMatrix& q, const ComplexMatrix& b, std::span<const cplx> psi, Dims dims) {
    check_state(psi, dims);
    check_square(q, dims.n_sys, "product_expectation: system factor dimension mismatch");
    check_square(b, dims.n_env, "product_expectation: environment factor dimension mismatch");
    const std::size_t ns = dims.n_sys, ne = dims.n_env;
    cplx acc = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t e = 0; e < ne; ++e) {
            cplx row = 0.0;
            for (std::size_t s2 = 0; s2 < ns; ++s2) {
                if (q(s, s2) == cplx(0.0)) continue;
                cplx inner = 0.0;
                for (std::size_t e2 = 0; e2 < ne; ++e2) inner += b(e, e2) * psi[s2 * ne + e2];
                row += q(s, s2) * inner;
            }
            acc += std::conj(psi[s * ne + e]) * row;
        }
    }
    return acc;
}

void propagate(std::span<const cplx> alpha, std::span<const double> energies, double t, std::span<cplx> out) {
    require(alpha.size() == energies.size() && out.size() == alpha.size(), ErrorKind::DimensionMismatch,
            "propagate: length mismatch");
    for (std::size_t i = 0; i < alpha.size(); ++i) out[i] = std::polar(1.0, -energies[i] * t) * alpha[i];
}

}  // namespace serial

namespace parallel {

ComplexMatrix reduce_to_system(std::span<const cplx> psi, Dims dims) {
    check_state(psi, dims);
    const auto ns = static_cast<std::ptrdiff_t>(dims.n_sys);
    const std::size_t ne = dims.n_env;
    ComplexMatrix rho(ns, ns);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < ns; ++i) {
        const cplx* row_i = psi.data() + i * ne;
        for (std::ptrdiff_t j = 0; j < ns; ++j) {
            const cplx* row_j = psi.data() + j * ne;
            cplx acc = 0.0;
            for (std::size_t e = 0; e < ne; ++e) acc += row_i[e] * std::conj(row_j[e]);
            rho(i, j) = acc;
        }
    }
    return rho;
}

ComplexMatrix reduce_to_environment(std::span<const cplx> psi, Dims dims) {
    check_state(psi, dims);
    const std::size_t ns = dims.n_sys;
    const auto ne = static_cast<std::ptrdiff_t>(dims.n_env);
    ComplexMatrix rho(ne, ne);
    // Column b of rho is written by one thread; accumulation order over s is fixed.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < ne; ++b) {
        double* __restrict col = reinterpret_cast<double*>(rho.data() + b * ne);
        for (std::ptrdiff_t k = 0; k < 2 * ne; ++k) col[k] = 0.0;
        for (std::size_t s = 0; s < ns; ++s) {
            const double* __restrict block = reinterpret_cast<const double*>(psi.data() + s * ne);
            const double cr = block[2 * b], ci = -block[2 * b + 1];
            for (std::ptrdiff_t a = 0; a < ne; ++a) {
                const double xr = block[2 * a], xi = block[2 * a + 1];
                col[2 * a] += xr * cr - xi * ci;
                col[2 * a + 1] += xr * ci + xi * cr;
            }
        }
    }
    return rho;
}

cplx expectation(const ComplexMatrix& op, std::span<const cplx> psi) {
    const auto n = static_cast<std::ptrdiff_t>(psi.size());
    check_square(op, psi.size(), "expectation: operator dimension does not match state");
    std::vector<cplx> partial(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        cplx row = 0.0;
        for (std::ptrdiff_t j = 0; j < n; ++j) row += op(i, j) * psi[j];
        partial[i] = std::conj(psi[i]) * row;
    }
    cplx acc = 0.0;
    for (const auto& p : partial) acc += p;
    return acc;
}

cplx product_expectation(const ComplexMatrix& q, const ComplexMatrix& b, std::span<const cplx> psi, Dims dims) {
    check_state(psi, dims);
    check_square(q, dims.n_sys, "product_expectation: system factor dimension mismatch");
    check_square(b, dims.n_env, "product_expectation: environment factor dimension mismatch");
    const auto ns = static_cast<Eigen::Index>(dims.n_sys);
    const auto ne = static_cast<Eigen::Index>(dims.n_env);
    // X(e, s) = psi[s * ne + e]; <psi|q (x) b|psi> = sum conj(X) .* (b X q^T)
    Eigen::Map<const ComplexMatrix> x(psi.data(), ne, ns);
    const ComplexMatrix xq = x * q.transpose();
    std::vector<cplx> partial(static_cast<std::size_t>(ns));
#pragma omp parallel for schedule(static)
    for (Eigen::Index s = 0; s < ns; ++s) {
        partial[s] = x.col(s).dot(b * xq.col(s));
    }
    cplx acc = 0.0;
    for (const auto& p : partial) acc += p;
    return acc;
}

void propagate(std::span<const cplx> alpha, std::span<const double> energies, double t, std::span<cplx> out) {
    require(alpha.size() == energies.size() && out.size() == alpha.size(), ErrorKind::DimensionMismatch,
            "propagate: length mismatch");
    const auto n = static_cast<std::ptrdiff_t>(alpha.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = std::polar(1.0, -energies[i] * t) * alpha[i];
}

}  // namespace parallel

int thread_count() noexcept { return omp_get_max_threads(); }

void set_thread_count(int n) noexcept {
    if (n > 0) omp_set_num_threads(n);
}

}  // namespace acl::kernels
