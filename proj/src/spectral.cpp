#include "acl/spectral.hpp"

#include "acl/error.hpp"
#include "acl/kernels.hpp"
#include "acl/randmat.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <new>
#include <numbers>
#include <string>

namespace acl {

std::size_t decomposition_bytes(std::size_t n) noexcept {
    // matrix (overwritten by eigenvectors) + zheevd work (N^2 + 2N complex)
    // + rwork (1 + 5N + 2N^2 doubles) + eigenvalues + iwork.
    return dense_matrix_bytes(n) + (n * n + 2 * n) * sizeof(cplx) + (1 + 5 * n + 2 * n * n) * sizeof(double) +
           n * sizeof(double) + (3 + 5 * n) * sizeof(lapack_int);
}

SpectralDecomposition decompose(ComplexMatrix&& h, const Fingerprint& source) {
    require(h.rows() == h.cols(), ErrorKind::DimensionMismatch, "decompose: matrix must be square");
    const auto n = static_cast<lapack_int>(h.rows());
    require(n >= 1, ErrorKind::InvalidArgument, "decompose: empty matrix");

    SpectralDecomposition out;
    out.source = source;
    out.eigenvalues.resize(n);
    lapack_int info = 0;
    try {
        info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, h.data(), n, out.eigenvalues.data());
    } catch (const std::bad_alloc&) {
        throw Error(ErrorKind::Resource, "decompose: allocation failed (" +
                                             std::to_string(decomposition_bytes(static_cast<std::size_t>(n))) +
                                             " bytes requested)");
    }
    if (info == LAPACK_WORK_MEMORY_ERROR || info == LAPACK_TRANSPOSE_MEMORY_ERROR) {
        throw Error(ErrorKind::Resource, "decompose: LAPACK workspace allocation failed (" +
                                             std::to_string(decomposition_bytes(static_cast<std::size_t>(n))) +
                                             " bytes requested)");
    }
    if (info > 0) {
        throw Error(ErrorKind::Numerical,
                    "decompose: zheevd failed to converge at eigenvalue index " + std::to_string(info),
                    static_cast<std::size_t>(info));
    }
    require(info == 0, ErrorKind::InvalidArgument, "decompose: zheevd rejected argument " + std::to_string(-info));
    out.eigenvectors = std::move(h);
    return out;
}

SpectralDecomposition decompose(const HermitianOperator& h, const Fingerprint& source) {
    ComplexMatrix copy = h.matrix();
    return decompose(std::move(copy), source);
}

bool DecompositionQuality::meets_contract() const noexcept {
    return max_residual <= 1e-8 * std::max(operator_norm, 1e-300) && max_orthogonality <= 1e-10;
}

DecompositionQuality check_quality(const HermitianOperator& h, const SpectralDecomposition& d) {
    require(h.dim() == d.dim(), ErrorKind::DimensionMismatch, "check_quality: dimension mismatch");
    const auto& v = d.eigenvectors;
    DecompositionQuality q;
    q.operator_norm = d.eigenvalues.cwiseAbs().maxCoeff();
    ComplexMatrix r = h.matrix() * v;
    r -= v * d.eigenvalues.cast<cplx>().asDiagonal();
    q.max_residual = r.colwise().norm().maxCoeff();
    ComplexMatrix g = v.adjoint() * v;
    g.diagonal().array() -= 1.0;
    q.max_orthogonality = g.cwiseAbs().maxCoeff();
    return q;
}

ComplexVector apply_world(const ModelTerms& terms, const ComplexVector& psi) {
    const auto ns = static_cast<Eigen::Index>(terms.n_sys);
    const auto ne = static_cast<Eigen::Index>(terms.n_env);
    require(psi.size() == ns * ne, ErrorKind::DimensionMismatch, "apply_world: dimension mismatch");
    const Eigen::Map<const ComplexMatrix> x(psi.data(), ne, ns);
    ComplexVector out(psi.size());
    Eigen::Map<ComplexMatrix> y(out.data(), ne, ns);
    y.noalias() = terms.h_env.matrix() * x;
    y.noalias() += x * terms.h_sys.matrix().transpose();
    y.noalias() += terms.h_int_env.matrix() * x * terms.q_sys.matrix().transpose();
    return out;
}

DecompositionQuality spot_check(const ModelTerms& terms, const SpectralDecomposition& d, std::size_t columns) {
    require(d.dim() == terms.n_sys * terms.n_env, ErrorKind::DimensionMismatch, "spot_check: dimension mismatch");
    const auto n = static_cast<Eigen::Index>(d.dim());
    DecompositionQuality q;
    q.operator_norm = d.eigenvalues.cwiseAbs().maxCoeff();
    const auto count = static_cast<Eigen::Index>(std::clamp<std::size_t>(columns, 1, d.dim()));
    for (Eigen::Index j = 0; j < count; ++j) {
        const Eigen::Index k = count == 1 ? 0 : j * (n - 1) / (count - 1);
        const ComplexVector v = d.eigenvectors.col(k);
        q.max_residual = std::max(q.max_residual, (apply_world(terms, v) - d.eigenvalues(k) * v).norm());
    }
    Xoshiro256 rng(0x5eed, kPhaseStreamTag);
    ComplexVector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = cplx(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
    x.normalize();
    const ComplexVector y = d.eigenvectors * x;
    q.max_orthogonality = (d.eigenvectors.adjoint() * y - x).cwiseAbs().maxCoeff();
    return q;
}

SpectralDecomposition decompose_world(const ModelTerms& terms, const Fingerprint& source) {
    SpectralDecomposition d = decompose(assemble_world_hamiltonian(terms).release(), source);
    if (spot_check(terms, d).meets_contract()) return d;

    std::fprintf(stderr, "warning: LAPACK eigendecomposition failed its accuracy check; retrying with Eigen\n");
    d = SpectralDecomposition{};
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(assemble_world_hamiltonian(terms).matrix());
    require(solver.info() == Eigen::Success, ErrorKind::Numerical, "decompose_world: fallback solver failed");
    d.eigenvalues = solver.eigenvalues();
    d.eigenvectors = solver.eigenvectors();
    d.source = source;
    const DecompositionQuality q = spot_check(terms, d);
    if (!q.meets_contract()) {
        throw Error(ErrorKind::Numerical, "decompose_world: residual " + std::to_string(q.max_residual) +
                                              ", orthogonality " + std::to_string(q.max_orthogonality) +
                                              " outside tolerance");
    }
    return d;
}

EigenbasisState to_eigenbasis(const SpectralDecomposition& d, const PureState& state) {
    require(d.dim() == state.dim(), ErrorKind::DimensionMismatch, "to_eigenbasis: dimension mismatch");
    return {d.eigenvectors.adjoint() * state.amplitudes(), d.source};
}

PureState from_eigenbasis(const SpectralDecomposition& d, const EigenbasisState& state) {
    require(d.dim() == static_cast<std::size_t>(state.amplitudes.size()), ErrorKind::DimensionMismatch,
            "from_eigenbasis: dimension mismatch");
    return PureState(d.eigenvectors * state.amplitudes);
}

EigenbasisState evolve(const EigenbasisState& state, const SpectralDecomposition& d, double t) {
    require(std::isfinite(t), ErrorKind::InvalidArgument, "evolve: time must be finite");
    const auto n = static_cast<std::size_t>(state.amplitudes.size());
    require(n == d.dim(), ErrorKind::DimensionMismatch, "evolve: dimension mismatch");
    EigenbasisState out{ComplexVector(state.amplitudes.size()), state.reference};
    kernels::parallel::propagate({state.amplitudes.data(), n}, {d.eigenvalues.data(), n}, t,
                                 {out.amplitudes.data(), n});
    return out;
}

EigenbasisState randomize_phases(const EigenbasisState& state, std::uint64_t seed) {
    Xoshiro256 rng(seed, kPhaseStreamTag);
    EigenbasisState out = state;
    for (Eigen::Index i = 0; i < out.amplitudes.size(); ++i) {
        const double theta = 2.0 * std::numbers::pi * rng.uniform01();
        out.amplitudes(i) *= std::polar(1.0, theta);
    }
    return out;
}

RealVector eigenstate_expectations(const SpectralDecomposition& d, const HermitianOperator& op) {
    require(op.dim() == d.dim(), ErrorKind::DimensionMismatch, "eigenstate_expectations: dimension mismatch");
    const auto n = static_cast<Eigen::Index>(d.dim());
    constexpr Eigen::Index block = 256;
    RealVector out(n);
    for (Eigen::Index c = 0; c < n; c += block) {
        const Eigen::Index w = std::min(block, n - c);
        const ComplexMatrix applied = op.matrix() * d.eigenvectors.middleCols(c, w);
        out.segment(c, w) =
            d.eigenvectors.middleCols(c, w).conjugate().cwiseProduct(applied).colwise().sum().real().transpose();
    }
    return out;
}

double diagonal_ensemble_expectation(const EigenbasisState& state, const SpectralDecomposition& d,
                                     const HermitianOperator& op) {
    require(static_cast<std::size_t>(state.amplitudes.size()) == d.dim(), ErrorKind::DimensionMismatch,
            "diagonal_ensemble_expectation: state dimension mismatch");
    const RealVector diag = eigenstate_expectations(d, op);
    return state.amplitudes.cwiseAbs2().dot(diag);
}

namespace {

// sum_s2 m(s, s2) V_s2 over nonzero entries of the small factor m.
ComplexMatrix mix_system_blocks(const ComplexMatrix& m, const ComplexMatrix& v, Eigen::Index s, Eigen::Index ne) {
    ComplexMatrix y = ComplexMatrix::Zero(ne, v.cols());
    for (Eigen::Index s2 = 0; s2 < m.cols(); ++s2) {
        if (m(s, s2) != cplx(0.0)) y.noalias() += m(s, s2) * v.middleRows(s2 * ne, ne);
    }
    return y;
}

}  // namespace

EigenstateEnergies eigenstate_energies(const SpectralDecomposition& d, const ModelTerms& terms) {
    const auto ns = static_cast<Eigen::Index>(terms.n_sys);
    const auto ne = static_cast<Eigen::Index>(terms.n_env);
    require(d.dim() == terms.n_sys * terms.n_env, ErrorKind::DimensionMismatch,
            "eigenstate_energies: decomposition does not match model dimensions");
    const auto& v = d.eigenvectors;
    const auto nw = v.cols();
    EigenstateEnergies out{RealVector::Zero(nw), RealVector::Zero(nw), RealVector::Zero(nw)};
    for (Eigen::Index s = 0; s < ns; ++s) {
        const auto vs = v.middleRows(s * ne, ne);
        const ComplexMatrix sys_mixed = mix_system_blocks(terms.h_sys.matrix(), v, s, ne);
        out.system += vs.conjugate().cwiseProduct(sys_mixed).colwise().sum().real().transpose();

        const ComplexMatrix env_applied = terms.h_env.matrix() * vs;
        out.environment += vs.conjugate().cwiseProduct(env_applied).colwise().sum().real().transpose();

        const ComplexMatrix q_mixed = mix_system_blocks(terms.q_sys.matrix(), v, s, ne);
        const ComplexMatrix int_applied = terms.h_int_env.matrix() * q_mixed;
        out.interaction += vs.conjugate().cwiseProduct(int_applied).colwise().sum().real().transpose();
    }
    return out;
}

// ---------------------------------------------------------------- cache I/O

namespace {

constexpr char kMagic[4] = {'A', 'C', 'L', 'W'};

template <typename T>
void write_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    is.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

void write_doubles(std::ostream& os, const double* data, std::size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
    } else {
        for (std::size_t i = 0; i < count; ++i) write_le(os, data[i]);
    }
}

void read_doubles(std::istream& is, double* data, std::size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
    } else {
        for (std::size_t i = 0; i < count; ++i) data[i] = read_le<double>(is);
    }
}

}  // namespace

void write_cache(const std::filesystem::path& path, const SpectralDecomposition& d) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    const std::filesystem::path tmp = path.string() + ".tmp";
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(os), ErrorKind::Resource, "write_cache: cannot open " + tmp.string());
    const std::uint64_t n = d.dim();
    os.write(kMagic, 4);
    write_le(os, kCacheVersion);
    write_le(os, n);
    os.write(reinterpret_cast<const char*>(d.source.data()), static_cast<std::streamsize>(d.source.size()));
    write_doubles(os, d.eigenvalues.data(), n);
    // std::complex<double> is layout-compatible with double[2].
    write_doubles(os, reinterpret_cast<const double*>(d.eigenvectors.data()), 2 * n * n);
    os.close();
    require(static_cast<bool>(os), ErrorKind::Resource, "write_cache: write failed for " + tmp.string());
    std::filesystem::rename(tmp, path, ec);
    require(!ec, ErrorKind::Resource, "write_cache: cannot rename " + tmp.string());
}

SpectralDecomposition read_cache(const std::filesystem::path& path, const Fingerprint* expected) {
    std::ifstream is(path, std::ios::binary);
    require(static_cast<bool>(is), ErrorKind::Dependency, "read_cache: cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    require(is && std::equal(magic, magic + 4, kMagic), ErrorKind::Dependency,
            "read_cache: bad magic in " + path.string());
    const auto version = read_le<std::uint32_t>(is);
    require(is && version == kCacheVersion, ErrorKind::Dependency,
            "read_cache: unsupported format version " + std::to_string(version));
    const auto n = read_le<std::uint64_t>(is);
    SpectralDecomposition d;
    is.read(reinterpret_cast<char*>(d.source.data()), static_cast<std::streamsize>(d.source.size()));
    require(static_cast<bool>(is), ErrorKind::Dependency, "read_cache: truncated header");
    if (expected != nullptr) {
        require(d.source == *expected, ErrorKind::Dependency,
                "read_cache: fingerprint mismatch (cache " + to_hex(d.source) + ", expected " + to_hex(*expected) +
                    ")");
    }
    const auto dim = static_cast<Eigen::Index>(n);
    d.eigenvalues.resize(dim);
    d.eigenvectors.resize(dim, dim);
    read_doubles(is, d.eigenvalues.data(), n);
    read_doubles(is, reinterpret_cast<double*>(d.eigenvectors.data()), 2 * n * n);
    require(static_cast<bool>(is), ErrorKind::Dependency, "read_cache: truncated data in " + path.string());
    return d;
}

}  // namespace acl
