#include "acl/randmat.hpp"

#include "acl/error.hpp"

#include <bit>

namespace acl {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed, std::uint64_t stream_tag) noexcept {
    std::uint64_t sm = seed ^ (stream_tag * 0x9E3779B97F4A7C15ULL);
    for (auto& word : s_) word = splitmix64(sm);
}

Xoshiro256::result_type Xoshiro256::operator()() noexcept {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
}

HermitianOperator sample_hermitian(const RandomMatrixSpec& spec) {
    require(spec.dimension >= 1, ErrorKind::InvalidArgument, "sample_hermitian: invalid spec, dimension must be >= 1");
    const auto n = static_cast<Eigen::Index>(spec.dimension);
    Xoshiro256 rng(spec.seed, static_cast<std::uint64_t>(spec.label));

    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double re = rng.uniform01() - 0.5;
            const double im = rng.uniform01() - 0.5;
            if (i == j) {
                m(i, i) = cplx(re, 0.0);
            } else {
                m(i, j) = cplx(re, im);
                m(j, i) = cplx(re, -im);
            }
        }
    }
    return HermitianOperator(std::move(m));
}

}  // namespace acl
