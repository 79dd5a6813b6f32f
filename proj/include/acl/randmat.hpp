#pragma once

// Seeded random Hermitian matrices for the environment and interaction terms.
//
// Generator: xoshiro256** (Blackman & Vigna). A stream is identified by
// (seed, tag); its 256-bit state is the first four outputs of splitmix64
// started at  seed XOR (tag * 0x9E3779B97F4A7C15).  Doubles in [0, 1) are
// (next() >> 11) * 2^-53.
//
// Draw order for sample_hermitian: rows i = 0..N-1, columns j = i..N-1
// (upper triangle, row-major); for each element the real part is drawn
// first, then the imaginary part. Both draws are consumed on the diagonal,
// where the imaginary part is then discarded. Each part is u - 0.5.

#include "acl/types.hpp"

#include <array>
#include <cstddef>
#include <cstdint>

namespace acl {

class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    Xoshiro256(std::uint64_t seed, std::uint64_t stream_tag) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept;
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

enum class MatrixLabel : std::uint8_t { Environment = 1, Interaction = 2 };

// Stream tag for phase randomization; disjoint from the matrix labels.
inline constexpr std::uint64_t kPhaseStreamTag = 3;

struct RandomMatrixSpec {
    std::size_t dimension = 1;
    std::uint64_t seed = 0;
    MatrixLabel label = MatrixLabel::Environment;
};

// Entries uniform on [-0.5, 0.5] for real and imaginary parts; Hermitian by
// construction (lower triangle is the exact conjugate of the upper).
HermitianOperator sample_hermitian(const RandomMatrixSpec& spec);

}  // namespace acl
