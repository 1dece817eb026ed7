#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "pslab/types.hpp"

namespace pslab {

/// Generator for one independent task: the stream depends only on
/// (seed, stream index), never on scheduling.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                      std::uint32_t(stream >> 32), 0x70736c61u};
    return std::mt19937_64(seq);
}

/// Uniform in [0, 1) from the top 53 bits of one draw.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// q ~ N_C(0, 1) with density π⁻¹ e^{−|q|²}: |q|² is Exp(1) and arg q is
/// uniform, so q = √(−ln(1 − u₁)) e^{2πi u₂}. Bit-reproducible across
/// standard libraries (no std::normal_distribution).
inline Complex complex_gaussian(std::mt19937_64& gen) {
    const double u1 = uniform01(gen);
    const double u2 = uniform01(gen);
    const double radius = std::sqrt(-std::log1p(-u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// N × N matrix of iid N_C(0, 1) entries, filled column by column.
inline ComplexMatrix sample_gaussian_matrix(Eigen::Index n, std::mt19937_64& gen) {
    if (n < 1) throw InvalidArgument("sample_gaussian_matrix: N must be >= 1");
    ComplexMatrix q(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) q(i, j) = complex_gaussian(gen);
    }
    return q;
}

inline ComplexMatrix sample_gaussian_matrix(Eigen::Index n, std::uint64_t seed) {
    auto gen = make_stream(seed, 0);
    return sample_gaussian_matrix(n, gen);
}

}  // namespace pslab
