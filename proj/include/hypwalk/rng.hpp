#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace hypwalk {

using Engine = std::mt19937_64;

// Counter-based stream derivation: SplitMix64 finalizer applied to
// master, then folded with each index in turn. Distinct (master, i, j)
// tuples give unrelated 64-bit seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i, std::uint64_t j);

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

// Dirichlet(alpha) draw written to out. Gamma variates are combined in the log
// domain (shape < 1 via G(a) = G(a+1) U^(1/a)) and coordinates are clamped
// below at 1e-300, so every coordinate is in (0, 1].
void sample_dirichlet(Engine& eng, std::span<const double> alpha, std::span<double> out);

}  // namespace hypwalk
