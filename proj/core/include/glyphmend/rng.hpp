#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace glyphmend {

// Reproducibility contract. Every randomized operation in the project draws
// from std::mt19937_64 through the helpers below; the engine's raw output
// sequence is pinned by the standard and the helpers are fixed arithmetic on
// raw draws, so a (seed, call sequence) pair replays identically anywhere.
// Independent re-implementations (oracle tests) rely on this exact contract:
//
//   draw_below(rng, m)  = rng() % m
//   draw_unit(rng)      = (rng() >> 11) * 2^-53
//   sample_without_replacement = partial Fisher-Yates over 0..n-1, one
//       draw_below(rng, n - k) per selection step k, swap-to-front
//
// Modulo bias for draw_below is below 2^-50 for the bounds used here.

std::uint64_t splitmix64(std::uint64_t z);
std::uint64_t fnv1a64(const std::string& key);

/// Stream derivation: mix_seed(seed, salt) = splitmix64(seed ^ splitmix64(salt)).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t mix_seed(std::uint64_t seed, const std::string& key);

inline std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  return rng() % bound;
}

inline double draw_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// First k entries of a partial Fisher-Yates shuffle of {0..n-1}, in
/// selection order. Requires 0 <= k <= n.
std::vector<int> sample_without_replacement(std::mt19937_64& rng, int n, int k);

/// Full Fisher-Yates shuffle of {0..n-1}: n-1 selection steps, one
/// draw_below(rng, n - step) each (the degenerate last step is skipped).
std::vector<std::size_t> shuffled_indices(std::mt19937_64& rng, std::size_t n);

}  // namespace glyphmend
