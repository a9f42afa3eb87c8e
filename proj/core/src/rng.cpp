#include "glyphmend/rng.hpp"

#include <stdexcept>

namespace glyphmend {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(const std::string& key) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt));
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& key) {
  return mix_seed(seed, fnv1a64(key));
}

std::vector<int> sample_without_replacement(std::mt19937_64& rng, int n, int k) {
  if (k < 0 || k > n) {
    throw std::invalid_argument("sample_without_replacement: need 0 <= k <= n");
  }
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int step = 0; step < k; ++step) {
    const auto j = step + static_cast<int>(draw_below(rng, static_cast<std::uint64_t>(n - step)));
    std::swap(idx[step], idx[j]);
  }
  idx.resize(k);
  return idx;
}

std::vector<std::size_t> shuffled_indices(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    const auto j = step + draw_below(rng, n - step);
    std::swap(idx[step], idx[j]);
  }
  return idx;
}

}  // namespace glyphmend
