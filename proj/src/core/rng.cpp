#include "core/rng.hpp"

#include <cmath>

namespace nrc {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_keys(std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = 0x2545F4914F6CDD1DULL;
  for (std::uint64_t k : keys) h = splitmix64(h ^ k);
  return h;
}

double u01_from_bits(std::uint64_t h) noexcept {
  // 53 uniform bits shifted into (0, 1]; never returns 0, so log() is safe.
  return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

double normal_from_bits(std::uint64_t h1, std::uint64_t h2) noexcept {
  const double u1 = u01_from_bits(h1);
  const double u2 = u01_from_bits(h2);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

double Crng::next_normal() {
  const std::uint64_t a = next_u64();
  const std::uint64_t b = next_u64();
  return normal_from_bits(a, b);
}

std::uint64_t Crng::next_below(std::uint64_t n) {
  // Rejection-free modulo is fine here: n is tiny relative to 2^64, and
  // reproducibility matters more than the ~n/2^64 bias.
  return n <= 1 ? 0 : next_u64() % n;
}

std::vector<double> Crng::next_unit_vector(std::size_t dim) {
  std::vector<double> v(dim);
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      v[i] = next_normal();
      norm_sq += v[i] * v[i];
    }
  } while (norm_sq == 0.0);
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& e : v) e *= inv;
  return v;
}

std::vector<double> Crng::next_simplex_weights(std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = -std::log(next_u01());
    total += w[i];
  }
  for (double& e : w) e /= total;
  return w;
}

}  // namespace nrc
