#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace nrc {

// Counter-based deterministic randomness. Every draw is a pure function of
// its key tuple, so streams keyed by (seed, cluster, index) are independent
// and insensitive to how many values other streams consumed.

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Hash a key tuple into a single 64-bit state.
std::uint64_t mix_keys(std::initializer_list<std::uint64_t> keys) noexcept;

// Map a hash to (0, 1].
double u01_from_bits(std::uint64_t h) noexcept;

// Standard normal from two independent hashes (Box-Muller, cosine branch).
double normal_from_bits(std::uint64_t h1, std::uint64_t h2) noexcept;

// Stateful convenience stream over the counter generator. Cheap to copy;
// two streams with distinct keys never collide.
class Crng {
 public:
  explicit Crng(std::uint64_t key) : key_(key) {}
  Crng(std::initializer_list<std::uint64_t> keys) : key_(mix_keys(keys)) {}

  std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++ + 0x9E3779B97F4A7C15ULL)); }
  double next_u01() { return u01_from_bits(next_u64()); }
  double next_normal();
  // Uniform integer in [0, n), n >= 1.
  std::uint64_t next_below(std::uint64_t n);
  // Uniform point on the unit sphere in R^dim.
  std::vector<double> next_unit_vector(std::size_t dim);
  // Dirichlet(1, ..., 1): uniform weights on the simplex.
  std::vector<double> next_simplex_weights(std::size_t n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace nrc
