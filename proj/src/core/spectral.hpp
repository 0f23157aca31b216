#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "core/matrix.hpp"

namespace nrc {

// Singular value tail metrics of one weight matrix.
//
// e(r) = sum_{i>=r} sigma_i / sum_i sigma_i with 1-based inclusive r in
// [1, n+1]; the squared tail indexes exclusively, tail_sq(r) =
// sum_{j>r} sigma_j^2 / sum_j sigma_j^2 with r in [0, n]. Both indexings
// appear in practice, so both are exposed. An all-zero matrix reports zero
// tails everywhere so degenerate inputs do not poison sweeps.
struct SpectralReport {
  std::vector<double> singular_values;  // non-increasing
  std::vector<double> e_tail;           // e_tail[r-1] = e(r), size n+1
  std::vector<double> tail_sq;          // tail_sq[r], size n+1
  std::map<double, std::size_t> softrank;

  double e(std::size_t r) const { return e_tail.at(r - 1); }
  double tail_sq_at(std::size_t r) const { return tail_sq.at(r); }
  std::size_t rank_at(double epsilon) const { return softrank.at(epsilon); }
};

// softrank rk(eps) = min{ r >= 1 | e(r) <= eps }.
std::size_t softrank_from_tail(const std::vector<double>& e_tail, double epsilon);

SpectralReport spectral_report(const Matrix& a, const std::vector<double>& epsilons);

// Same metrics from precomputed singular values (spares repeated SVDs).
SpectralReport spectral_report_from_singular_values(std::vector<double> sigma,
                                                    const std::vector<double>& epsilons);

}  // namespace nrc
