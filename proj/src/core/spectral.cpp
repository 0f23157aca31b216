#include "core/spectral.hpp"

#include <string>

#include "core/decomp.hpp"
#include "core/errors.hpp"

namespace nrc {

std::size_t softrank_from_tail(const std::vector<double>& e_tail, double epsilon) {
  for (std::size_t r = 1; r <= e_tail.size(); ++r) {
    if (e_tail[r - 1] <= epsilon) return r;
  }
  return e_tail.size() + 1;  // unreachable: e(n+1) = 0
}

SpectralReport spectral_report_from_singular_values(std::vector<double> sigma,
                                                    const std::vector<double>& epsilons) {
  for (double eps : epsilons)
    require(eps >= 0.0 && eps <= 1.0, ErrorCode::Precondition,
            "spectral_report epsilon " + std::to_string(eps) + " outside [0,1]");

  const std::size_t n = sigma.size();
  SpectralReport rep;
  rep.singular_values = std::move(sigma);

  double sum = 0.0, sum_sq = 0.0;
  for (double s : rep.singular_values) {
    sum += s;
    sum_sq += s * s;
  }

  rep.e_tail.assign(n + 1, 0.0);
  rep.tail_sq.assign(n + 1, 0.0);
  if (sum > 0.0) {
    // Accumulate suffixes from the smallest value up for accuracy.
    double tail = 0.0, tail2 = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      rep.tail_sq[i + 1] = tail2 / sum_sq;  // exclusive: values strictly after index i
      tail += rep.singular_values[i];
      tail2 += rep.singular_values[i] * rep.singular_values[i];
      rep.e_tail[i] = tail / sum;  // inclusive: e(i+1) counts sigma_{i+1}
    }
    rep.tail_sq[0] = 1.0;
    rep.e_tail[0] = 1.0;  // exact despite rounding in the sum
  }

  for (double eps : epsilons) rep.softrank[eps] = softrank_from_tail(rep.e_tail, eps);
  return rep;
}

SpectralReport spectral_report(const Matrix& a, const std::vector<double>& epsilons) {
  return spectral_report_from_singular_values(svd(a).singular_values, epsilons);
}

}  // namespace nrc
