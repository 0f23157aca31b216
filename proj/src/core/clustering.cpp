#include "core/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace nrc {

namespace {

constexpr std::uint64_t kTagKmeans = 0x4B4D4541ULL;

double sq_dist_col(const Matrix& pts, std::size_t col, const std::vector<double>& center) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    const double d = pts(i, col) - center[i];
    acc += d * d;
  }
  return acc;
}

struct LloydResult {
  std::vector<std::size_t> assignments;
  double wcss = 0.0;
  std::size_t k = 0;
};

// One seeded k-means++ / Lloyd run on column-points. May merge away a
// cluster when the data has fewer distinct points than k.
LloydResult lloyd_run(const Matrix& pts, std::size_t k, Crng rng) {
  const std::size_t n = pts.cols();
  const std::size_t dim = pts.rows();

  // k-means++ seeding.
  std::vector<std::vector<double>> centers;
  centers.reserve(k);
  centers.push_back(pts.col(rng.next_below(n)));
  std::vector<double> d2(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sq_dist_col(pts, i, c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.next_u01() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.next_below(n);  // all mass on existing centers: degenerate data
    }
    centers.push_back(pts.col(pick));
  }

  std::vector<std::size_t> assign(n, 0);
  std::vector<std::size_t> sizes(k, 0);
  constexpr std::size_t kMaxIters = 300;
  for (std::size_t iter = 0; iter < kMaxIters; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best_c = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = sq_dist_col(pts, i, centers[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      if (assign[i] != best_c || iter == 0) {
        assign[i] = best_c;
        changed = true;
      }
    }
    if (!changed) break;

    std::fill(sizes.begin(), sizes.end(), 0);
    for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ++sizes[assign[i]];
      for (std::size_t r = 0; r < dim; ++r) centers[assign[i]][r] += pts(r, i);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;
      const double inv = 1.0 / static_cast<double>(sizes[c]);
      for (double& e : centers[c]) e *= inv;
    }

    // Reseed each empty cluster to the point farthest from its centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[assign[i]] <= 1) continue;  // do not empty another cluster
        const double d = sq_dist_col(pts, i, centers[assign[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far_d > 0.0) {
        --sizes[assign[far]];
        assign[far] = c;
        sizes[c] = 1;
        centers[c] = pts.col(far);
      }
    }
  }

  // Compact away clusters that stayed empty (fewer distinct points than k).
  std::fill(sizes.begin(), sizes.end(), 0);
  for (std::size_t a : assign) ++sizes[a];
  std::vector<std::size_t> remap(k, 0);
  std::size_t next = 0;
  for (std::size_t c = 0; c < k; ++c)
    if (sizes[c] > 0) remap[c] = next++;
  LloydResult out;
  out.k = next;
  out.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.assignments[i] = remap[assign[i]];

  // Exact WCSS of the final assignment (centroids recomputed).
  std::vector<std::vector<double>> mean(out.k, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> cnt(out.k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++cnt[out.assignments[i]];
    for (std::size_t r = 0; r < dim; ++r) mean[out.assignments[i]][r] += pts(r, i);
  }
  for (std::size_t c = 0; c < out.k; ++c)
    for (double& e : mean[c]) e /= static_cast<double>(cnt[c]);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += sq_dist_col(pts, i, mean[out.assignments[i]]);
  out.wcss = acc / static_cast<double>(n);
  return out;
}

std::vector<std::size_t> kmeans_points(const Matrix& pts, std::size_t k, std::size_t restarts,
                                       std::uint64_t seed, double* best_wcss_out) {
  require(k >= 1 && k <= pts.cols(), ErrorCode::Precondition, "kmeans needs 1 <= k <= N");
  require(restarts >= 1, ErrorCode::Precondition, "kmeans needs at least one restart");
  LloydResult best;
  bool have = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    LloydResult run = lloyd_run(pts, k, Crng({seed, kTagKmeans, k, r}));
    if (!have || run.wcss < best.wcss) {  // strict: ties keep the lowest restart index
      best = std::move(run);
      have = true;
    }
  }
  if (best_wcss_out != nullptr) *best_wcss_out = best.wcss;
  return best.assignments;
}

}  // namespace

Partition build_partition(const Matrix& z, const Matrix& y,
                          const std::vector<std::size_t>& assignments) {
  const std::size_t n = z.cols();
  require(y.cols() == n, ErrorCode::Mismatch, "z and y column counts disagree");
  require(assignments.size() == n, ErrorCode::Precondition,
          "assignments length must equal the number of points");
  require(n >= 1, ErrorCode::Precondition, "partition of an empty dataset");

  std::size_t k = 0;
  for (std::size_t a : assignments) k = std::max(k, a + 1);

  Partition p;
  p.assignments = assignments;
  p.k = k;
  p.sizes.assign(k, 0);
  for (std::size_t a : assignments) ++p.sizes[a];
  for (std::size_t c = 0; c < k; ++c)
    require(p.sizes[c] > 0, ErrorCode::Precondition,
            "cluster " + std::to_string(c) + " is empty; ids must be contiguous from 0");

  p.centroids_z = Matrix(z.rows(), k, 0.0);
  p.centroids_y = Matrix(y.rows(), k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = assignments[i];
    for (std::size_t r = 0; r < z.rows(); ++r) p.centroids_z(r, c) += z(r, i);
    for (std::size_t r = 0; r < y.rows(); ++r) p.centroids_y(r, c) += y(r, i);
  }
  p.weights.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const double inv = 1.0 / static_cast<double>(p.sizes[c]);
    for (std::size_t r = 0; r < z.rows(); ++r) p.centroids_z(r, c) *= inv;
    for (std::size_t r = 0; r < y.rows(); ++r) p.centroids_y(r, c) *= inv;
    p.weights[c] = static_cast<double>(p.sizes[c]) / static_cast<double>(n);
  }
  return p;
}

double wcss(const Matrix& z, const Matrix& y, const Partition& p) {
  const std::size_t n = z.cols();
  require(y.cols() == n && p.assignments.size() == n, ErrorCode::Mismatch,
          "wcss shapes inconsistent with partition");
  require(p.centroids_z.rows() == z.rows() && p.centroids_y.rows() == y.rows(),
          ErrorCode::Mismatch, "wcss centroid dimensions inconsistent");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = p.assignments[i];
    for (std::size_t r = 0; r < z.rows(); ++r) {
      const double d = z(r, i) - p.centroids_z(r, c);
      acc += d * d;
    }
    for (std::size_t r = 0; r < y.rows(); ++r) {
      const double d = y(r, i) - p.centroids_y(r, c);
      acc += d * d;
    }
  }
  return acc / static_cast<double>(n);
}

Partition kmeans(const Matrix& z, const Matrix& y, std::size_t k, std::size_t restarts,
                 std::uint64_t seed) {
  const Matrix pts = vstack(z, y);
  const auto assignments = kmeans_points(pts, k, restarts, seed, nullptr);
  return build_partition(z, y, assignments);
}

double tcv_estimate(const Matrix& z, const Matrix& y, std::size_t k_max, std::size_t restarts,
                    std::uint64_t seed) {
  require(k_max >= 1 && k_max <= z.cols(), ErrorCode::Precondition,
          "tcv_estimate needs 1 <= k_max <= N");
  const Matrix pts = vstack(z, y);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r <= k_max; ++r) {
    double w = 0.0;
    kmeans_points(pts, r, restarts, seed, &w);
    best = std::min(best, w);
  }
  return best;
}

double class_partition_wcss(const Matrix& z, const Matrix& y,
                            const std::vector<std::size_t>& class_labels) {
  const Partition p = build_partition(z, y, class_labels);
  return wcss(z, y, p);
}

double gaussian_tcv_bound(const GaussianMixtureSpec& spec) {
  const std::size_t n = spec.total_count();
  require(n >= 1, ErrorCode::InvalidArgument, "empty mixture spec");
  double bound = 0.0;
  for (std::size_t c = 0; c < spec.k; ++c) {
    const double pi = static_cast<double>(spec.counts[c]) / static_cast<double>(n);
    double tr = 0.0, fro = 0.0;
    if (spec.isotropic()) {
      const double s2 = std::get<0>(spec.covariance)[c] * std::get<0>(spec.covariance)[c];
      tr = static_cast<double>(spec.dim) * s2;
      fro = std::sqrt(static_cast<double>(spec.dim)) * s2;
    } else {
      const Matrix& cov = std::get<1>(spec.covariance)[c];
      tr = trace(cov);
      fro = frobenius_norm(cov);
    }
    bound += pi * (tr + fro / std::sqrt(static_cast<double>(spec.counts[c])));
  }
  return bound;
}

double label_tcv(const Matrix& y, std::size_t k_max, std::size_t restarts, std::uint64_t seed) {
  require(k_max >= 1 && k_max <= y.cols(), ErrorCode::Precondition,
          "label_tcv needs 1 <= k_max <= N");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r <= k_max; ++r) {
    double w = 0.0;
    kmeans_points(y, r, restarts, seed, &w);
    best = std::min(best, w);
  }
  return best;
}

}  // namespace nrc
