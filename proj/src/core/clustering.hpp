#pragma once

#include <cstdint>
#include <vector>

#include "core/dataset.hpp"
#include "core/matrix.hpp"

namespace nrc {

// Cluster assignment of N joined (z, y) points. Centroids are exact means of
// the assigned columns; clusters are contiguous ids starting at 0 and never
// empty.
struct Partition {
  std::vector<std::size_t> assignments;
  std::size_t k = 0;
  Matrix centroids_z;  // dz x k
  Matrix centroids_y;  // dy x k
  std::vector<std::size_t> sizes;
  std::vector<double> weights;  // pi_k = N_k / N
};

Partition build_partition(const Matrix& z, const Matrix& y,
                          const std::vector<std::size_t>& assignments);

// Within-cluster sum of squares of the joined (z, y) vectors, normalized
// by N: (1/N) sum_k sum_{i in C_k} ||(z_i, y_i) - (zbar_k, ybar_k)||^2.
double wcss(const Matrix& z, const Matrix& y, const Partition& p);

// Lloyd's algorithm with k-means++ seeding on the joined (z, y) vectors.
// Best of `restarts` runs by WCSS, ties broken by lowest restart index;
// deterministic given seed. Empty clusters are reseeded to the point
// farthest from its assigned centroid.
Partition kmeans(const Matrix& z, const Matrix& y, std::size_t k, std::size_t restarts,
                 std::uint64_t seed);

// Upper estimate of the total cluster variation: min over r = 1..k_max of
// the k-means WCSS (a restricted minimum, hence an upper bound).
double tcv_estimate(const Matrix& z, const Matrix& y, std::size_t k_max, std::size_t restarts,
                    std::uint64_t seed);

// WCSS of the partition induced by the given class labels.
double class_partition_wcss(const Matrix& z, const Matrix& y,
                            const std::vector<std::size_t>& class_labels);

// Gaussian-mixture TCV bound: sum_k pi_k (Tr(Sigma_k) + ||Sigma_k||_F / sqrt(N_k)).
double gaussian_tcv_bound(const GaussianMixtureSpec& spec);

// Labels-only total cluster variation estimate (z omitted).
double label_tcv(const Matrix& y, std::size_t k_max, std::size_t restarts, std::uint64_t seed);

}  // namespace nrc
