#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "core/matrix.hpp"

namespace nrc {

// K-cluster Gaussian mixture. Covariance is either one isotropic standard
// deviation per cluster (Sigma_k = sigma_k^2 I) or one full SPD matrix per
// cluster. Draws are keyed by (seed, cluster, point, component), so each
// cluster owns an independent stream and changing one cluster's count never
// perturbs another.
struct GaussianMixtureSpec {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<std::vector<double>> means;  // k vectors of length dim; empty => default sphere
  std::variant<std::vector<double>, std::vector<Matrix>> covariance;
  std::vector<std::size_t> counts;
  std::uint64_t seed = 0;

  std::size_t total_count() const;
  bool isotropic() const { return covariance.index() == 0; }
};

struct Dataset {
  Matrix x;  // d x N
  Matrix y;  // c x N
  std::optional<std::vector<std::size_t>> class_labels;
  std::optional<GaussianMixtureSpec> provenance;

  std::size_t n() const { return x.cols(); }
};

// Convenience builder: equal-count isotropic mixture with default means.
// mean_radius < 0 picks the default 5 * sigma sphere.
GaussianMixtureSpec balanced_isotropic_spec(std::size_t k, std::size_t dim, std::size_t n_total,
                                            double sigma, std::uint64_t seed,
                                            double mean_radius = -1.0);

// k points drawn uniformly from the sphere of the given radius.
std::vector<std::vector<double>> means_on_sphere(std::size_t k, std::size_t dim, double radius,
                                                 std::uint64_t seed);

// Columns are mu_k + Sigma_k^{1/2} v with v standard normal; grouped by
// cluster in spec order; class_labels record the cluster. Labels default to
// one-hot cluster indicators (k x N).
Dataset sample_gaussian_mixture(const GaussianMixtureSpec& spec);

// y := x (autoencoding task); class labels preserved.
Dataset autoencoder_labels(const Dataset& ds);

// y := one-hot of class_labels over num_classes rows.
Dataset one_hot_labels(const Dataset& ds, std::size_t num_classes);

// Stable rank ||Sigma||_F^2 / ||Sigma||_2^2 of a symmetric matrix.
double stable_rank(const Matrix& cov);

// Standard normal deviate for (seed, cluster, point, component); exposed so
// tests can reproduce individual draws.
double mixture_normal_draw(std::uint64_t seed, std::uint64_t cluster, std::uint64_t point,
                           std::uint64_t component);

}  // namespace nrc
