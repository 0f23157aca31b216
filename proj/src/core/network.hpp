#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "core/clustering.hpp"
#include "core/dataset.hpp"
#include "core/matrix.hpp"
#include "core/spectral.hpp"

namespace nrc {

enum class Activation { Tanh, Identity };

// Feedforward parameters Theta = (W_1..W_L, b_1..b_L) with one activation
// tag per layer. Layer l in 1..L maps d_{l-1} -> d_l; weights[l-1] is W_l.
// Also used as the container for gradients, which share the shape.
struct MlpParams {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  std::vector<Activation> activations;

  std::size_t depth() const { return weights.size(); }
  std::size_t input_dim() const { return weights.front().cols(); }
  std::size_t output_dim() const { return weights.back().rows(); }
  double norm_sq() const;
};

// Layer outputs for one batch: z[0] is the input, z[l] = act_l(a_l) with
// pre_activations[l-1] = a_l = W_l z[l-1] + b_l.
struct ForwardTrace {
  std::vector<Matrix> z;
  std::vector<Matrix> pre_activations;
};

struct TrainConfig {
  double weight_decay = 0.0;     // lambda
  double learning_rate = 1e-2;
  std::size_t max_epochs = 1000;
  std::size_t batch_size = 0;    // 0 = full batch
  double grad_tol = 1e-6;
  std::uint64_t seed = 0;
  std::size_t record_every = 100;
  std::vector<double> epsilons = {0.1};
  bool train_biases = true;  // false pins biases at their init (bias-free linear fits)
};

struct TrainRecord {
  std::size_t epoch = 0;
  double loss_total = 0.0;
  double loss_data = 0.0;
  double grad_norm = 0.0;
  std::vector<SpectralReport> per_layer_spectra;
  std::optional<std::vector<double>> per_layer_tcv;  // class-partition WCSS of (z^l, y)
  bool converged = false;
};

// Symmetric fan-based uniform init, biases zero, deterministic in seed.
MlpParams init_params(const std::vector<std::size_t>& dims,
                      const std::vector<Activation>& activations, std::uint64_t seed);

ForwardTrace forward(const MlpParams& theta, const Matrix& x_batch);

// (total, data): total = data + lambda * ||Theta||^2 with the squared
// Euclidean per-sample loss ||yhat - y||^2 (no 1/2 factor) averaged over N.
std::pair<double, double> loss(const MlpParams& theta, const Dataset& ds, double lambda);

// Gradient of `loss` restricted to the given batch.
MlpParams gradient(const MlpParams& theta, const Dataset& batch, double lambda);

// Plain (S)GD; stops when the full-batch gradient norm drops below grad_tol
// or epochs run out. Deterministic given the seed. Throws
// ErrorCode::Divergence (message carries the last finite epoch) if the loss
// leaves the finite range.
std::pair<MlpParams, std::vector<TrainRecord>> train(const MlpParams& theta0, const Dataset& ds,
                                                     const TrainConfig& cfg);

// max over layers of ||grad_{W_l} L0 + 2 lambda W_l||_F
//                  / (2 lambda ||W_l||_F + eps); zero exactly at critical
// points of the regularized loss.
double stationarity_residual(const MlpParams& theta, const Dataset& ds, double lambda);

// Per-layer numerical rank (rel_tol 1e-8) of the unregularized gradient over
// exactly the chosen samples; each entry is at most min(K, layer dims).
std::vector<std::size_t> gradient_rank_probe(const MlpParams& theta, const Dataset& ds,
                                             const std::vector<std::size_t>& batch_indices);

// Gradient w.r.t. W_l (l > j, both in math numbering with j = 0 the input)
// of the centroid-based data loss sum_k pi_k l(f_j(Theta_j, zbar_k^j), ybar_k).
Matrix centroid_gradient(const MlpParams& theta, const Matrix& z_j, const Matrix& y,
                         const Partition& p, std::size_t j, std::size_t l);

// (||full grad - centroid grad||_F, WCSS_j) for the given partition; the
// centroids are recomputed on the current layer-j embedding.
std::pair<double, double> lemma33_residual(const MlpParams& theta, const Dataset& ds,
                                           const Partition& p, std::size_t j, std::size_t l);

// Monte Carlo lower estimate of sup ||D^2_{(z,y)} grad_{W_l} l|| over the
// per-cluster convex hulls: Dirichlet-weighted hull points, random unit
// directions, second-order central differences (step 1e-3). Being a sampled
// maximum, it underestimates the true supremum.
double estimate_hessian_constant(const MlpParams& theta, const Matrix& z_j, const Matrix& y,
                                 const Partition& p, std::size_t j, std::size_t l,
                                 std::size_t samples, std::uint64_t seed);

// Unregularized batch loss/gradient of the sub-network from layer j (inputs
// are layer-j embeddings). col_weights empty = mean over columns. Gradients
// for layers <= j are zero. Exposed for the probes and tests.
struct BatchGradient {
  MlpParams grad;
  double loss_data = 0.0;
};
BatchGradient sub_network_gradient(const MlpParams& theta, std::size_t from_layer,
                                   const Matrix& z_in, const Matrix& y,
                                   std::span<const double> col_weights = {});

}  // namespace nrc
