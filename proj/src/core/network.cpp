#include "core/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "core/decomp.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace nrc {

namespace {

constexpr std::uint64_t kTagInit = 0x1217A11ULL;
constexpr std::uint64_t kTagShuffle = 0x5481FFULL;
constexpr std::uint64_t kTagHessian = 0x8E55ULL;

void apply_activation(Matrix& a, Activation act) {
  if (act == Activation::Identity) return;
  for (double& e : a.data()) e = std::tanh(e);
}

// sigma'(a) expressed through z = sigma(a); for tanh that is 1 - z^2.
void multiply_activation_derivative(Matrix& delta, const Matrix& z, Activation act) {
  if (act == Activation::Identity) return;
  double* d = delta.data().data();
  const double* zd = z.data().data();
  for (std::size_t i = 0; i < delta.size(); ++i) d[i] *= 1.0 - zd[i] * zd[i];
}

void add_bias_columns(Matrix& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* row = a.row_ptr(i);
    const double bi = b[i];
    for (std::size_t j = 0; j < a.cols(); ++j) row[j] += bi;
  }
}

void check_shapes(const MlpParams& theta) {
  require(theta.depth() >= 1, ErrorCode::InvalidArgument, "network needs at least one layer");
  require(theta.biases.size() == theta.depth() && theta.activations.size() == theta.depth(),
          ErrorCode::InvalidArgument, "weights/biases/activations lengths disagree");
  for (std::size_t l = 0; l < theta.depth(); ++l) {
    require(theta.biases[l].size() == theta.weights[l].rows(), ErrorCode::Mismatch,
            "bias length disagrees with weight rows at layer " + std::to_string(l + 1));
    if (l + 1 < theta.depth())
      require(theta.weights[l + 1].cols() == theta.weights[l].rows(), ErrorCode::Mismatch,
              "weight shapes do not chain at layer " + std::to_string(l + 1));
  }
}

MlpParams zero_like(const MlpParams& theta) {
  MlpParams g;
  g.activations = theta.activations;
  g.weights.reserve(theta.depth());
  g.biases.reserve(theta.depth());
  for (std::size_t l = 0; l < theta.depth(); ++l) {
    g.weights.emplace_back(theta.weights[l].rows(), theta.weights[l].cols(), 0.0);
    g.biases.emplace_back(theta.biases[l].size(), 0.0);
  }
  return g;
}

double grad_norm(const MlpParams& g) {
  double acc = 0.0;
  for (const Matrix& w : g.weights) acc += frobenius_norm_sq(w);
  for (const auto& b : g.biases) acc += vector_norm_sq(b);
  return std::sqrt(acc);
}

void add_regularization(MlpParams& g, const MlpParams& theta, double lambda) {
  if (lambda == 0.0) return;
  for (std::size_t l = 0; l < theta.depth(); ++l) {
    add_scaled_in_place(g.weights[l], 2.0 * lambda, theta.weights[l]);
    for (std::size_t i = 0; i < g.biases[l].size(); ++i)
      g.biases[l][i] += 2.0 * lambda * theta.biases[l][i];
  }
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Crng rng({seed, kTagShuffle, epoch});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.next_below(i)]);
  return idx;
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> indices) {
  Dataset out;
  out.x = select_cols(ds.x, indices);
  out.y = select_cols(ds.y, indices);
  if (ds.class_labels) {
    std::vector<std::size_t> labels(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) labels[i] = (*ds.class_labels)[indices[i]];
    out.class_labels = std::move(labels);
  }
  return out;
}

}  // namespace

double MlpParams::norm_sq() const {
  double acc = 0.0;
  for (const Matrix& w : weights) acc += frobenius_norm_sq(w);
  for (const auto& b : biases) acc += vector_norm_sq(b);
  return acc;
}

MlpParams init_params(const std::vector<std::size_t>& dims,
                      const std::vector<Activation>& activations, std::uint64_t seed) {
  require(dims.size() >= 2, ErrorCode::InvalidArgument, "init_params needs input and output dims");
  require(activations.size() == dims.size() - 1, ErrorCode::InvalidArgument,
          "init_params needs one activation per layer");
  MlpParams theta;
  theta.activations = activations;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t rows = dims[l + 1];
    const std::size_t cols = dims[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix w(rows, cols);
    Crng rng({seed, kTagInit, l});
    for (double& e : w.data()) e = bound * (2.0 * rng.next_u01() - 1.0);
    theta.weights.push_back(std::move(w));
    theta.biases.emplace_back(rows, 0.0);
  }
  return theta;
}

ForwardTrace forward(const MlpParams& theta, const Matrix& x_batch) {
  check_shapes(theta);
  require(x_batch.rows() == theta.input_dim(), ErrorCode::Precondition,
          "input rows " + std::to_string(x_batch.rows()) + " != first layer columns " +
              std::to_string(theta.input_dim()));
  ForwardTrace trace;
  trace.z.reserve(theta.depth() + 1);
  trace.pre_activations.reserve(theta.depth());
  trace.z.push_back(x_batch);
  for (std::size_t l = 0; l < theta.depth(); ++l) {
    Matrix a = multiply(theta.weights[l], trace.z.back());
    add_bias_columns(a, theta.biases[l]);
    trace.pre_activations.push_back(a);
    apply_activation(a, theta.activations[l]);
    trace.z.push_back(std::move(a));
  }
  return trace;
}

BatchGradient sub_network_gradient(const MlpParams& theta, std::size_t from_layer,
                                   const Matrix& z_in, const Matrix& y,
                                   std::span<const double> col_weights) {
  check_shapes(theta);
  const std::size_t depth = theta.depth();
  require(from_layer < depth, ErrorCode::Precondition, "from_layer must be below the depth");
  require(z_in.cols() == y.cols(), ErrorCode::Mismatch, "inputs and targets disagree in count");
  require(!col_weights.empty() ? col_weights.size() == z_in.cols() : true, ErrorCode::Mismatch,
          "column weight count disagrees with batch");
  const std::size_t expected_in =
      from_layer == 0 ? theta.input_dim() : theta.weights[from_layer - 1].rows();
  require(z_in.rows() == expected_in, ErrorCode::Precondition,
          "embedding dimension does not match layer " + std::to_string(from_layer));
  require(y.rows() == theta.output_dim(), ErrorCode::Mismatch,
          "target rows do not match network output");

  const std::size_t batch = z_in.cols();

  // Forward through layers from_layer+1 .. L.
  std::vector<Matrix> z;
  z.reserve(depth - from_layer + 1);
  z.push_back(z_in);
  for (std::size_t l = from_layer; l < depth; ++l) {
    Matrix a = multiply(theta.weights[l], z.back());
    add_bias_columns(a, theta.biases[l]);
    apply_activation(a, theta.activations[l]);
    z.push_back(std::move(a));
  }

  // Weighted residual: delta_L(:,i) = w_i * 2 (zhat_i - y_i) (.) sigma'.
  const Matrix& out = z.back();
  Matrix delta = subtract(out, y);
  double loss_acc = 0.0;
  const double mean_w = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < delta.rows(); ++i) {
    double* row = delta.row_ptr(i);
    for (std::size_t c = 0; c < batch; ++c) {
      const double w = col_weights.empty() ? mean_w : col_weights[c];
      loss_acc += w * row[c] * row[c];
      row[c] *= 2.0 * w;
    }
  }
  multiply_activation_derivative(delta, out, theta.activations[depth - 1]);

  BatchGradient result;
  result.loss_data = loss_acc;
  result.grad = zero_like(theta);
  for (std::size_t l = depth; l-- > from_layer;) {
    const Matrix& z_prev = z[l - from_layer];
    result.grad.weights[l] = multiply_a_bt(delta, z_prev);
    auto& gb = result.grad.biases[l];
    for (std::size_t i = 0; i < delta.rows(); ++i) {
      const double* row = delta.row_ptr(i);
      double acc = 0.0;
      for (std::size_t c = 0; c < batch; ++c) acc += row[c];
      gb[i] = acc;
    }
    if (l > from_layer) {
      Matrix next = multiply_at_b(theta.weights[l], delta);
      multiply_activation_derivative(next, z_prev, theta.activations[l - 1]);
      delta = std::move(next);
    }
  }
  return result;
}

std::pair<double, double> loss(const MlpParams& theta, const Dataset& ds, double lambda) {
  const ForwardTrace trace = forward(theta, ds.x);
  const Matrix& out = trace.z.back();
  require(ds.y.rows() == out.rows() && ds.y.cols() == out.cols(), ErrorCode::Mismatch,
          "targets do not match network output");
  double acc = 0.0;
  const double* od = out.data().data();
  const double* yd = ds.y.data().data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = od[i] - yd[i];
    acc += d * d;
  }
  const double data = acc / static_cast<double>(ds.n());
  return {data + lambda * theta.norm_sq(), data};
}

MlpParams gradient(const MlpParams& theta, const Dataset& batch, double lambda) {
  BatchGradient g = sub_network_gradient(theta, 0, batch.x, batch.y);
  add_regularization(g.grad, theta, lambda);
  return std::move(g.grad);
}

std::pair<MlpParams, std::vector<TrainRecord>> train(const MlpParams& theta0, const Dataset& ds,
                                                     const TrainConfig& cfg) {
  require(cfg.learning_rate > 0.0, ErrorCode::InvalidArgument, "learning_rate must be > 0");
  require(cfg.grad_tol > 0.0, ErrorCode::InvalidArgument, "grad_tol must be > 0");
  require(cfg.weight_decay >= 0.0, ErrorCode::InvalidArgument, "weight_decay must be >= 0");
  require(cfg.max_epochs >= 1, ErrorCode::InvalidArgument, "max_epochs must be >= 1");
  check_shapes(theta0);

  MlpParams theta = theta0;
  std::vector<TrainRecord> records;
  const std::size_t n = ds.n();
  const std::size_t record_every = std::max<std::size_t>(1, cfg.record_every);
  std::size_t last_finite_epoch = 0;

  auto make_record = [&](std::size_t epoch, double loss_data, double gnorm, bool converged) {
    TrainRecord rec;
    rec.epoch = epoch;
    rec.loss_data = loss_data;
    rec.loss_total = loss_data + cfg.weight_decay * theta.norm_sq();
    rec.grad_norm = gnorm;
    rec.converged = converged;
    rec.per_layer_spectra.reserve(theta.depth());
    for (const Matrix& w : theta.weights)
      rec.per_layer_spectra.push_back(spectral_report(w, cfg.epsilons));
    if (ds.class_labels) {
      const ForwardTrace trace = forward(theta, ds.x);
      std::vector<double> tcv(theta.depth());
      for (std::size_t l = 1; l <= theta.depth(); ++l)
        tcv[l - 1] = class_partition_wcss(trace.z[l], ds.y, *ds.class_labels);
      rec.per_layer_tcv = std::move(tcv);
    }
    records.push_back(std::move(rec));
  };

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    if (cfg.batch_size > 0 && cfg.batch_size < n) {
      const auto order = shuffled_indices(n, cfg.seed, epoch);
      for (std::size_t start = 0; start < n; start += cfg.batch_size) {
        const std::size_t len = std::min(cfg.batch_size, n - start);
        const Dataset mini = subset(ds, std::span(order).subspan(start, len));
        BatchGradient g = sub_network_gradient(theta, 0, mini.x, mini.y);
        add_regularization(g.grad, theta, cfg.weight_decay);
        for (std::size_t l = 0; l < theta.depth(); ++l) {
          add_scaled_in_place(theta.weights[l], -cfg.learning_rate, g.grad.weights[l]);
          if (!cfg.train_biases) continue;
          for (std::size_t i = 0; i < theta.biases[l].size(); ++i)
            theta.biases[l][i] -= cfg.learning_rate * g.grad.biases[l][i];
        }
      }
    }

    // Full-batch gradient: the SGD convergence check, or the GD step itself.
    BatchGradient g = sub_network_gradient(theta, 0, ds.x, ds.y);
    add_regularization(g.grad, theta, cfg.weight_decay);
    if (!cfg.train_biases)
      for (auto& b : g.grad.biases) std::fill(b.begin(), b.end(), 0.0);
    const double gnorm = grad_norm(g.grad);

    if (!std::isfinite(g.loss_data) || !std::isfinite(gnorm))
      fail(ErrorCode::Divergence,
           "training diverged; last finite epoch " + std::to_string(last_finite_epoch));
    last_finite_epoch = epoch;

    const bool converged = gnorm < cfg.grad_tol;
    if (converged || epoch + 1 == cfg.max_epochs) {
      make_record(epoch, g.loss_data, gnorm, converged);
      break;
    }
    if (epoch % record_every == 0) make_record(epoch, g.loss_data, gnorm, false);

    if (cfg.batch_size == 0 || cfg.batch_size >= n) {
      for (std::size_t l = 0; l < theta.depth(); ++l) {
        add_scaled_in_place(theta.weights[l], -cfg.learning_rate, g.grad.weights[l]);
        if (!cfg.train_biases) continue;
        for (std::size_t i = 0; i < theta.biases[l].size(); ++i)
          theta.biases[l][i] -= cfg.learning_rate * g.grad.biases[l][i];
      }
    }
  }
  return {std::move(theta), std::move(records)};
}

double stationarity_residual(const MlpParams& theta, const Dataset& ds, double lambda) {
  require(lambda > 0.0, ErrorCode::Precondition, "stationarity_residual needs lambda > 0");
  const BatchGradient g = sub_network_gradient(theta, 0, ds.x, ds.y);
  double worst = 0.0;
  for (std::size_t l = 0; l < theta.depth(); ++l) {
    Matrix r = g.grad.weights[l];
    add_scaled_in_place(r, 2.0 * lambda, theta.weights[l]);
    const double denom = 2.0 * lambda * frobenius_norm(theta.weights[l]) +
                         std::numeric_limits<double>::epsilon();
    worst = std::max(worst, frobenius_norm(r) / denom);
  }
  return worst;
}

std::vector<std::size_t> gradient_rank_probe(const MlpParams& theta, const Dataset& ds,
                                             const std::vector<std::size_t>& batch_indices) {
  require(!batch_indices.empty(), ErrorCode::Precondition, "gradient_rank_probe needs a batch");
  const Dataset batch = subset(ds, batch_indices);
  const BatchGradient g = sub_network_gradient(theta, 0, batch.x, batch.y);
  std::vector<std::size_t> ranks(theta.depth());
  for (std::size_t l = 0; l < theta.depth(); ++l) ranks[l] = numerical_rank(g.grad.weights[l], 1e-8);
  return ranks;
}

Matrix centroid_gradient(const MlpParams& theta, const Matrix& z_j, const Matrix& y,
                         const Partition& p, std::size_t j, std::size_t l) {
  require(j < l && l >= 1 && l <= theta.depth(), ErrorCode::Precondition,
          "centroid_gradient needs 0 <= j < l <= L");
  require(z_j.cols() == y.cols(), ErrorCode::Mismatch, "z_j and y disagree in count");
  require(p.centroids_z.rows() == z_j.rows() && p.centroids_y.rows() == y.rows(),
          ErrorCode::Mismatch, "partition centroids do not match (z_j, y)");
  const BatchGradient g =
      sub_network_gradient(theta, j, p.centroids_z, p.centroids_y, p.weights);
  return g.grad.weights[l - 1];
}

std::pair<double, double> lemma33_residual(const MlpParams& theta, const Dataset& ds,
                                           const Partition& p, std::size_t j, std::size_t l) {
  require(j < l && l >= 1 && l <= theta.depth(), ErrorCode::Precondition,
          "lemma33_residual needs 0 <= j < l <= L");
  const ForwardTrace trace = forward(theta, ds.x);
  const Matrix& z_j = trace.z[j];
  const Partition fresh = build_partition(z_j, ds.y, p.assignments);

  const BatchGradient full = sub_network_gradient(theta, 0, ds.x, ds.y);
  const Matrix centroid = centroid_gradient(theta, z_j, ds.y, fresh, j, l);
  const double residual = frobenius_norm(subtract(full.grad.weights[l - 1], centroid));
  return {residual, wcss(z_j, ds.y, fresh)};
}

double estimate_hessian_constant(const MlpParams& theta, const Matrix& z_j, const Matrix& y,
                                 const Partition& p, std::size_t j, std::size_t l,
                                 std::size_t samples, std::uint64_t seed) {
  require(j < l && l >= 1 && l <= theta.depth(), ErrorCode::Precondition,
          "estimate_hessian_constant needs 0 <= j < l <= L");
  require(samples >= 1, ErrorCode::Precondition, "estimate_hessian_constant needs samples >= 1");
  const std::size_t dz = z_j.rows();
  const std::size_t dy = y.rows();
  constexpr double kStep = 1e-3;

  // Member lists per cluster.
  std::vector<std::vector<std::size_t>> members(p.k);
  for (std::size_t i = 0; i < p.assignments.size(); ++i) members[p.assignments[i]].push_back(i);

  const std::vector<double> one = {1.0};
  auto grad_at = [&](const std::vector<double>& z_pt, const std::vector<double>& y_pt) {
    Matrix zc(dz, 1);
    Matrix yc(dy, 1);
    for (std::size_t r = 0; r < dz; ++r) zc(r, 0) = z_pt[r];
    for (std::size_t r = 0; r < dy; ++r) yc(r, 0) = y_pt[r];
    return sub_network_gradient(theta, j, zc, yc, one).grad.weights[l - 1];
  };

  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Crng rng({seed, kTagHessian, s});
    const std::size_t c = rng.next_below(p.k);
    const auto& idx = members[c];
    const auto w = rng.next_simplex_weights(idx.size());

    std::vector<double> z_pt(dz, 0.0), y_pt(dy, 0.0);
    for (std::size_t t = 0; t < idx.size(); ++t) {
      for (std::size_t r = 0; r < dz; ++r) z_pt[r] += w[t] * z_j(r, idx[t]);
      for (std::size_t r = 0; r < dy; ++r) y_pt[r] += w[t] * y(r, idx[t]);
    }

    const auto dir = rng.next_unit_vector(dz + dy);
    std::vector<double> zp = z_pt, zm = z_pt, yp = y_pt, ym = y_pt;
    for (std::size_t r = 0; r < dz; ++r) {
      zp[r] += kStep * dir[r];
      zm[r] -= kStep * dir[r];
    }
    for (std::size_t r = 0; r < dy; ++r) {
      yp[r] += kStep * dir[dz + r];
      ym[r] -= kStep * dir[dz + r];
    }

    Matrix d2 = grad_at(zp, yp);
    add_scaled_in_place(d2, -2.0, grad_at(z_pt, y_pt));
    add_scaled_in_place(d2, 1.0, grad_at(zm, ym));
    best = std::max(best, frobenius_norm(d2) / (kStep * kStep));
  }
  return best;
}

}  // namespace nrc
