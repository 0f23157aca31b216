#include "core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/decomp.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace nrc {

namespace {

constexpr std::uint64_t kTagDraws = 0xD3A7A5E7ULL;
constexpr std::uint64_t kTagMeans = 0x5EED5B45ULL;

void validate(const GaussianMixtureSpec& spec) {
  require(spec.k >= 1 && spec.dim >= 1, ErrorCode::InvalidArgument,
          "mixture needs k >= 1 and dim >= 1");
  require(spec.counts.size() == spec.k, ErrorCode::InvalidArgument,
          "mixture counts must list one entry per cluster");
  for (std::size_t c : spec.counts)
    require(c >= 1, ErrorCode::InvalidArgument, "mixture counts must be >= 1");
  if (!spec.means.empty()) {
    require(spec.means.size() == spec.k, ErrorCode::InvalidArgument,
            "mixture means must list one vector per cluster");
    for (const auto& m : spec.means)
      require(m.size() == spec.dim, ErrorCode::InvalidArgument, "mixture mean has wrong length");
  }
  if (spec.isotropic()) {
    const auto& sig = std::get<0>(spec.covariance);
    require(sig.size() == spec.k, ErrorCode::InvalidArgument,
            "mixture needs one sigma per cluster");
    for (double s : sig)
      require(s >= 0.0, ErrorCode::InvalidArgument, "mixture sigma must be >= 0");
  } else {
    const auto& cov = std::get<1>(spec.covariance);
    require(cov.size() == spec.k, ErrorCode::InvalidArgument,
            "mixture needs one covariance per cluster");
    for (const Matrix& c : cov) {
      require(c.rows() == spec.dim && c.cols() == spec.dim, ErrorCode::InvalidArgument,
              "mixture covariance has wrong shape");
      for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = i + 1; j < c.cols(); ++j)
          require(std::abs(c(i, j) - c(j, i)) <= 1e-10, ErrorCode::InvalidArgument,
                  "mixture covariance is not symmetric");
    }
  }
}

double max_sigma_scale(const GaussianMixtureSpec& spec) {
  if (spec.isotropic()) {
    double m = 0.0;
    for (double s : std::get<0>(spec.covariance)) m = std::max(m, s);
    return m;
  }
  double m = 0.0;
  for (const Matrix& c : std::get<1>(spec.covariance)) {
    for (std::size_t i = 0; i < c.rows(); ++i) m = std::max(m, std::sqrt(std::max(0.0, c(i, i))));
  }
  return m;
}

}  // namespace

std::size_t GaussianMixtureSpec::total_count() const {
  std::size_t n = 0;
  for (std::size_t c : counts) n += c;
  return n;
}

std::vector<std::vector<double>> means_on_sphere(std::size_t k, std::size_t dim, double radius,
                                                 std::uint64_t seed) {
  std::vector<std::vector<double>> means(k);
  for (std::size_t c = 0; c < k; ++c) {
    Crng rng({seed, kTagMeans, c});
    means[c] = rng.next_unit_vector(dim);
    for (double& e : means[c]) e *= radius;
  }
  return means;
}

GaussianMixtureSpec balanced_isotropic_spec(std::size_t k, std::size_t dim, std::size_t n_total,
                                            double sigma, std::uint64_t seed, double mean_radius) {
  require(k >= 1 && n_total >= k, ErrorCode::InvalidArgument,
          "balanced spec needs n_total >= k >= 1");
  GaussianMixtureSpec spec;
  spec.k = k;
  spec.dim = dim;
  spec.seed = seed;
  spec.covariance = std::vector<double>(k, sigma);
  spec.counts.assign(k, n_total / k);
  for (std::size_t i = 0; i < n_total % k; ++i) ++spec.counts[i];
  const double radius = mean_radius >= 0.0 ? mean_radius : 5.0 * sigma;
  spec.means = means_on_sphere(k, dim, radius, seed);
  return spec;
}

double mixture_normal_draw(std::uint64_t seed, std::uint64_t cluster, std::uint64_t point,
                           std::uint64_t component) {
  const std::uint64_t h1 = mix_keys({seed, kTagDraws, cluster, point, 2 * component});
  const std::uint64_t h2 = mix_keys({seed, kTagDraws, cluster, point, 2 * component + 1});
  return normal_from_bits(h1, h2);
}

Dataset sample_gaussian_mixture(const GaussianMixtureSpec& spec_in) {
  validate(spec_in);
  GaussianMixtureSpec spec = spec_in;
  if (spec.means.empty())
    spec.means = means_on_sphere(spec.k, spec.dim, 5.0 * max_sigma_scale(spec), spec.seed);

  const std::size_t n = spec.total_count();
  const std::size_t d = spec.dim;

  // SPD roots for the full-covariance variant, one per cluster.
  std::vector<Matrix> roots;
  if (!spec.isotropic()) {
    for (const Matrix& c : std::get<1>(spec.covariance)) roots.push_back(spd_sqrt(c));
  }

  Dataset ds;
  ds.x = Matrix(d, n);
  ds.y = Matrix(spec.k, n);
  std::vector<std::size_t> labels(n);

  std::vector<double> v(d), dev(d);
  std::size_t col = 0;
  for (std::size_t c = 0; c < spec.k; ++c) {
    for (std::size_t i = 0; i < spec.counts[c]; ++i, ++col) {
      for (std::size_t j = 0; j < d; ++j) v[j] = mixture_normal_draw(spec.seed, c, i, j);
      if (spec.isotropic()) {
        const double s = std::get<0>(spec.covariance)[c];
        for (std::size_t j = 0; j < d; ++j) dev[j] = s * v[j];
      } else {
        const Matrix& r = roots[c];
        for (std::size_t j = 0; j < d; ++j) {
          double acc = 0.0;
          const double* rj = r.row_ptr(j);
          for (std::size_t p = 0; p < d; ++p) acc += rj[p] * v[p];
          dev[j] = acc;
        }
      }
      for (std::size_t j = 0; j < d; ++j) ds.x(j, col) = spec.means[c][j] + dev[j];
      ds.y(c, col) = 1.0;
      labels[col] = c;
    }
  }
  ds.class_labels = std::move(labels);
  ds.provenance = spec;
  return ds;
}

Dataset autoencoder_labels(const Dataset& ds) {
  Dataset out = ds;
  out.y = ds.x;
  return out;
}

Dataset one_hot_labels(const Dataset& ds, std::size_t num_classes) {
  require(ds.class_labels.has_value(), ErrorCode::Precondition,
          "one_hot_labels needs class labels");
  require(num_classes >= 1, ErrorCode::InvalidArgument, "one_hot_labels needs num_classes >= 1");
  const auto& labels = *ds.class_labels;
  for (std::size_t l : labels)
    require(l < num_classes, ErrorCode::Precondition,
            "class label " + std::to_string(l) + " >= num_classes");
  Dataset out = ds;
  out.y = Matrix(num_classes, ds.n(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) out.y(labels[i], i) = 1.0;
  return out;
}

double stable_rank(const Matrix& cov) {
  const SymEig e = sym_eig(cov);
  double top = 0.0;
  for (double v : e.values) top = std::max(top, std::abs(v));
  require(top > 0.0, ErrorCode::InvalidArgument, "stable_rank of the zero matrix");
  return frobenius_norm_sq(cov) / (top * top);
}

}  // namespace nrc
