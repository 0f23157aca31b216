#include "core/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "core/clustering.hpp"
#include "core/dataset.hpp"
#include "core/decomp.hpp"
#include "core/errors.hpp"
#include "core/linear_theory.hpp"
#include "core/network.hpp"
#include "core/rng.hpp"

namespace nrc {

namespace {

using Clock = std::chrono::steady_clock;

std::string fnv1a_digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::int64_t elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Thm53Cells {
  std::vector<double> lambdas, sigmas;
  // indexed [lambda][sigma]
  std::vector<std::vector<double>> distance, bound;
};

Thm53Cells thm53_grid(std::uint64_t seed) {
  Thm53Cells g;
  g.lambdas = log_grid(1e-3, 1e-1, 4);
  g.sigmas = log_grid(0.05, 0.5, 4);
  const std::size_t d = 16, k = 4, n = 500;
  const double radius = 5.0 * g.sigmas.back();
  g.distance.assign(g.lambdas.size(), std::vector<double>(g.sigmas.size(), 0.0));
  g.bound = g.distance;
  for (std::size_t si = 0; si < g.sigmas.size(); ++si) {
    const auto spec = balanced_isotropic_spec(k, d, n, g.sigmas[si], seed, radius);
    const Dataset ds = autoencoder_labels(sample_gaussian_mixture(spec));
    const Partition part = build_partition(ds.x, ds.y, *ds.class_labels);
    const CentroidProblem cp = centroid_problem(ds.x, ds.y, part);
    const double tcv = wcss(ds.x, ds.y, part);
    const double xbar = frobenius_norm(cp.x_bar);
    const double ybar = frobenius_norm(cp.y_bar);
    for (std::size_t li = 0; li < g.lambdas.size(); ++li) {
      const double lambda = g.lambdas[li];
      const RidgeProblem pr(ds.x, ds.y, lambda);
      const Matrix theta_full = ridge_minimizer(pr);
      const Matrix theta_cent = centroid_minimizer(cp, lambda, n);
      g.distance[li][si] = frobenius_norm(subtract(theta_full, theta_cent));
      g.bound[li][si] = thm53_bound(tcv, lambda, d, n, xbar, ybar);
    }
  }
  return g;
}

struct Thm54Problem {
  Matrix x, y;
  double label_tcv_value = 0.0;
  std::vector<double> lambdas;
};

Thm54Problem thm54_problem(std::uint64_t seed) {
  const std::size_t d = 16, c = 6, k = 3, n = 500;
  const double noise = 0.1;
  Thm54Problem p;
  p.lambdas = log_grid(1e-3, 1e-1, 4);
  p.x = Matrix(d, n);
  Crng xrng({seed, 0x7854ULL, 1});
  for (double& e : p.x.data()) e = xrng.next_normal();

  const auto protos = means_on_sphere(k, c, 2.0, mix_keys({seed, 0x7854ULL, 2}));
  p.y = Matrix(c, n);
  Crng yrng({seed, 0x7854ULL, 3});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = i % k;
    for (std::size_t r = 0; r < c; ++r) p.y(r, i) = protos[cls][r] + noise * yrng.next_normal();
  }
  p.label_tcv_value = label_tcv(p.y, k, 8, mix_keys({seed, 0x7854ULL, 4}));
  return p;
}

AutoencoderCellParams default_collapse_cell() {
  AutoencoderCellParams cell;
  cell.clusters = 4;
  cell.dim = 32;
  cell.n = 1000;
  cell.mean_radius = 2.5;
  cell.hidden = {16, 12, 16};
  cell.hidden_activation = Activation::Tanh;
  cell.output_activation = Activation::Identity;
  cell.rank_k = 4;
  cell.train.learning_rate = 0.05;
  cell.train.max_epochs = 40000;
  cell.train.grad_tol = 1e-3;
  cell.train.record_every = 10000;
  cell.train.batch_size = 0;
  return cell;
}

}  // namespace

nlohmann::ordered_json CheckReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["passed"] = passed;
  j["observed"] = observed;
  j["bounds"] = bounds;
  j["config_digest"] = config_digest;
  j["runtime_ms"] = runtime_ms;
  return j;
}

CheckReport check_prop31(std::uint64_t seed) {
  const auto start = Clock::now();
  CheckReport rep;
  rep.name = "prop31_gradient_rank";
  rep.config_digest = fnv1a_digest("prop31|seed=" + std::to_string(seed) + "|widths=8,6,8|n=16");

  const std::vector<std::size_t> dims = {8, 8, 6, 8};
  const std::vector<Activation> acts(3, Activation::Tanh);
  const MlpParams theta = init_params(dims, acts, mix_keys({seed, 0x31ULL, 0}));

  Dataset ds;
  ds.x = Matrix(8, 16);
  ds.y = Matrix(8, 16);
  Crng rng({seed, 0x31ULL, 1});
  for (double& e : ds.x.data()) e = rng.next_normal();
  for (double& e : ds.y.data()) e = rng.next_normal();

  bool ok = true;
  for (std::size_t k : {std::size_t{1}, std::size_t{2}, std::size_t{5}}) {
    std::vector<std::size_t> batch(k);
    for (std::size_t i = 0; i < k; ++i) batch[i] = i;
    const Dataset sub{select_cols(ds.x, batch), select_cols(ds.y, batch), std::nullopt,
                      std::nullopt};
    const BatchGradient g = sub_network_gradient(theta, 0, sub.x, sub.y);
    std::size_t max_rank = 0;
    double max_ratio = 0.0;
    for (const Matrix& gw : g.grad.weights) {
      max_rank = std::max(max_rank, numerical_rank(gw, 1e-8));
      const auto sv = svd(gw).singular_values;
      if (k < sv.size() && sv[0] > 0.0) max_ratio = std::max(max_ratio, sv[k] / sv[0]);
    }
    const std::string suffix = "_k" + std::to_string(k);
    rep.observed["max_rank" + suffix] = static_cast<double>(max_rank);
    rep.observed["sigma_ratio" + suffix] = max_ratio;
    rep.bounds["max_rank" + suffix] = static_cast<double>(k);
    rep.bounds["sigma_ratio" + suffix] = 1e-8;
    ok = ok && max_rank <= k && max_ratio <= 1e-8;
  }
  rep.passed = ok;
  rep.runtime_ms = elapsed_ms(start);
  return rep;
}

CheckReport check_stationarity(std::uint64_t seed, double lambda) {
  const auto start = Clock::now();
  CheckReport rep;
  rep.name = "stationarity_eigen_equation";
  rep.config_digest = fnv1a_digest("stationarity|seed=" + std::to_string(seed) +
                                   "|lambda=" + format_g17(lambda) + "|d=16|width=8|k=4|n=200");
  if (lambda == 0.0) {
    // The identity lambda W = -grad L0 / 2 carries no content at lambda = 0.
    rep.passed = true;
    rep.observed["not_applicable"] = 1.0;
    rep.runtime_ms = elapsed_ms(start);
    return rep;
  }

  const auto spec = balanced_isotropic_spec(4, 16, 200, 0.2, seed, 1.0);
  const Dataset ds = autoencoder_labels(sample_gaussian_mixture(spec));
  const MlpParams theta0 = init_params({16, 8, 16}, {Activation::Tanh, Activation::Identity},
                                       mix_keys({seed, 0x57ULL}));
  TrainConfig cfg;
  cfg.weight_decay = lambda;
  cfg.learning_rate = 0.05;
  cfg.max_epochs = 300000;
  cfg.grad_tol = 1e-6;
  cfg.record_every = 100000;
  cfg.seed = seed;
  const auto trained = train(theta0, ds, cfg);
  const TrainRecord& last = trained.second.back();
  const double residual = stationarity_residual(trained.first, ds, lambda);

  rep.observed["residual"] = residual;
  rep.observed["grad_norm"] = last.grad_norm;
  rep.observed["converged"] = last.converged ? 1.0 : 0.0;
  rep.bounds["residual"] = 1e-4;
  rep.passed = last.converged && residual <= 1e-4;
  rep.runtime_ms = elapsed_ms(start);
  return rep;
}

CheckReport check_lemma33(std::uint64_t seed) {
  const auto start = Clock::now();
  CheckReport rep;
  rep.name = "lemma33_centroid_gradient";
  rep.config_digest =
      fnv1a_digest("lemma33|seed=" + std::to_string(seed) + "|d=16|k=4|n=400|sigmas=4");

  const std::vector<double> sigmas = {0.05, 0.1, 0.2, 0.4};
  const double radius = 5.0 * sigmas.back();
  const MlpParams theta = init_params({16, 8, 16}, {Activation::Tanh, Activation::Identity},
                                      mix_keys({seed, 0x33ULL}));

  std::vector<double> residuals, wcss_values;
  for (double sigma : sigmas) {
    const auto spec = balanced_isotropic_spec(4, 16, 400, sigma, seed, radius);
    const Dataset ds = autoencoder_labels(sample_gaussian_mixture(spec));
    const Partition part = build_partition(ds.x, ds.y, *ds.class_labels);
    const auto [residual, w] = lemma33_residual(theta, ds, part, 0, 2);
    residuals.push_back(residual);
    wcss_values.push_back(w);
  }

  // Degenerate clusters: every point sits on its centroid.
  const auto spec0 = balanced_isotropic_spec(4, 16, 400, 0.0, seed, radius);
  const Dataset ds0 = autoencoder_labels(sample_gaussian_mixture(spec0));
  const Partition part0 = build_partition(ds0.x, ds0.y, *ds0.class_labels);
  const double degenerate = lemma33_residual(theta, ds0, part0, 0, 2).first;

  bool monotone = true;
  for (std::size_t i = 0; i + 1 < residuals.size(); ++i)
    monotone = monotone && residuals[i] < residuals[i + 1];
  const double slope = loglog_slope(wcss_values, residuals);

  // Informational: the sampled curvature constant underestimates the true
  // supremum, so residual <= M_hat * WCSS is recorded but not gated.
  {
    const auto spec = balanced_isotropic_spec(4, 16, 400, sigmas.back(), seed, radius);
    const Dataset ds = autoencoder_labels(sample_gaussian_mixture(spec));
    const Partition part = build_partition(ds.x, ds.y, *ds.class_labels);
    const double m_hat =
        estimate_hessian_constant(theta, ds.x, ds.y, part, 0, 2, 64, mix_keys({seed, 0x33ULL, 2}));
    rep.observed["hessian_estimate"] = m_hat;
    rep.observed["residual_over_mhat_wcss"] =
        residuals.back() / (m_hat * wcss_values.back());
  }

  rep.observed["degenerate_residual"] = degenerate;
  rep.observed["slope"] = slope;
  rep.observed["monotone"] = monotone ? 1.0 : 0.0;
  rep.observed["residual_sigma_max"] = residuals.back();
  rep.bounds["degenerate_residual"] = 1e-8;
  rep.bounds["slope_low"] = 0.7;
  rep.bounds["slope_high"] = 1.3;
  rep.passed = degenerate <= 1e-8 && monotone && slope >= 0.7 && slope <= 1.3;
  rep.runtime_ms = elapsed_ms(start);
  return rep;
}

CheckReport check_thm53(std::uint64_t seed) {
  const auto start = Clock::now();
  CheckReport rep;
  rep.name = "thm53_centroid_minimizer_bound";
  rep.config_digest =
      fnv1a_digest("thm53|seed=" + std::to_string(seed) + "|d=16|k=4|n=500|grid=4x4");

  const Thm53Cells g = thm53_grid(seed);
  bool all_hold = true;
  double max_ratio = 0.0;
  for (std::size_t li = 0; li < g.lambdas.size(); ++li) {
    for (std::size_t si = 0; si < g.sigmas.size(); ++si) {
      const double ratio = g.distance[li][si] / g.bound[li][si];
      max_ratio = std::max(max_ratio, ratio);
      all_hold = all_hold && g.distance[li][si] <= g.bound[li][si];
    }
  }

  // Recorded trends: quadratic growth in sigma, non-increasing in lambda.
  double slope_min = 1e300, slope_max = -1e300, slope_sum = 0.0;
  for (std::size_t li = 0; li < g.lambdas.size(); ++li) {
    const double s = loglog_slope(g.sigmas, g.distance[li]);
    slope_min = std::min(slope_min, s);
    slope_max = std::max(slope_max, s);
    slope_sum += s;
  }
  double lambda_increase = 0.0;
  for (std::size_t si = 0; si < g.sigmas.size(); ++si)
    for (std::size_t li = 0; li + 1 < g.lambdas.size(); ++li)
      lambda_increase =
          std::max(lambda_increase, g.distance[li + 1][si] / g.distance[li][si]);

  rep.observed["max_ratio"] = max_ratio;
  rep.observed["slope_mean"] = slope_sum / static_cast<double>(g.lambdas.size());
  rep.observed["slope_min"] = slope_min;
  rep.observed["slope_max"] = slope_max;
  rep.observed["lambda_increase_max"] = lambda_increase;
  rep.bounds["max_ratio"] = 1.0;
  rep.bounds["slope_mean_low"] = 1.7;
  rep.bounds["slope_mean_high"] = 2.3;
  rep.bounds["lambda_increase_max"] = 1.1;
  rep.passed = all_hold;
  rep.runtime_ms = elapsed_ms(start);
  return rep;
}

CheckReport check_thm54(std::uint64_t seed) {
  const auto start = Clock::now();
  CheckReport rep;
  rep.name = "thm54_rank_constrained_bound";
  rep.config_digest =
      fnv1a_digest("thm54|seed=" + std::to_string(seed) + "|d=16|c=6|k=3|n=500|noise=0.1");

  const Thm54Problem p = thm54_problem(seed);
  bool all_hold = true;
  double max_ratio = 0.0;
  for (double lambda : p.lambdas) {
    const RidgeProblem pr(p.x, p.y, lambda);
    const Matrix theta_full = ridge_minimizer(pr);
    const Matrix theta_rank = rank_constrained_minimizer(pr, 3);
    const double dist = frobenius_norm(subtract(theta_full, theta_rank));
    const double bound = thm54_bound(16, 6, lambda, p.label_tcv_value);
    max_ratio = std::max(max_ratio, dist / bound);
    all_hold = all_hold && dist <= bound;
  }
  rep.observed["max_ratio"] = max_ratio;
  rep.observed["label_tcv"] = p.label_tcv_value;
  rep.bounds["max_ratio"] = 1.0;
  rep.passed = all_hold;
  rep.runtime_ms = elapsed_ms(start);
  return rep;
}

CheckReport check_prop41(std::uint64_t seed, std::size_t trials) {
  const auto start = Clock::now();
  require(trials >= 50, ErrorCode::Precondition, "check_prop41 needs at least 50 trials");
  CheckReport rep;
  rep.name = "prop41_gaussian_tcv_bound";
  rep.config_digest = fnv1a_digest("prop41|seed=" + std::to_string(seed) +
                                   "|trials=" + std::to_string(trials) +
                                   "|d=16|k=4|n=800|sigma=0.7");

  const auto base = balanced_isotropic_spec(4, 16, 800, 0.7, seed);
  const double bound = gaussian_tcv_bound(base);
  std::size_t hits = 0;
  double wcss_sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    auto spec = base;
    spec.seed = mix_keys({seed, 0x41ULL, t});
    const Dataset ds = sample_gaussian_mixture(spec);
    const double w = class_partition_wcss(ds.x, ds.y, *ds.class_labels);
    wcss_sum += w;
    if (w <= bound) ++hits;
  }
  const double fraction = static_cast<double>(hits) / static_cast<double>(trials);
  rep.observed["pass_fraction"] = fraction;
  rep.observed["mean_wcss"] = wcss_sum / static_cast<double>(trials);
  rep.observed["bound"] = bound;
  rep.bounds["pass_fraction"] = 0.95;
  rep.passed = fraction >= 0.95;
  rep.runtime_ms = elapsed_ms(start);
  return rep;
}

RankCollapseOptions RankCollapseOptions::reduced_default(std::uint64_t seed) {
  RankCollapseOptions opt;
  opt.cell = default_collapse_cell();
  opt.seeds = {seed, seed + 1};
  return opt;
}

CheckReport check_rank_collapse_trend(std::uint64_t seed, const RankCollapseOptions& options) {
  const auto start = Clock::now();
  CheckReport rep;
  rep.name = "rank_collapse_trend";
  rep.config_digest = fnv1a_digest(
      "rank_collapse|seed=" + std::to_string(seed) + "|d=" + std::to_string(options.cell.dim) +
      "|n=" + std::to_string(options.cell.n) + "|grid=" + std::to_string(options.lambda_grid.size()) +
      "x" + std::to_string(options.sigma_grid.size()) + "|seeds=" +
      std::to_string(options.seeds.size()));

  const std::size_t nl = options.lambda_grid.size();
  const std::size_t ns = options.sigma_grid.size();
  struct Cell {
    std::size_t li, si;
    std::uint64_t seed;
    double mean_tail = 0.0;
    bool converged = false;
  };
  std::vector<Cell> cells;
  for (std::size_t li = 0; li < nl; ++li)
    for (std::size_t si = 0; si < ns; ++si)
      for (std::uint64_t sd : options.seeds) cells.push_back({li, si, sd, 0.0, false});

  parallel_for(cells.size(), options.workers, [&](std::size_t i) {
    Cell& c = cells[i];
    AutoencoderCellParams p = options.cell;
    p.lambda = options.lambda_grid[c.li];
    p.sigma = options.sigma_grid[c.si];
    p.seed = c.seed;
    p.train.seed = c.seed;
    const AutoencoderCellResult r = run_autoencoder_cell(p);
    double acc = 0.0;
    for (double t : r.tail_sq_at_k) acc += t;
    c.mean_tail = acc / static_cast<double>(r.tail_sq_at_k.size());
    c.converged = r.converged;
  });

  std::vector<std::vector<double>> mean_tail(nl, std::vector<double>(ns, 0.0));
  std::size_t unconverged = 0;
  for (const Cell& c : cells) {
    mean_tail[c.li][c.si] += c.mean_tail / static_cast<double>(options.seeds.size());
    if (!c.converged) ++unconverged;
  }

  const double low_corner = mean_tail[nl - 1][0];    // lambda max, sigma min
  const double high_corner = mean_tail[0][ns - 1];   // lambda min, sigma max
  double lambda_increase = 0.0;
  for (std::size_t si = 0; si < ns; ++si)
    for (std::size_t li = 0; li + 1 < nl; ++li)
      lambda_increase = std::max(lambda_increase,
                                 mean_tail[li + 1][si] / std::max(mean_tail[li][si], 1e-300));

  rep.observed["low_corner_tail"] = low_corner;
  rep.observed["high_corner_tail"] = high_corner;
  rep.observed["separation"] = high_corner / std::max(low_corner, 1e-300);
  rep.observed["lambda_increase_max"] = lambda_increase;
  rep.observed["unconverged_cells"] = static_cast<double>(unconverged);
  rep.bounds["low_corner_tail"] = options.low_tail_threshold;
  rep.bounds["separation"] = options.separation_factor;
  rep.bounds["lambda_increase_max"] = options.monotone_slack;
  rep.bounds["unconverged_cells"] = 0.0;
  rep.passed = unconverged == 0 && low_corner < options.low_tail_threshold &&
               high_corner > options.separation_factor * low_corner &&
               lambda_increase <= options.monotone_slack;
  rep.runtime_ms = elapsed_ms(start);
  return rep;
}

CheckReport check_rank_collapse_trend(std::uint64_t seed) {
  return check_rank_collapse_trend(seed, RankCollapseOptions::reduced_default(seed));
}

std::vector<CheckReport> negative_controls(std::uint64_t seed, std::size_t trials) {
  std::vector<CheckReport> out;

  {
    // Halving the Prop 4.1 bound puts it below the concentration point of
    // the WCSS, so coverage must collapse.
    const auto start = Clock::now();
    CheckReport rep;
    rep.name = "prop41_negative_control";
    rep.config_digest = fnv1a_digest("prop41_control|seed=" + std::to_string(seed) +
                                     "|trials=" + std::to_string(trials));
    const auto base = balanced_isotropic_spec(4, 16, 800, 0.7, seed);
    const double bound = 0.5 * gaussian_tcv_bound(base);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      auto spec = base;
      spec.seed = mix_keys({seed, 0x41ULL, t});
      const Dataset ds = sample_gaussian_mixture(spec);
      if (class_partition_wcss(ds.x, ds.y, *ds.class_labels) <= bound) ++hits;
    }
    const double fraction = static_cast<double>(hits) / static_cast<double>(trials);
    rep.observed["halved_bound_fraction"] = fraction;
    rep.bounds["halved_bound_fraction"] = 0.95;
    rep.passed = fraction < 0.95;  // the corrupted check must fail
    rep.runtime_ms = elapsed_ms(start);
    out.push_back(std::move(rep));
  }

  {
    // Corrupt the Thm 5.3 comparison by shrinking the bound below the
    // observed distance; the checker must detect the violation.
    const auto start = Clock::now();
    CheckReport rep;
    rep.name = "thm53_negative_control";
    rep.config_digest = fnv1a_digest("thm53_control|seed=" + std::to_string(seed));
    const Thm53Cells g = thm53_grid(seed);
    const std::size_t li = g.lambdas.size() / 2;
    const std::size_t si = g.sigmas.size() / 2;
    const double dist = g.distance[li][si];
    const double corrupted = 0.5 * dist;
    rep.observed["distance"] = dist;
    rep.observed["corrupted_bound"] = corrupted;
    rep.bounds["distance"] = corrupted;
    rep.passed = !(dist <= corrupted) && dist > 0.0;
    rep.runtime_ms = elapsed_ms(start);
    out.push_back(std::move(rep));
  }

  {
    const auto start = Clock::now();
    CheckReport rep;
    rep.name = "thm54_negative_control";
    rep.config_digest = fnv1a_digest("thm54_control|seed=" + std::to_string(seed));
    const Thm54Problem p = thm54_problem(seed);
    const double lambda = p.lambdas[p.lambdas.size() / 2];
    const RidgeProblem pr(p.x, p.y, lambda);
    const double dist =
        frobenius_norm(subtract(ridge_minimizer(pr), rank_constrained_minimizer(pr, 3)));
    const double corrupted = 0.5 * dist;
    rep.observed["distance"] = dist;
    rep.observed["corrupted_bound"] = corrupted;
    rep.bounds["distance"] = corrupted;
    rep.passed = !(dist <= corrupted) && dist > 0.0;
    rep.runtime_ms = elapsed_ms(start);
    out.push_back(std::move(rep));
  }

  return out;
}

std::vector<CheckReport> run_all_checks(std::uint64_t seed, std::size_t trials,
                                        bool with_negative_controls, std::size_t workers) {
  std::vector<CheckReport> reports;
  reports.push_back(check_prop31(seed));
  reports.push_back(check_stationarity(seed));
  reports.push_back(check_lemma33(seed));
  reports.push_back(check_thm53(seed));
  reports.push_back(check_thm54(seed));
  reports.push_back(check_prop41(seed, trials));
  RankCollapseOptions opt = RankCollapseOptions::reduced_default(seed);
  opt.workers = workers;
  reports.push_back(check_rank_collapse_trend(seed, opt));
  if (with_negative_controls) {
    auto controls = negative_controls(seed, trials);
    for (auto& c : controls) reports.push_back(std::move(c));
  }
  return reports;
}

nlohmann::ordered_json reports_to_json(const std::vector<CheckReport>& reports) {
  nlohmann::ordered_json out;
  out["reports"] = nlohmann::ordered_json::array();
  bool all = true;
  for (const CheckReport& r : reports) {
    out["reports"].push_back(r.to_json());
    all = all && r.passed;
  }
  out["all_passed"] = all;
  return out;
}

}  // namespace nrc
