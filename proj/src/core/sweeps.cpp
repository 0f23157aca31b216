#include "core/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "core/clustering.hpp"
#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/linear_theory.hpp"
#include "core/rng.hpp"

namespace nrc {

namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kTagTheta = 0x7E7A0ULL;

std::string format_int(long long v) { return std::to_string(v); }

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  fail(ErrorCode::InvalidArgument, "unknown activation '" + name + "'");
}

TrainConfig parse_train(const json& cfg, double lambda, std::uint64_t seed) {
  const json& t = cfg.at("train");
  TrainConfig train;
  train.weight_decay = lambda;
  train.learning_rate = t.at("learning_rate").get<double>();
  train.max_epochs = t.at("max_epochs").get<std::size_t>();
  train.batch_size = t.at("batch_size").get<std::size_t>();
  train.grad_tol = t.at("grad_tol").get<double>();
  train.record_every = t.at("record_every").get<std::size_t>();
  train.epsilons = t.at("epsilons").get<std::vector<double>>();
  if (std::find(train.epsilons.begin(), train.epsilons.end(), 0.1) == train.epsilons.end())
    train.epsilons.push_back(0.1);
  train.seed = seed;
  return train;
}

struct MixtureConfig {
  std::size_t clusters, dim, n;
  double mean_radius;
};

MixtureConfig parse_mixture(const json& cfg, double max_sigma) {
  const json& m = cfg.at("mixture");
  MixtureConfig mix{};
  mix.clusters = m.at("clusters").get<std::size_t>();
  mix.dim = m.at("dim").get<std::size_t>();
  mix.n = m.at("n").get<std::size_t>();
  mix.mean_radius = m.at("mean_radius").get<double>();
  if (mix.mean_radius < 0.0) mix.mean_radius = 5.0 * max_sigma;
  return mix;
}

std::vector<double> sorted_grid(const json& cfg, const char* key) {
  auto grid = cfg.at(key).get<std::vector<double>>();
  require(!grid.empty(), ErrorCode::InvalidArgument, std::string(key) + " must be non-empty");
  std::sort(grid.begin(), grid.end());
  return grid;
}

std::vector<std::uint64_t> sorted_seeds(const json& cfg) {
  auto seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
  require(!seeds.empty(), ErrorCode::InvalidArgument, "seeds must be non-empty");
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

std::vector<std::size_t> network_dims(std::size_t input, const std::vector<std::size_t>& hidden,
                                      std::size_t output) {
  std::vector<std::size_t> dims;
  dims.push_back(input);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output);
  return dims;
}

std::vector<Activation> network_activations(std::size_t layers, Activation hidden,
                                            Activation output) {
  std::vector<Activation> acts(layers, hidden);
  acts.back() = output;
  return acts;
}

std::string write_csv(const json& cfg, const std::string& filename, const std::string& header,
                      const std::vector<std::string>& rows) {
  const std::string dir = cfg.at("output_dir").get<std::string>();
  require(std::filesystem::is_directory(dir), ErrorCode::IoError,
          "output directory '" + dir + "' does not exist");
  const std::string path = (std::filesystem::path(dir) / filename).string();
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::IoError, "cannot write '" + path + "'");
  out << header << '\n';
  for (const auto& row : rows) out << row << '\n';
  require(static_cast<bool>(out), ErrorCode::IoError, "failed writing '" + path + "'");
  return path;
}

Dataset classification_mixture(const MixtureConfig& mix, double sigma, std::uint64_t seed) {
  const auto spec = balanced_isotropic_spec(mix.clusters, mix.dim, mix.n, sigma, seed,
                                            mix.mean_radius);
  return sample_gaussian_mixture(spec);  // labels default to one-hot indicators
}

double layer_tail_sq(const SpectralReport& rep, std::size_t rank_k) {
  return rep.tail_sq_at(std::min(rank_k, rep.singular_values.size()));
}

// ---------------------------------------------------------------------------
// fig1: rank-collapse sweep over (lambda, sigma, seed)
// ---------------------------------------------------------------------------

std::string run_fig1(const json& cfg, std::size_t workers) {
  const auto lambdas = sorted_grid(cfg, "lambda_grid");
  const auto sigmas = sorted_grid(cfg, "sigma_grid");
  const auto seeds = sorted_seeds(cfg);
  const MixtureConfig mix = parse_mixture(cfg, sigmas.back());
  const json& arch = cfg.at("architecture");
  const std::size_t rank_k = cfg.at("rank_k").get<std::size_t>();

  struct Cell {
    double lambda, sigma;
    std::uint64_t seed;
    AutoencoderCellResult result;
  };
  std::vector<Cell> cells;
  for (double l : lambdas)
    for (double s : sigmas)
      for (std::uint64_t sd : seeds) cells.push_back({l, s, sd, {}});

  parallel_for(cells.size(), workers, [&](std::size_t i) {
    AutoencoderCellParams p;
    p.clusters = mix.clusters;
    p.dim = mix.dim;
    p.n = mix.n;
    p.mean_radius = mix.mean_radius;
    p.hidden = arch.at("hidden_widths").get<std::vector<std::size_t>>();
    p.hidden_activation = parse_activation(arch.at("activation").get<std::string>());
    p.output_activation = parse_activation(arch.at("output_activation").get<std::string>());
    p.train = parse_train(cfg, cells[i].lambda, cells[i].seed);
    p.lambda = cells[i].lambda;
    p.sigma = cells[i].sigma;
    p.seed = cells[i].seed;
    p.rank_k = rank_k;
    cells[i].result = run_autoencoder_cell(p);
  });

  std::vector<std::string> rows;
  for (const Cell& c : cells) {
    for (std::size_t l = 0; l < c.result.tail_sq_at_k.size(); ++l) {
      rows.push_back(format_g17(c.lambda) + "," + format_g17(c.sigma) + "," +
                     format_int(static_cast<long long>(c.seed)) + "," +
                     format_int(static_cast<long long>(l + 1)) + "," +
                     format_g17(c.result.tail_sq_at_k[l]) + "," +
                     format_int(static_cast<long long>(c.result.softrank_01[l])) + "," +
                     format_g17(c.result.grad_norm) + "," + (c.result.converged ? "1" : "0"));
    }
  }
  return write_csv(cfg, "fig1_sweep.csv",
                   "lambda,sigma,seed,layer,tail_sq_at_K,softrank_0.1,grad_norm,converged", rows);
}

// ---------------------------------------------------------------------------
// fig2: full vs centroid minimizer distances, trained and closed form
// ---------------------------------------------------------------------------

Matrix weight_product(const MlpParams& theta) {
  Matrix p = theta.weights.front();
  for (std::size_t l = 1; l < theta.depth(); ++l) p = multiply(theta.weights[l], p);
  return p;
}

std::string run_fig2(const json& cfg, std::size_t workers) {
  const auto lambdas = sorted_grid(cfg, "lambda_grid");
  const auto sigmas = sorted_grid(cfg, "sigma_grid");
  const auto seeds = sorted_seeds(cfg);
  const MixtureConfig mix = parse_mixture(cfg, sigmas.back());
  const json& arch = cfg.at("architecture");
  require(parse_activation(arch.at("activation").get<std::string>()) == Activation::Identity &&
              parse_activation(arch.at("output_activation").get<std::string>()) ==
                  Activation::Identity,
          ErrorCode::Precondition, "fig2_linear requires an identity-activation architecture");

  struct Cell {
    double lambda, sigma;
    std::uint64_t seed;
    double dist_trained, dist_closed, bound;
  };
  std::vector<Cell> cells;
  for (double l : lambdas)
    for (double s : sigmas)
      for (std::uint64_t sd : seeds) cells.push_back({l, s, sd, 0, 0, 0});

  parallel_for(cells.size(), workers, [&](std::size_t i) {
    Cell& c = cells[i];
    const auto spec = balanced_isotropic_spec(mix.clusters, mix.dim, mix.n, c.sigma, c.seed,
                                              mix.mean_radius);
    const Dataset ds = autoencoder_labels(sample_gaussian_mixture(spec));
    const Partition part = build_partition(ds.x, ds.y, *ds.class_labels);
    const CentroidProblem cp = centroid_problem(ds.x, ds.y, part);

    const RidgeProblem pr(ds.x, ds.y, c.lambda);
    const Matrix theta_full = ridge_minimizer(pr);
    const Matrix theta_cent = centroid_minimizer(cp, c.lambda, ds.n());
    c.dist_closed = frobenius_norm(subtract(theta_full, theta_cent));

    const double tcv = wcss(ds.x, ds.y, part);
    c.bound = thm53_bound(tcv, c.lambda, mix.dim, ds.n(), frobenius_norm(cp.x_bar),
                          frobenius_norm(cp.y_bar));

    const auto hidden = arch.at("hidden_widths").get<std::vector<std::size_t>>();
    const auto dims = network_dims(mix.dim, hidden, mix.dim);
    const auto acts = network_activations(dims.size() - 1, Activation::Identity,
                                          Activation::Identity);
    TrainConfig train_cfg = parse_train(cfg, c.lambda, c.seed);
    train_cfg.train_biases = false;  // the linear theory model carries no bias
    const MlpParams theta0 = init_params(dims, acts, mix_keys({c.seed, kTagTheta}));
    try {
      const Dataset centroid_ds{cp.x_bar, cp.y_bar, std::nullopt, std::nullopt};
      const auto full = train(theta0, ds, train_cfg);
      const auto cent = train(theta0, centroid_ds, train_cfg);
      c.dist_trained =
          frobenius_norm(subtract(weight_product(full.first), weight_product(cent.first)));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Divergence) throw;
      c.dist_trained = std::numeric_limits<double>::quiet_NaN();  // flagged row
    }
  });

  std::vector<std::string> rows;
  for (const Cell& c : cells) {
    rows.push_back(format_g17(c.lambda) + "," + format_g17(c.sigma) + "," +
                   format_int(static_cast<long long>(c.seed)) + "," + format_g17(c.dist_trained) +
                   "," + format_g17(c.dist_closed) + "," + format_g17(c.bound));
  }
  return write_csv(cfg, "fig2_linear.csv",
                   "lambda,sigma,seed,distance_trained,distance_closed_form,thm53_bound", rows);
}

// ---------------------------------------------------------------------------
// fig3: spectral tail and per-layer class WCSS traces over training
// ---------------------------------------------------------------------------

std::string run_fig3(const json& cfg, std::size_t workers) {
  const auto lambdas = sorted_grid(cfg, "lambda_grid");
  const auto sigmas = sorted_grid(cfg, "sigma_grid");
  const auto seeds = sorted_seeds(cfg);
  const double sigma = sigmas.front();
  const std::uint64_t seed = seeds.front();
  const MixtureConfig mix = parse_mixture(cfg, sigmas.back());
  const json& arch = cfg.at("architecture");

  struct Trace {
    double lambda;
    std::vector<TrainRecord> records;
  };
  std::vector<Trace> traces;
  for (double l : lambdas) traces.push_back({l, {}});

  parallel_for(traces.size(), workers, [&](std::size_t i) {
    const Dataset ds = classification_mixture(mix, sigma, seed);
    const auto hidden = arch.at("hidden_widths").get<std::vector<std::size_t>>();
    const auto dims = network_dims(mix.dim, hidden, mix.clusters);
    const auto acts = network_activations(
        dims.size() - 1, parse_activation(arch.at("activation").get<std::string>()),
        parse_activation(arch.at("output_activation").get<std::string>()));
    const TrainConfig train_cfg = parse_train(cfg, traces[i].lambda, seed);
    const MlpParams theta0 = init_params(dims, acts, mix_keys({seed, kTagTheta}));
    traces[i].records = train(theta0, ds, train_cfg).second;
  });

  struct Row {
    std::size_t epoch, layer;
    double lambda;
    std::string text;
  };
  std::vector<Row> rows;
  for (const Trace& t : traces) {
    for (const TrainRecord& rec : t.records) {
      for (std::size_t l = 0; l < rec.per_layer_spectra.size(); ++l) {
        std::string tail;
        const auto& e = rec.per_layer_spectra[l].e_tail;
        for (std::size_t r = 0; r < e.size(); ++r) {
          if (r > 0) tail += ';';
          tail += format_g17(e[r]);
        }
        const double class_wcss = rec.per_layer_tcv ? (*rec.per_layer_tcv)[l] : 0.0;
        rows.push_back({rec.epoch, l + 1, t.lambda,
                        format_int(static_cast<long long>(rec.epoch)) + "," +
                            format_int(static_cast<long long>(l + 1)) + "," +
                            format_g17(t.lambda) + "," + tail + "," + format_g17(class_wcss)});
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.epoch != b.epoch) return a.epoch < b.epoch;
    if (a.layer != b.layer) return a.layer < b.layer;
    return a.lambda < b.lambda;
  });
  std::vector<std::string> texts;
  texts.reserve(rows.size());
  for (auto& r : rows) texts.push_back(std::move(r.text));
  return write_csv(cfg, "fig3_trace.csv", "epoch,layer,lambda,e_tail,class_wcss", texts);
}

// ---------------------------------------------------------------------------
// width / depth sweeps: mean softrank of the square hidden matrices
// ---------------------------------------------------------------------------

std::string run_width_depth(const json& cfg, std::size_t workers, bool width_mode) {
  const auto values = cfg.at(width_mode ? "width_grid" : "depth_grid").get<std::vector<std::size_t>>();
  require(!values.empty(), ErrorCode::InvalidArgument, "sweep grid must be non-empty");
  auto sorted_values = values;
  std::sort(sorted_values.begin(), sorted_values.end());
  const auto lambdas = sorted_grid(cfg, "lambda_grid");
  const auto seeds = sorted_seeds(cfg);
  const double sigma = cfg.at("sigma").get<double>();
  const MixtureConfig mix = parse_mixture(cfg, sigma);
  const json& arch = cfg.at("architecture");

  struct Cell {
    std::size_t value;
    double lambda;
    std::uint64_t seed;
    double mean_softrank;
  };
  std::vector<Cell> cells;
  for (std::size_t v : sorted_values)
    for (double l : lambdas)
      for (std::uint64_t sd : seeds) cells.push_back({v, l, sd, 0.0});

  parallel_for(cells.size(), workers, [&](std::size_t i) {
    Cell& c = cells[i];
    std::vector<std::size_t> hidden;
    if (width_mode) {
      hidden.assign(cfg.at("hidden_layers").get<std::size_t>(), c.value);
    } else {
      hidden.assign(c.value, cfg.at("width").get<std::size_t>());
    }
    require(hidden.size() >= 2, ErrorCode::InvalidArgument,
            "sweep needs at least two hidden layers for square matrices");
    const Dataset ds = classification_mixture(mix, sigma, c.seed);
    const auto dims = network_dims(mix.dim, hidden, mix.clusters);
    const auto acts = network_activations(
        dims.size() - 1, parse_activation(arch.at("activation").get<std::string>()),
        parse_activation(arch.at("output_activation").get<std::string>()));
    const TrainConfig train_cfg = parse_train(cfg, c.lambda, c.seed);
    const MlpParams theta0 = init_params(dims, acts, mix_keys({c.seed, kTagTheta}));
    const auto trained = train(theta0, ds, train_cfg);
    const TrainRecord& last = trained.second.back();
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t l = 1; l + 1 < trained.first.depth(); ++l) {
      acc += static_cast<double>(last.per_layer_spectra[l].rank_at(0.1));
      ++count;
    }
    c.mean_softrank = acc / static_cast<double>(count);
  });

  std::vector<std::string> rows;
  for (const Cell& c : cells) {
    rows.push_back(format_int(static_cast<long long>(c.value)) + "," + format_g17(c.lambda) + "," +
                   format_int(static_cast<long long>(c.seed)) + "," +
                   format_g17(c.mean_softrank));
  }
  return write_csv(cfg, width_mode ? "width_sweep.csv" : "depth_sweep.csv",
                   "width_or_depth,lambda,seed,mean_softrank_0.1", rows);
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = std::exp(std::log(lo) + step * i);
  g.front() = lo;
  g.back() = hi;
  return g;
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t n_threads = std::min(std::max<std::size_t>(workers, 1), count);
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

AutoencoderCellResult run_autoencoder_cell(const AutoencoderCellParams& cell) {
  const auto spec = balanced_isotropic_spec(cell.clusters, cell.dim, cell.n, cell.sigma,
                                            cell.seed, cell.mean_radius);
  const Dataset ds = autoencoder_labels(sample_gaussian_mixture(spec));
  const auto dims = network_dims(cell.dim, cell.hidden, cell.dim);
  const auto acts =
      network_activations(dims.size() - 1, cell.hidden_activation, cell.output_activation);
  TrainConfig train_cfg = cell.train;
  train_cfg.weight_decay = cell.lambda;
  if (std::find(train_cfg.epsilons.begin(), train_cfg.epsilons.end(), 0.1) ==
      train_cfg.epsilons.end())
    train_cfg.epsilons.push_back(0.1);
  const MlpParams theta0 = init_params(dims, acts, mix_keys({cell.seed, kTagTheta}));
  const auto trained = train(theta0, ds, train_cfg);
  const TrainRecord& last = trained.second.back();

  AutoencoderCellResult out;
  out.grad_norm = last.grad_norm;
  out.converged = last.converged;
  for (const SpectralReport& rep : last.per_layer_spectra) {
    out.tail_sq_at_k.push_back(layer_tail_sq(rep, cell.rank_k));
    out.softrank_01.push_back(rep.rank_at(0.1));
  }
  return out;
}

nlohmann::ordered_json default_config(const std::string& experiment) {
  json cfg;
  cfg["experiment"] = experiment;
  cfg["output_dir"] = ".";
  json arch = {{"hidden_widths", {16, 12, 16}},
               {"activation", "tanh"},
               {"output_activation", "identity"}};
  json mixture = {{"clusters", 4}, {"dim", 32}, {"n", 1000}, {"mean_radius", -1.0}};
  json train = {{"learning_rate", 0.05}, {"max_epochs", 30000}, {"batch_size", 0},
                {"grad_tol", 1e-3},      {"record_every", 2000}, {"epsilons", {0.1}}};

  if (experiment == "fig1_sweep") {
    cfg["lambda_grid"] = log_grid(1e-4, 1e-1, 3);
    cfg["sigma_grid"] = log_grid(0.05, 0.5, 3);
    cfg["seeds"] = {0, 1};
    cfg["rank_k"] = 4;
    cfg["architecture"] = arch;
    cfg["mixture"] = mixture;
    cfg["train"] = train;
  } else if (experiment == "fig2_linear") {
    cfg["lambda_grid"] = log_grid(1e-3, 1e-1, 4);
    cfg["sigma_grid"] = log_grid(0.05, 0.5, 4);
    cfg["seeds"] = {0};
    arch["hidden_widths"] = json::array();
    arch["activation"] = "identity";
    arch["output_activation"] = "identity";
    cfg["architecture"] = arch;
    mixture["dim"] = 16;
    mixture["n"] = 500;
    cfg["mixture"] = mixture;
    train["learning_rate"] = 0.02;
    train["max_epochs"] = 200000;
    train["grad_tol"] = 1e-8;
    train["record_every"] = 10000;
    cfg["train"] = train;
  } else if (experiment == "fig3_trace") {
    cfg["lambda_grid"] = {1e-4, 1e-2, 1e-1};
    cfg["sigma_grid"] = {0.2};
    cfg["seeds"] = {0};
    cfg["architecture"] = arch;
    cfg["mixture"] = mixture;
    train["record_every"] = 100;
    train["max_epochs"] = 20000;
    cfg["train"] = train;
  } else if (experiment == "width_sweep" || experiment == "depth_sweep") {
    if (experiment == "width_sweep") {
      cfg["width_grid"] = {16, 32, 64};
      cfg["hidden_layers"] = 3;
    } else {
      cfg["depth_grid"] = {2, 3, 4};
      cfg["width"] = 16;
    }
    cfg["lambda_grid"] = {0.02, 0.05, 0.1};
    cfg["sigma"] = 0.2;
    cfg["seeds"] = {0};
    cfg["architecture"] = arch;
    cfg["mixture"] = mixture;
    train["max_epochs"] = 20000;
    cfg["train"] = train;
  } else if (experiment == "verify_all") {
    cfg["seed"] = 0;
    cfg["trials"] = 200;
    cfg["negative_controls"] = true;
  } else {
    fail(ErrorCode::InvalidArgument, "unknown experiment '" + experiment + "'");
  }
  return cfg;
}

void apply_full_scale(nlohmann::ordered_json& cfg) {
  if (cfg.contains("mixture")) {
    cfg["mixture"]["dim"] = 784;
    cfg["mixture"]["clusters"] = 10;
    cfg["mixture"]["n"] = 10000;
  }
  if (cfg.contains("architecture")) cfg["architecture"]["hidden_widths"] = {400, 300, 400};
  if (cfg.contains("rank_k")) cfg["rank_k"] = 10;
}

std::string run_experiment(const nlohmann::ordered_json& cfg, std::size_t workers) {
  const std::string experiment = cfg.at("experiment").get<std::string>();
  if (experiment == "fig1_sweep") return run_fig1(cfg, workers);
  if (experiment == "fig2_linear") return run_fig2(cfg, workers);
  if (experiment == "fig3_trace") return run_fig3(cfg, workers);
  if (experiment == "width_sweep") return run_width_depth(cfg, workers, true);
  if (experiment == "depth_sweep") return run_width_depth(cfg, workers, false);
  fail(ErrorCode::InvalidArgument,
       "unknown experiment '" + experiment + "' (verify runs through the verify entry point)");
}

}  // namespace nrc
