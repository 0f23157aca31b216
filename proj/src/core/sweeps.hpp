#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/network.hpp"

namespace nrc {

// Built-in defaults for each CLI experiment; callers overlay file config and
// --set overrides on top. Scale follows the reduced desk-size task unless
// apply_full_scale bumps it to the original dimensions.
nlohmann::ordered_json default_config(const std::string& experiment);
void apply_full_scale(nlohmann::ordered_json& cfg);

// Runs the sweep experiment named in cfg["experiment"] and writes one CSV
// into cfg["output_dir"]. The directory must already exist. Returns the
// output path. Grid cells execute on `workers` threads; results are
// deterministic regardless of worker count.
std::string run_experiment(const nlohmann::ordered_json& cfg, std::size_t workers);

// Bounded deterministic worker pool: fn(i) for i in [0, count); exceptions
// propagate to the caller.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

// One autoencoder grid cell of the rank-collapse sweep; shared between the
// CSV experiment and the verification checkers.
struct AutoencoderCellParams {
  std::size_t clusters = 4;
  std::size_t dim = 32;
  std::size_t n = 1000;
  double mean_radius = 2.5;
  std::vector<std::size_t> hidden = {16, 12, 16};
  Activation hidden_activation = Activation::Tanh;
  Activation output_activation = Activation::Identity;
  TrainConfig train;
  double lambda = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::size_t rank_k = 4;
};

struct AutoencoderCellResult {
  std::vector<double> tail_sq_at_k;      // per layer
  std::vector<std::size_t> softrank_01;  // per layer, rk(0.1)
  double grad_norm = 0.0;
  bool converged = false;
};

AutoencoderCellResult run_autoencoder_cell(const AutoencoderCellParams& cell);

// Fixed 17-significant-digit float formatting used by every CSV/JSON writer,
// so reruns are byte-identical.
std::string format_g17(double v);

std::vector<double> log_grid(double lo, double hi, std::size_t points);

}  // namespace nrc
