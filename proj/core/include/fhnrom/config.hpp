#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fhnrom/fom.hpp"
#include "fhnrom/pod.hpp"

namespace fhnrom {

/// Experiment settings. Defaults reproduce the full-scale study: the square
/// [-10,10]^2 refined five times, P1 elements, dt = 0.5 up to T = 1000.
struct ExperimentConfig {
  double half_width = 10.0;
  int refinements = 5;
  int degree = 1;
  FhnParameters physics{};  // mu is set per run
  double dt = 0.5;
  double t_final = 1000.0;
  std::vector<double> train_mu{-0.04, -0.02, 0.0, 0.02, 0.04};
  std::vector<double> test_mu{-0.03, -0.01, 0.01, 0.03};
  std::uint64_t seed = 20160101;
  double energy = 0.9999;
  std::optional<int> modes;       // explicit POD size k
  std::optional<int> deim_modes;  // explicit DEIM size n
  int snapshot_stride = 1;
  double penalty = kDefaultPenalty;
  NewtonOptions newton{};
  int jobs = 1;
  std::string output_dir = "fhnrom_out";

  ModeSelection pod_selection() const { return {modes, energy}; }
  ModeSelection deim_selection() const { return {deim_modes, energy}; }

  /// Throws Error describing the first invalid field.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys take their default values; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& config);

/// FNV-1a 64-bit hash of the canonical JSON dump, as 16 hex digits. The
/// output directory does not participate.
std::string config_hash(const ExperimentConfig& config);

/// Filesystem-friendly label for a parameter value, e.g. "+0.0300".
std::string mu_label(double mu);

}  // namespace fhnrom
