#include "fhnrom/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "fhnrom/error.hpp"

namespace fhnrom {

void ExperimentConfig::validate() const {
  if (!(half_width > 0.0)) throw Error("config: half_width must be positive");
  if (refinements < 0 || refinements > 9) throw Error("config: refinements must be in [0, 9]");
  if (degree < 0 || degree > 2) throw Error("config: degree must be 0, 1 or 2");
  if (!(physics.diffusion_u > 0.0) || !(physics.diffusion_v > 0.0)) throw Error("config: diffusion must be positive");
  if (!(physics.alpha > 0.0) || !(physics.beta > 0.0)) throw Error("config: alpha and beta must be positive");
  if (!(dt > 0.0) || !(t_final > 0.0)) throw Error("config: dt and t_final must be positive");
  if (train_mu.empty()) throw Error("config: train_mu must not be empty");
  if (test_mu.empty()) throw Error("config: test_mu must not be empty");
  if (!(energy > 0.0) || energy > 1.0) throw Error("config: energy must be in (0, 1]");
  if (modes && *modes < 1) throw Error("config: modes must be >= 1");
  if (deim_modes && *deim_modes < 1) throw Error("config: deim_modes must be >= 1");
  if (snapshot_stride < 1) throw Error("config: snapshot_stride must be >= 1");
  if (!(penalty > 0.0)) throw Error("config: penalty must be positive");
  if (!(newton.tolerance > 0.0) || newton.max_iterations < 1) throw Error("config: invalid Newton settings");
  if (jobs < 1) throw Error("config: jobs must be >= 1");
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["half_width"] = c.half_width;
  j["refinements"] = c.refinements;
  j["degree"] = c.degree;
  j["diffusion_u"] = c.physics.diffusion_u;
  j["diffusion_v"] = c.physics.diffusion_v;
  j["alpha"] = c.physics.alpha;
  j["beta"] = c.physics.beta;
  j["dt"] = c.dt;
  j["t_final"] = c.t_final;
  j["train_mu"] = c.train_mu;
  j["test_mu"] = c.test_mu;
  j["seed"] = c.seed;
  j["energy"] = c.energy;
  j["modes"] = c.modes ? nlohmann::json(*c.modes) : nlohmann::json(nullptr);
  j["deim_modes"] = c.deim_modes ? nlohmann::json(*c.deim_modes) : nlohmann::json(nullptr);
  j["snapshot_stride"] = c.snapshot_stride;
  j["penalty"] = c.penalty;
  j["newton_tolerance"] = c.newton.tolerance;
  j["newton_max_iterations"] = c.newton.max_iterations;
  j["jobs"] = c.jobs;
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("config: expected a JSON object");
  static const std::set<std::string> known = {
      "half_width", "refinements", "degree", "diffusion_u", "diffusion_v", "alpha", "beta", "dt", "t_final",
      "train_mu", "test_mu", "seed", "energy", "modes", "deim_modes", "snapshot_stride", "penalty",
      "newton_tolerance", "newton_max_iterations", "jobs", "output_dir"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error("config: unknown key '" + key + "'");
  }
  ExperimentConfig c;
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  auto read_optional = [&](const char* key, std::optional<int>& field) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
      field.reset();
    } else {
      field = j.at(key).get<int>();
    }
  };
  try {
    read("half_width", c.half_width);
    read("refinements", c.refinements);
    read("degree", c.degree);
    read("diffusion_u", c.physics.diffusion_u);
    read("diffusion_v", c.physics.diffusion_v);
    read("alpha", c.physics.alpha);
    read("beta", c.physics.beta);
    read("dt", c.dt);
    read("t_final", c.t_final);
    read("train_mu", c.train_mu);
    read("test_mu", c.test_mu);
    read("seed", c.seed);
    read("energy", c.energy);
    read_optional("modes", c.modes);
    read_optional("deim_modes", c.deim_modes);
    read("snapshot_stride", c.snapshot_stride);
    read("penalty", c.penalty);
    read("newton_tolerance", c.newton.tolerance);
    read("newton_max_iterations", c.newton.max_iterations);
    read("jobs", c.jobs);
    read("output_dir", c.output_dir);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

void save_config(const std::string& path, const ExperimentConfig& config) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << to_json(config).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

std::string config_hash(const ExperimentConfig& config) {
  nlohmann::json j = to_json(config);
  j.erase("output_dir");
  j.erase("jobs");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string mu_label(double mu) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.4f", mu);
  return buf;
}

}  // namespace fhnrom
