#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fhnrom/config.hpp"
#include "fhnrom/deim.hpp"
#include "fhnrom/fom.hpp"
#include "fhnrom/pod.hpp"
#include "fhnrom/rom.hpp"

namespace fhnrom {

struct RunOptions {
  /// Write artifacts and the manifest under config.output_dir.
  bool persist = true;
  /// Also write the per-parameter snapshot matrices (large at full scale).
  bool write_snapshots = true;
  /// Progress messages; null for silence.
  std::ostream* log = nullptr;
};

struct OfflineTimings {
  std::vector<double> fom_seconds;  // one per training parameter
  double snapshot_seconds = 0.0;    // wall time of the whole sweep
  double pod_seconds = 0.0;
  double deim_seconds = 0.0;
  double total_seconds = 0.0;
};

/// Everything the online phase needs, plus offline diagnostics.
struct OfflineArtifacts {
  ExperimentConfig config;
  std::shared_ptr<const DGSpace> space;
  std::shared_ptr<const FomOperators> operators;  // mu = 0; use with_mu
  ReducedBasis basis;
  Vector f_singular_values;
  int f_rank = 0;
  DenseMatrix deim_basis;  // W
  std::shared_ptr<const DeimOperator> deim;
  double deim_bound = 0.0;
  std::size_t snapshot_columns = 0;
  std::vector<double> mean_newton_iterations;  // per training parameter
  OfflineTimings timings;
};

/// The shared initial condition: u from the seed, v from seed + 1.
std::pair<Vector, Vector> initial_state(const DGSpace& space, std::uint64_t seed);

/// FOM sweep over the training parameters, POD of u and v, DEIM from the
/// nonlinear snapshots. With persistence enabled the manifest is written
/// first with status "in_progress"; a failing stage marks it "invalid" and
/// the error names the stage.
OfflineArtifacts run_offline(const ExperimentConfig& config, const RunOptions& options = {});

/// Reloads bases and the DEIM operator from a directory written by
/// run_offline. Throws if the manifest is not complete or its config hash
/// differs from `config`.
OfflineArtifacts load_offline(const ExperimentConfig& config, const std::string& directory);

struct CaseResult {
  double mu = 0.0;
  bool ok = false;
  std::string error;
  double fom_seconds = 0.0;
  double pod_seconds = 0.0;
  double deim_seconds = 0.0;
  double speedup_pod = 0.0;
  double speedup_deim = 0.0;
  double pod_error = 0.0;   // relative L2 error of u at the final time
  double deim_error = 0.0;
  double fom_newton = 0.0;  // mean Newton iterations per step
  double pod_newton = 0.0;
  double deim_newton = 0.0;
  Vector fom_final;  // u coefficients at the final time
  Vector pod_final;  // lifted
  Vector deim_final;
};

struct BenchmarkReport {
  std::string config_hash;
  int modes = 0;
  int deim_modes = 0;
  double deim_bound = 0.0;
  std::vector<CaseResult> cases;
  Vector sigma_u;
  Vector sigma_v;
  Vector sigma_f;
};

/// FOM, POD-ROM and POD-DEIM-ROM at every test parameter. Only the time
/// stepping loops are timed. A failing case is recorded and the rest run.
BenchmarkReport run_online(const ExperimentConfig& config, const OfflineArtifacts& artifacts,
                           const RunOptions& options = {});

nlohmann::json to_json(const BenchmarkReport& report);

/// singular_values.csv, timings.csv, report.json and
/// pattern_{fom,pod,deim}_{mu}.vtk under `directory`.
void emit_figures(const BenchmarkReport& report, const DGSpace& space, const std::string& directory);

}  // namespace fhnrom
