#include "fhnrom/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include "fhnrom/error.hpp"
#include "fhnrom/io.hpp"

namespace fhnrom {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs task(i) for i in [0, count) on at most `jobs` threads. The first
// exception is rethrown after all workers stop.
template <class Task>
void parallel_for(std::size_t count, int jobs, Task task) {
  const auto workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first) first = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

class Logger {
 public:
  explicit Logger(std::ostream* out) : out_(out) {}
  template <class... Args>
  void operator()(const Args&... args) {
    if (!out_) return;
    std::lock_guard lock(mutex_);
    ((*out_) << ... << args) << std::endl;
  }

 private:
  std::ostream* out_;
  std::mutex mutex_;
};

void write_json(const fs::path& path, const nlohmann::json& j) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::shared_ptr<const FomOperators> build_operators(const ExperimentConfig& config,
                                                   std::shared_ptr<const DGSpace>& space) {
  space = std::make_shared<const DGSpace>(build_square_mesh(config.half_width, config.refinements), config.degree);
  FhnParameters physics = config.physics;
  physics.mu = 0.0;
  return std::make_shared<const FomOperators>(space, physics, config.penalty);
}

// Manifest kept in memory and flushed on every status change.
class Manifest {
 public:
  Manifest(bool enabled, fs::path dir, const ExperimentConfig& config) : enabled_(enabled), dir_(std::move(dir)) {
    j_["format"] = 1;
    j_["status"] = "in_progress";
    j_["config_hash"] = config_hash(config);
    j_["config"] = to_json(config);
    j_["artifacts"] = nlohmann::json::object();
  }
  nlohmann::json& operator[](const char* key) { return j_[key]; }
  void artifact(const std::string& name, const std::string& file) { j_["artifacts"][name] = file; }
  void flush() {
    if (enabled_) write_json(dir_ / "manifest.json", j_);
  }

 private:
  bool enabled_;
  fs::path dir_;
  nlohmann::json j_;
};

}  // namespace

std::pair<Vector, Vector> initial_state(const DGSpace& space, std::uint64_t seed) {
  return {random_initial_condition(space, seed), random_initial_condition(space, seed + 1)};
}

OfflineArtifacts run_offline(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  Logger log(options.log);
  const auto start = Clock::now();
  const fs::path dir = config.output_dir;
  if (options.persist) {
    fs::create_directories(dir);
    if (options.write_snapshots) fs::create_directories(dir / "snapshots");
    save_config((dir / "config.json").string(), config);
  }
  Manifest manifest(options.persist, dir, config);
  std::string stage = "setup";
  manifest["stage"] = stage;
  manifest.flush();

  OfflineArtifacts art;
  art.config = config;
  try {
    std::shared_ptr<const DGSpace> space;
    art.operators = build_operators(config, space);
    art.space = space;
    const auto n = static_cast<Eigen::Index>(space->num_dofs());
    const auto [u0, v0] = initial_state(*space, config.seed);

    stage = "snapshots";
    manifest["stage"] = stage;
    manifest.flush();
    const std::size_t steps = num_time_steps(config.dt, config.t_final);
    const auto per_run = static_cast<Eigen::Index>(steps / static_cast<std::size_t>(config.snapshot_stride) + 1);
    const std::size_t runs = config.train_mu.size();
    art.snapshot_columns = static_cast<std::size_t>(per_run) * runs;
    DenseMatrix all_u(n, per_run * static_cast<Eigen::Index>(runs));
    DenseMatrix all_v(n, all_u.cols());
    DenseMatrix all_f(n, all_u.cols());
    art.timings.fom_seconds.assign(runs, 0.0);
    art.mean_newton_iterations.assign(runs, 0.0);
    std::mutex writer;
    const auto sweep_start = Clock::now();
    log("offline: ", runs, " training runs, N = ", n, ", ", steps, " steps each");
    parallel_for(runs, config.jobs, [&](std::size_t i) {
      const double mu = config.train_mu[i];
      FomSolveOptions solve;
      solve.snapshot_stride = config.snapshot_stride;
      solve.newton = config.newton;
      Trajectory traj = fom_solve(art.operators->with_mu(mu), u0, v0, config.dt, config.t_final, solve);
      std::lock_guard lock(writer);
      const Eigen::Index c0 = per_run * static_cast<Eigen::Index>(i);
      all_u.middleCols(c0, per_run) = traj.u;
      all_v.middleCols(c0, per_run) = traj.v;
      all_f.middleCols(c0, per_run) = traj.f;
      art.timings.fom_seconds[i] = traj.wall_seconds;
      art.mean_newton_iterations[i] = traj.mean_newton_iterations;
      if (options.persist && options.write_snapshots) {
        const std::string label = mu_label(mu);
        for (const auto& [field, m] : {std::pair<std::string, const DenseMatrix*>{"u", &traj.u},
                                       {"v", &traj.v}, {"f", &traj.f}}) {
          const std::string file = "snapshots/" + field + "_" + label + ".bin";
          write_matrix((dir / file).string(), *m);
          manifest.artifact("snapshot_" + field + "_" + label, file);
        }
      }
      log("offline: mu = ", mu_label(mu), " done in ", traj.wall_seconds, " s, mean Newton ",
          traj.mean_newton_iterations);
    });
    art.timings.snapshot_seconds = seconds_since(sweep_start);

    stage = "pod";
    manifest["stage"] = stage;
    manifest.flush();
    const auto pod_start = Clock::now();
    const BlockCholesky factor = cholesky(art.operators->mass());
    art.basis.u = compute_pod_basis(all_u, factor, config.pod_selection());
    art.basis.v = compute_pod_basis(all_v, factor, config.pod_selection());
    // One k for both fields: the larger energy-based count, if both ranks allow it.
    const int k = std::min(std::max(art.basis.u.size(), art.basis.v.size()),
                           std::min(art.basis.u.rank, art.basis.v.rank));
    ModeSelection fixed;
    fixed.modes = k;
    if (art.basis.u.size() != k) art.basis.u = compute_pod_basis(all_u, factor, fixed);
    if (art.basis.v.size() != k) art.basis.v = compute_pod_basis(all_v, factor, fixed);
    all_u.resize(0, 0);
    all_v.resize(0, 0);
    art.timings.pod_seconds = seconds_since(pod_start);
    log("offline: POD k = ", k, " (rank u ", art.basis.u.rank, ", v ", art.basis.v.rank, ") in ",
        art.timings.pod_seconds, " s");

    stage = "deim";
    manifest["stage"] = stage;
    manifest.flush();
    const auto deim_start = Clock::now();
    SvdOptions svd;
    svd.compute_right = false;
    SvdResult f_svd = thin_svd(all_f, svd);
    all_f.resize(0, 0);
    art.f_singular_values = f_svd.singular_values;
    art.f_rank = numerical_rank(art.f_singular_values, f_svd.rank_tolerance);
    const int n_deim = select_mode_count(art.f_singular_values, art.f_rank, config.deim_selection());
    art.deim_basis = f_svd.left.leftCols(n_deim);
    f_svd.left.resize(0, 0);
    IndexList indices = deim_select(art.deim_basis);
    art.deim_bound = deim_error_bound(art.deim_basis, indices);
    art.deim = std::make_shared<const DeimOperator>(
        DeimOperator::build(art.basis.u.modes, art.deim_basis, std::move(indices), *space));
    art.timings.deim_seconds = seconds_since(deim_start);
    log("offline: DEIM n = ", n_deim, ", bound ", art.deim_bound, " in ", art.timings.deim_seconds, " s");

    stage = "write";
    manifest["stage"] = stage;
    manifest.flush();
    if (options.persist) {
      const std::vector<std::pair<std::string, const DenseMatrix*>> matrices = {
          {"psi_u", &art.basis.u.modes}, {"psi_v", &art.basis.v.modes}, {"deim_w", &art.deim_basis},
          {"deim_q", &art.deim->projector()}};
      for (const auto& [name, m] : matrices) {
        write_matrix((dir / (name + ".bin")).string(), *m);
        manifest.artifact(name, name + ".bin");
      }
      write_index_csv((dir / "deim_indices.csv").string(), art.deim->indices());
      manifest.artifact("deim_indices", "deim_indices.csv");
      const std::vector<std::pair<std::string, const Vector*>> spectra = {
          {"u", &art.basis.u.singular_values}, {"v", &art.basis.v.singular_values}, {"f", &art.f_singular_values}};
      for (const auto& [field, s] : spectra) {
        const std::string csv = "spectrum_" + field + ".csv";
        write_spectrum_csv((dir / csv).string(), *s);
        manifest.artifact("spectrum_" + field, csv);
      }
    }
    art.timings.total_seconds = seconds_since(start);

    manifest["stage"] = "done";
    manifest["status"] = "complete";
    manifest["modes"] = k;
    manifest["deim_modes"] = n_deim;
    manifest["rank"] = {{"u", art.basis.u.rank}, {"v", art.basis.v.rank}, {"f", art.f_rank}};
    manifest["deim_bound"] = art.deim_bound;
    manifest["snapshot_columns"] = art.snapshot_columns;
    manifest["mean_newton_iterations"] = art.mean_newton_iterations;
    manifest["singular_values"] = {{"u", to_std(art.basis.u.singular_values)},
                                   {"v", to_std(art.basis.v.singular_values)},
                                   {"f", to_std(art.f_singular_values)}};
    manifest["offline_seconds"] = {{"fom", art.timings.fom_seconds},
                                   {"snapshots", art.timings.snapshot_seconds},
                                   {"pod", art.timings.pod_seconds},
                                   {"deim", art.timings.deim_seconds},
                                   {"total", art.timings.total_seconds}};
    manifest.flush();
  } catch (const std::exception& e) {
    manifest["status"] = "invalid";
    manifest["error"] = e.what();
    try {
      manifest.flush();
    } catch (...) {
    }
    throw Error("offline stage '" + stage + "' failed: " + e.what());
  }
  return art;
}

OfflineArtifacts load_offline(const ExperimentConfig& config, const std::string& directory) {
  const fs::path dir = directory;
  const nlohmann::json manifest = read_json(dir / "manifest.json");
  if (manifest.value("status", "") != "complete") {
    throw Error("offline artifacts in " + directory + " are not complete (status '" +
                manifest.value("status", "missing") + "')");
  }
  if (manifest.value("config_hash", "") != config_hash(config)) {
    throw Error("offline artifacts in " + directory + " were built with a different configuration");
  }
  const auto& files = manifest.at("artifacts");
  auto path = [&](const char* name) {
    if (!files.contains(name)) throw IoError(directory + ": manifest lists no artifact '" + name + "'");
    return (dir / files.at(name).get<std::string>()).string();
  };

  OfflineArtifacts art;
  art.config = config;
  std::shared_ptr<const DGSpace> space;
  art.operators = build_operators(config, space);
  art.space = space;
  art.basis.u.modes = read_matrix(path("psi_u"));
  art.basis.v.modes = read_matrix(path("psi_v"));
  art.deim_basis = read_matrix(path("deim_w"));
  const auto& sv = manifest.at("singular_values");
  art.basis.u.singular_values = to_vector(sv.at("u").get<std::vector<double>>());
  art.basis.v.singular_values = to_vector(sv.at("v").get<std::vector<double>>());
  art.f_singular_values = to_vector(sv.at("f").get<std::vector<double>>());
  const auto& rank = manifest.at("rank");
  art.basis.u.rank = rank.at("u").get<int>();
  art.basis.v.rank = rank.at("v").get<int>();
  art.f_rank = rank.at("f").get<int>();
  art.deim_bound = manifest.at("deim_bound").get<double>();
  art.snapshot_columns = manifest.at("snapshot_columns").get<std::size_t>();
  art.mean_newton_iterations = manifest.at("mean_newton_iterations").get<std::vector<double>>();
  const auto& t = manifest.at("offline_seconds");
  art.timings.fom_seconds = t.at("fom").get<std::vector<double>>();
  art.timings.snapshot_seconds = t.at("snapshots").get<double>();
  art.timings.pod_seconds = t.at("pod").get<double>();
  art.timings.deim_seconds = t.at("deim").get<double>();
  art.timings.total_seconds = t.at("total").get<double>();
  art.deim = std::make_shared<const DeimOperator>(
      DeimOperator::build(art.basis.u.modes, art.deim_basis, read_index_csv(path("deim_indices")), *space));
  return art;
}

BenchmarkReport run_online(const ExperimentConfig& config, const OfflineArtifacts& artifacts,
                           const RunOptions& options) {
  config.validate();
  if (!artifacts.space || !artifacts.operators || !artifacts.deim) throw Error("run_online: offline artifacts missing");
  Logger log(options.log);
  const DGSpace& space = *artifacts.space;
  const FomOperators& base = *artifacts.operators;
  const DenseMatrix& psi_u = artifacts.basis.u.modes;
  const DenseMatrix& psi_v = artifacts.basis.v.modes;

  BenchmarkReport report;
  report.config_hash = config_hash(config);
  report.modes = static_cast<int>(psi_u.cols());
  report.deim_modes = artifacts.deim->num_points();
  report.deim_bound = artifacts.deim_bound;
  report.sigma_u = artifacts.basis.u.singular_values;
  report.sigma_v = artifacts.basis.v.singular_values;
  report.sigma_f = artifacts.f_singular_values;

  // Reduced operators are offline work and stay outside the timed loops.
  const RomOperators reduced =
      reduce_operators(psi_u, psi_v, base.mass(), base.stiffness_u(), base.stiffness_v(), base.params());
  const PodNonlinearity pod(artifacts.space, psi_u);
  const DeimNonlinearity deim(artifacts.deim);
  const auto [u0, v0] = initial_state(space, config.seed);
  const Vector ru0 = project_state(psi_u, base.mass(), u0);
  const Vector rv0 = project_state(psi_v, base.mass(), v0);
  const std::size_t steps = num_time_steps(config.dt, config.t_final);
  const int stride = static_cast<int>(steps);

  report.cases.resize(config.test_mu.size());
  parallel_for(config.test_mu.size(), config.jobs, [&](std::size_t i) {
    CaseResult& c = report.cases[i];
    c.mu = config.test_mu[i];
    const char* stage = "FOM";
    try {
      FomSolveOptions solve;
      solve.snapshot_stride = stride;
      solve.store_nonlinear = false;
      solve.newton = config.newton;
      const Trajectory fom = fom_solve(base.with_mu(c.mu), u0, v0, config.dt, config.t_final, solve);
      c.fom_seconds = fom.wall_seconds;
      c.fom_newton = fom.mean_newton_iterations;
      c.fom_final = fom.u.rightCols(1);

      RomOperators ops = reduced;
      ops.mu = c.mu;
      stage = "POD-ROM";
      const RomTrajectory rp = rom_solve(ops, pod, ru0, rv0, config.dt, config.t_final, stride, config.newton);
      c.pod_seconds = rp.wall_seconds;
      c.pod_newton = rp.mean_newton_iterations;
      c.pod_final = psi_u * rp.u.rightCols(1);
      c.speedup_pod = c.fom_seconds / c.pod_seconds;
      c.pod_error = relative_l2_error(base.mass(), c.fom_final, c.pod_final);

      stage = "DEIM-ROM";
      const RomTrajectory rd = rom_solve(ops, deim, ru0, rv0, config.dt, config.t_final, stride, config.newton);
      c.deim_seconds = rd.wall_seconds;
      c.deim_newton = rd.mean_newton_iterations;
      c.deim_final = psi_u * rd.u.rightCols(1);
      c.speedup_deim = c.fom_seconds / c.deim_seconds;
      c.deim_error = relative_l2_error(base.mass(), c.fom_final, c.deim_final);
      c.ok = true;
      log("online: mu = ", mu_label(c.mu), " FOM ", c.fom_seconds, " s, POD ", c.pod_seconds, " s, DEIM ",
          c.deim_seconds, " s, errors ", c.pod_error, " / ", c.deim_error);
    } catch (const std::exception& e) {
      c.ok = false;
      c.error = std::string(stage) + ": " + e.what();
      log("online: mu = ", mu_label(c.mu), " failed: ", c.error);
    }
  });
  return report;
}

nlohmann::json to_json(const BenchmarkReport& report) {
  nlohmann::json j;
  j["config_hash"] = report.config_hash;
  j["modes"] = report.modes;
  j["deim_modes"] = report.deim_modes;
  j["deim_bound"] = report.deim_bound;
  j["cases"] = nlohmann::json::array();
  for (const CaseResult& c : report.cases) {
    nlohmann::json e;
    e["mu"] = c.mu;
    e["ok"] = c.ok;
    if (!c.ok) e["error"] = c.error;
    // Stages that finished before a failure are still reported.
    for (const auto& [variant, state, seconds, speedup, error, newton] :
         {std::tuple{"fom", &c.fom_final, c.fom_seconds, 1.0, 0.0, c.fom_newton},
          std::tuple{"pod", &c.pod_final, c.pod_seconds, c.speedup_pod, c.pod_error, c.pod_newton},
          std::tuple{"deim", &c.deim_final, c.deim_seconds, c.speedup_deim, c.deim_error, c.deim_newton}}) {
      if (state->size() == 0) continue;
      e["seconds"][variant] = seconds;
      e["mean_newton_iterations"][variant] = newton;
      if (std::string(variant) != "fom") {
        e["speedup"][variant] = speedup;
        e["relative_error"][variant] = error;
      }
    }
    j["cases"].push_back(std::move(e));
  }
  j["singular_values"] = {{"u", to_std(report.sigma_u)}, {"v", to_std(report.sigma_v)}, {"f", to_std(report.sigma_f)}};
  return j;
}

void emit_figures(const BenchmarkReport& report, const DGSpace& space, const std::string& directory) {
  const fs::path dir = directory;
  fs::create_directories(dir);
  auto open = [](const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    out.precision(17);
    return out;
  };
  auto finish = [](std::ofstream& out, const fs::path& p) {
    out.close();
    if (!out) throw IoError("failed writing " + p.string());
  };

  const fs::path spectra = dir / "singular_values.csv";
  std::ofstream s = open(spectra);
  s << "field,index,sigma\n";
  for (const auto& [field, sigma] : {std::pair<const char*, const Vector*>{"u", &report.sigma_u},
                                     {"v", &report.sigma_v}, {"f", &report.sigma_f}}) {
    for (Eigen::Index i = 0; i < sigma->size(); ++i) s << field << ',' << i + 1 << ',' << (*sigma)(i) << '\n';
  }
  finish(s, spectra);

  const fs::path timings = dir / "timings.csv";
  std::ofstream t = open(timings);
  t << "mu,fom,pod,deim,s_pod,s_deim,bound\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const CaseResult& c : report.cases) {
    auto value = [&](const Vector& state, double x) { return state.size() > 0 ? x : nan; };
    t << c.mu << ',' << value(c.fom_final, c.fom_seconds) << ',' << value(c.pod_final, c.pod_seconds) << ','
      << value(c.deim_final, c.deim_seconds) << ',' << value(c.pod_final, c.speedup_pod) << ','
      << value(c.deim_final, c.speedup_deim) << ',' << report.deim_bound << '\n';
  }
  finish(t, timings);

  write_json(dir / "report.json", to_json(report));

  for (const CaseResult& c : report.cases) {
    const std::string label = mu_label(c.mu);
    for (const auto& [variant, state] : {std::pair<const char*, const Vector*>{"fom", &c.fom_final},
                                         {"pod", &c.pod_final}, {"deim", &c.deim_final}}) {
      if (state->size() == 0) continue;
      write_vtk((dir / (std::string("pattern_") + variant + "_" + label + ".vtk")).string(), space.mesh(),
                space.cell_averages(*state), "u");
    }
  }
}

}  // namespace fhnrom
