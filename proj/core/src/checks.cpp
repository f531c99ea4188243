#include "fhnrom/checks.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "fhnrom/assembly.hpp"
#include "fhnrom/deim.hpp"
#include "fhnrom/experiment.hpp"
#include "fhnrom/fom.hpp"
#include "fhnrom/pod.hpp"

namespace fhnrom {

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << x;
  return s.str();
}

Vector random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = dist(gen);
  return x;
}

struct Context {
  ExperimentConfig config;
  std::shared_ptr<const DGSpace> space;
  std::unique_ptr<FomOperators> ops;
  Trajectory traj;  // short run at the first training parameter
};

}  // namespace

std::vector<CheckResult> run_checks(const ExperimentConfig& config) {
  config.validate();
  Context ctx;
  ctx.config = config;
  ctx.space = std::make_shared<const DGSpace>(build_square_mesh(config.half_width, config.refinements), config.degree);
  FhnParameters physics = config.physics;
  physics.mu = config.train_mu.front();
  ctx.ops = std::make_unique<FomOperators>(ctx.space, physics, config.penalty);
  const auto n = static_cast<Eigen::Index>(ctx.space->num_dofs());

  std::vector<CheckResult> results;
  auto run = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    CheckResult r;
    r.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
      std::tie(r.passed, r.detail) = body();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  };

  run("mesh_faces", [&] {
    const Mesh& mesh = ctx.space->mesh();
    const FaceConnectivityReport report = face_connectivity_check(mesh);
    const std::size_t expected = 2u << (2 * config.refinements);
    const bool ok = report.ok() && mesh.num_elements() == expected &&
                    3 * mesh.num_elements() == 2 * report.interior + report.boundary;
    return std::pair{ok, std::to_string(mesh.num_elements()) + " elements, " + std::to_string(report.interior) +
                             " interior / " + std::to_string(report.boundary) + " boundary faces, " +
                             std::to_string(report.defects.size()) + " defects"};
  });

  run("mass_block_diagonal", [&] {
    const BlockSparseMatrix& m = ctx.ops->mass();
    double worst = 0.0;
    const auto nloc = ctx.space->local_size();
    for (std::size_t e = 0; e < ctx.space->num_elements(); ++e) {
      const double det = std::abs(ctx.space->mesh().affine_maps()[e].det);
      worst = std::max(worst, (m.diagonal_block(e) - det * Eigen::MatrixXd::Identity(nloc, nloc)).cwiseAbs().maxCoeff() / det);
    }
    return std::pair{m.is_block_diagonal() && worst <= 1e-12, "max relative block defect " + fmt(worst)};
  });

  run("stiffness_symmetry_and_kernel", [&] {
    const Vector one = project_function(*ctx.space, [](const Point2&) { return 1.0; });
    double asym = 0.0, kernel = 0.0;
    for (const BlockSparseMatrix* s : {&ctx.ops->stiffness_u(), &ctx.ops->stiffness_v()}) {
      asym = std::max(asym, s->max_asymmetry());
      kernel = std::max(kernel, s->multiply(one).cwiseAbs().maxCoeff());
    }
    const std::size_t blocks = ctx.space->num_elements() + 2 * ctx.space->mesh().interior_faces().size();
    const bool ok = asym <= 1e-12 && kernel <= 1e-12 && ctx.ops->stiffness_u().num_blocks() == blocks;
    return std::pair{ok, "asymmetry " + fmt(asym) + ", |S 1| " + fmt(kernel)};
  });

  run("nonlinear_jacobian_fd", [&] {
    const double mu = physics.mu;
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 5; ++t) {
      const Vector u = random_vector(n, 1000 + t);
      const Vector d = random_vector(n, 2000 + t);
      const Vector jd = assemble_nonlinear_jacobian(*ctx.space, u, mu).multiply(d);
      const double h = 1e-6;
      const Vector fd = (assemble_nonlinear(*ctx.space, u + h * d, mu) - assemble_nonlinear(*ctx.space, u - h * d, mu)) / (2 * h);
      worst = std::max(worst, (fd - jd).cwiseAbs().maxCoeff() / jd.cwiseAbs().maxCoeff());
    }
    return std::pair{worst <= 1e-6, "max relative FD error " + fmt(worst)};
  });

  run("fom_newton", [&] {
    const auto [u0, v0] = initial_state(*ctx.space, config.seed);
    FomSolveOptions solve;
    solve.newton = config.newton;
    ctx.traj = fom_solve(*ctx.ops, u0, v0, config.dt, std::min(config.t_final, 20.0), solve);
    FomStepper stepper(*ctx.ops, config.dt, config.newton);
    const Eigen::Index last = ctx.traj.u.cols() - 1;
    const double r = stepper.residual(ctx.traj.u.col(last - 1), ctx.traj.v.col(last - 1), ctx.traj.u.col(last),
                                      ctx.traj.v.col(last)).norm();
    const double tol = config.newton.tolerance * std::sqrt(static_cast<double>(n));
    const bool ok = r <= tol && ctx.traj.mean_newton_iterations >= 1.0;
    return std::pair{ok, "last residual " + fmt(r) + " (tol " + fmt(tol) + "), mean Newton " +
                             fmt(ctx.traj.mean_newton_iterations)};
  });

  run("pod_m_orthonormality", [&] {
    if (ctx.traj.u.size() == 0) return std::pair{false, std::string("no snapshots (fom_newton failed)")};
    const BlockCholesky factor = cholesky(ctx.ops->mass());
    double worst = 0.0;
    int k = 0;
    for (const DenseMatrix* snaps : {&ctx.traj.u, &ctx.traj.v}) {
      const PodBasis b = compute_pod_basis(*snaps, factor, config.pod_selection());
      worst = std::max(worst, m_orthonormality_defect(b.modes, ctx.ops->mass()));
      k = std::max(k, b.size());
    }
    return std::pair{worst <= 1e-8, "k = " + std::to_string(k) + ", max |Psi^T M Psi - I| " + fmt(worst)};
  });

  run("deim_interpolation", [&] {
    if (ctx.traj.f.size() == 0) return std::pair{false, std::string("no snapshots (fom_newton failed)")};
    SvdOptions opts;
    opts.compute_right = false;
    const SvdResult svd = thin_svd(ctx.traj.f, opts);
    const int rank = numerical_rank(svd.singular_values, svd.rank_tolerance);
    const int m = select_mode_count(svd.singular_values, rank, config.deim_selection());
    const DenseMatrix w = svd.left.leftCols(m);
    const IndexList p = deim_select(w);
    const DenseMatrix pw = select_rows(w, p);
    const Eigen::FullPivLU<DenseMatrix> lu(pw);
    double at_indices = 0.0, in_span = 0.0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      const Vector f = random_vector(n, 3000 + t);
      const Vector fi = w * lu.solve(select_rows(f, p));
      for (auto idx : p) at_indices = std::max(at_indices, std::abs(f(idx) - fi(idx)) / f.cwiseAbs().maxCoeff());
      const Vector g = w * random_vector(m, 4000 + t);
      in_span = std::max(in_span, (g - w * lu.solve(select_rows(g, p))).norm() / g.norm());
    }
    const double bound = deim_error_bound(w, p);
    return std::pair{at_indices <= 1e-12 && in_span <= 1e-10,
                     "n = " + std::to_string(m) + ", residual at indices " + fmt(at_indices) + ", span error " +
                         fmt(in_span) + ", bound " + fmt(bound)};
  });

  run("config_round_trip", [&] {
    const nlohmann::json once = to_json(config);
    const nlohmann::json twice = to_json(config_from_json(once));
    return std::pair{once == twice, "hash " + config_hash(config)};
  });

  return results;
}

bool print_checks(std::ostream& out, const std::vector<CheckResult>& results) {
  bool all = true;
  for (const CheckResult& r : results) {
    all = all && r.passed;
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << " [" << fmt(r.seconds) << " s]\n";
  }
  return all;
}

}  // namespace fhnrom
