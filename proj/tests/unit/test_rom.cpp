#include <cmath>
#include <memory>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "fhnrom/error.hpp"
#include "fhnrom/rom.hpp"

using namespace fhnrom;

namespace {

DenseMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  DenseMatrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = dist(gen);
  return a;
}

FomOperators make_ops(int refinements, double mu) {
  FhnParameters p;
  p.mu = mu;
  return FomOperators(std::make_shared<const DGSpace>(build_square_mesh(10.0, refinements), 1), p);
}

ModeSelection explicit_modes(int k) {
  ModeSelection s;
  s.modes = k;
  return s;
}

// Snapshot-trained bases for a small problem.
struct Trained {
  Trained(const FomOperators& ops, int k, int n, double t_final) : factor(ops.mass()) {
    const Vector u0 = random_initial_condition(ops.space(), 20160101);
    const Vector v0 = random_initial_condition(ops.space(), 20160102);
    traj = fom_solve(ops, u0, v0, 0.5, t_final);
    psi_u = compute_pod_basis(traj.u, factor, explicit_modes(k)).modes;
    psi_v = compute_pod_basis(traj.v, factor, explicit_modes(k)).modes;
    const SvdResult svd = thin_svd(traj.f, SvdOptions{false});
    w = svd.left.leftCols(n);
    rom = reduce_operators(psi_u, psi_v, ops.mass(), ops.stiffness_u(), ops.stiffness_v(), ops.params());
    deim = std::make_shared<const DeimOperator>(DeimOperator::build(psi_u, w, deim_select(w), ops.space()));
  }
  BlockCholesky factor;
  Trajectory traj;
  DenseMatrix psi_u, psi_v, w;
  RomOperators rom;
  std::shared_ptr<const DeimOperator> deim;
};

}  // namespace

TEST_CASE("a complete basis reproduces the full-order step") {
  const FomOperators ops = make_ops(1, 0.03);
  const auto n = static_cast<Eigen::Index>(ops.num_dofs());
  const BlockCholesky factor(ops.mass());
  const DenseMatrix psi = compute_pod_basis(random_matrix(n, n, 1), factor, explicit_modes(static_cast<int>(n))).modes;
  const RomOperators rom = reduce_operators(psi, psi, ops.mass(), ops.stiffness_u(), ops.stiffness_v(), ops.params());
  const PodNonlinearity nonlinear(ops.space_ptr(), psi);

  const Vector u = random_initial_condition(ops.space(), 2);
  const Vector v = random_initial_condition(ops.space(), 3);
  const RomState s0{project_state(psi, ops.mass(), u), project_state(psi, ops.mass(), v), 0.0};
  CHECK((psi * s0.u - u).cwiseAbs().maxCoeff() <= 1e-10);

  FomStepper stepper(ops, 0.5);
  const FomStepResult full = stepper.step(u, v);
  const RomStepResult reduced = rom_step(rom, nonlinear, s0, 0.5);
  CHECK((psi * reduced.state.u - full.u).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((psi * reduced.state.v - full.v).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(reduced.state.t == 0.5);
}

TEST_CASE("the constant state is a reduced fixed point") {
  const FomOperators ops = make_ops(1, -0.02);
  const auto n = static_cast<Eigen::Index>(ops.num_dofs());
  const Vector one = project_function(ops.space(), [](const Point2&) { return 1.0; });
  DenseMatrix snaps(n, 3);
  snaps << one, random_matrix(n, 2, 4);
  const BlockCholesky factor(ops.mass());
  const DenseMatrix psi = compute_pod_basis(snaps, factor, explicit_modes(3)).modes;
  const RomOperators rom = reduce_operators(psi, psi, ops.mass(), ops.stiffness_u(), ops.stiffness_v(), ops.params());
  const PodNonlinearity nonlinear(ops.space_ptr(), psi);
  const Vector c = project_state(psi, ops.mass(), one);
  const RomStepResult r = rom_step(rom, nonlinear, RomState{c, c, 0.0}, 0.5);
  CHECK(r.newton_iterations == 1);
  CHECK((r.state.u - c).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((r.state.v - c).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("reduced residual is the projected full residual") {
  const FomOperators ops = make_ops(2, 0.01);
  const Trained t(ops, 8, 8, 10.0);
  const PodNonlinearity nonlinear(ops.space_ptr(), t.psi_u);
  FomStepper stepper(ops, 0.5);
  const auto n = static_cast<Eigen::Index>(ops.num_dofs());
  for (unsigned trial = 0; trial < 3; ++trial) {
    const RomState prev{random_matrix(8, 1, 10 + trial).col(0), random_matrix(8, 1, 20 + trial).col(0), 0.0};
    const Vector u = random_matrix(8, 1, 30 + trial).col(0);
    const Vector v = random_matrix(8, 1, 40 + trial).col(0);
    const Vector reduced = rom_residual(t.rom, nonlinear, prev, u, v, 0.5);
    const Vector full = stepper.residual(t.psi_u * prev.u, t.psi_v * prev.v, t.psi_u * u, t.psi_v * v);
    Vector projected(16);
    projected.head(8) = t.psi_u.transpose() * full.head(n);
    projected.tail(8) = t.psi_v.transpose() * full.tail(n);
    CHECK((reduced - projected).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + projected.norm()));
  }
}

TEST_CASE("POD Jacobian matches dense projection and finite differences") {
  const FomOperators ops = make_ops(1, 0.02);
  const auto n = static_cast<Eigen::Index>(ops.num_dofs());
  const DenseMatrix psi = compute_pod_basis(random_matrix(n, 5, 50), BlockCholesky(ops.mass()), explicit_modes(5)).modes;
  const PodNonlinearity nonlinear(ops.space_ptr(), psi);
  const Vector ur = random_matrix(5, 1, 51).col(0);
  const DenseMatrix dense = psi.transpose() * assemble_nonlinear_jacobian(ops.space(), psi * ur, 0.02).to_dense() * psi;
  CHECK((nonlinear.jacobian(ur, 0.02) - dense).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + dense.norm()));
  const Vector d = random_matrix(5, 1, 52).col(0);
  const double eps = 1e-6;
  const Vector fd = (nonlinear.evaluate(ur + eps * d, 0.02) - nonlinear.evaluate(ur - eps * d, 0.02)) / (2 * eps);
  CHECK((fd - dense * d).cwiseAbs().maxCoeff() <= 1e-6 * (dense * d).cwiseAbs().maxCoeff());
}

TEST_CASE("POD and DEIM variants agree with n = k") {
  const FomOperators ops = make_ops(2, 0.02);
  const Trained t(ops, 20, 20, 50.0);
  const PodNonlinearity pod(ops.space_ptr(), t.psi_u);
  const DeimNonlinearity deim(t.deim);
  const Vector u0 = project_state(t.psi_u, ops.mass(), t.traj.u.col(0));
  const Vector v0 = project_state(t.psi_v, ops.mass(), t.traj.v.col(0));
  const RomTrajectory a = rom_solve(t.rom, pod, u0, v0, 0.5, 5.0);
  const RomTrajectory b = rom_solve(t.rom, deim, u0, v0, 0.5, 5.0);
  REQUIRE(a.steps == 10);
  CHECK((a.u.col(10) - b.u.col(10)).cwiseAbs().maxCoeff() <= 1e-4);
  CHECK((a.v.col(10) - b.v.col(10)).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("trained ROM tracks the full model at a training parameter") {
  const FomOperators ops = make_ops(2, 0.02);
  const Trained t(ops, 30, 30, 50.0);
  const PodNonlinearity pod(ops.space_ptr(), t.psi_u);
  const Vector u0 = project_state(t.psi_u, ops.mass(), t.traj.u.col(0));
  const Vector v0 = project_state(t.psi_v, ops.mass(), t.traj.v.col(0));
  const RomTrajectory r = rom_solve(t.rom, pod, u0, v0, 0.5, 50.0);
  CHECK(r.times.size() == t.traj.times.size());
  const Eigen::Index last = r.u.cols() - 1;
  CHECK(relative_l2_error(ops.mass(), t.traj.u.col(last), t.psi_u * r.u.col(last)) <= 1e-2);
}

TEST_CASE("rom_solve stores the time grid") {
  const FomOperators ops = make_ops(1, 0.0);
  const Trained t(ops, 3, 3, 2.0);
  const PodNonlinearity pod(ops.space_ptr(), t.psi_u);
  const RomTrajectory r = rom_solve(t.rom, pod, Vector::Zero(3), Vector::Zero(3), 0.5, 1.0);
  CHECK(r.times == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(r.u.cols() == 3);
  CHECK(r.u.isZero(0.0));
  CHECK_THROWS_AS(rom_step(t.rom, pod, RomState{Vector::Zero(2), Vector::Zero(3), 0.0}, 0.5), DimensionError);
}

TEST_CASE("Newton failure carries the residual trace") {
  const FomOperators ops = make_ops(1, 0.0);
  const Trained t(ops, 3, 3, 2.0);
  const PodNonlinearity pod(ops.space_ptr(), t.psi_u);
  NewtonOptions newton;
  newton.tolerance = 1e-300;
  newton.max_iterations = 2;
  try {
    rom_step(t.rom, pod, RomState{Vector::Ones(3), Vector::Zero(3), 0.0}, 0.5, newton);
    FAIL("expected NewtonFailure");
  } catch (const NewtonFailure& e) {
    CHECK(e.iterations() == 2);
    CHECK(std::string(e.what()).find("residual trace") != std::string::npos);
  }
}

TEST_CASE("relative error metric") {
  const FomOperators ops = make_ops(1, 0.0);
  const Vector one = project_function(ops.space(), [](const Point2&) { return 1.0; });
  CHECK(relative_l2_error(ops.mass(), one, 1.01 * one) == doctest::Approx(0.01).epsilon(1e-10));
  CHECK_THROWS(relative_l2_error(ops.mass(), Vector::Zero(one.size()), one));
}
