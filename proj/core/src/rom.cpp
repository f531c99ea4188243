#include "fhnrom/rom.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "fhnrom/assembly.hpp"
#include "fhnrom/error.hpp"

namespace fhnrom {

PodNonlinearity::PodNonlinearity(std::shared_ptr<const DGSpace> space, DenseMatrix psi_u)
    : space_(std::move(space)), psi_u_(std::move(psi_u)) {
  if (!space_) throw Error("PodNonlinearity: null space");
  if (static_cast<std::size_t>(psi_u_.rows()) != space_->num_dofs()) {
    throw DimensionError("PodNonlinearity: basis rows do not match the space");
  }
}

Vector PodNonlinearity::evaluate(const Vector& reduced_u, double mu) const {
  const Vector u = psi_u_ * reduced_u;
  return psi_u_.transpose() * assemble_nonlinear(*space_, u, mu);
}

DenseMatrix PodNonlinearity::jacobian(const Vector& reduced_u, double mu) const {
  const Vector u = psi_u_ * reduced_u;
  std::vector<double> blocks;
  nonlinear_jacobian_blocks(*space_, u, mu, blocks);
  const int nloc = space_->local_size();
  const auto bb = static_cast<std::size_t>(nloc * nloc);
  const auto k = psi_u_.cols();
  DenseMatrix out = DenseMatrix::Zero(k, k);
  DenseMatrix scratch(nloc, k);
  for (std::size_t e = 0; e < space_->num_elements(); ++e) {
    const auto rows = psi_u_.middleRows(static_cast<Eigen::Index>(space_->dof(e, 0)), nloc);
    const Eigen::Map<const Eigen::MatrixXd> block(blocks.data() + e * bb, nloc, nloc);
    scratch.noalias() = block * rows;
    out.noalias() += rows.transpose() * scratch;
  }
  return out;
}

DeimNonlinearity::DeimNonlinearity(std::shared_ptr<const DeimOperator> op) : op_(std::move(op)) {
  if (!op_) throw Error("DeimNonlinearity: null operator");
}

Vector rom_residual(const RomOperators& ops, const ReducedNonlinearity& nonlinear, const RomState& previous,
                    const Vector& u, const Vector& v, double dt) {
  const auto k = static_cast<Eigen::Index>(ops.size());
  Vector r(2 * k);
  r.head(k) = (u - previous.u) / dt + ops.stiffness_u * u + ops.alpha * (ops.mass_uv * v) - ops.alpha * u +
              nonlinear.evaluate(u, ops.mu);
  r.tail(k) = (v - previous.v) / dt + ops.stiffness_v * v + ops.beta * v - ops.beta * (ops.mass_vu * u);
  return r;
}

RomStepResult rom_step(const RomOperators& ops, const ReducedNonlinearity& nonlinear, const RomState& state,
                       double dt, const NewtonOptions& newton) {
  if (!(dt > 0.0)) throw Error("rom_step: dt must be positive");
  const auto k = static_cast<Eigen::Index>(ops.size());
  if (state.u.size() != k || state.v.size() != k || nonlinear.size() != k) {
    throw DimensionError("rom_step: reduced dimensions disagree");
  }
  const double tol = newton.tolerance * std::sqrt(2.0 * static_cast<double>(k));
  const DenseMatrix identity = DenseMatrix::Identity(k, k);

  // Constant blocks of the 2k Jacobian.
  DenseMatrix jac(2 * k, 2 * k);
  jac.topRightCorner(k, k) = ops.alpha * ops.mass_uv;
  jac.bottomLeftCorner(k, k) = -ops.beta * ops.mass_vu;
  jac.bottomRightCorner(k, k) = identity / dt + ops.stiffness_v + ops.beta * identity;
  const DenseMatrix top_left_linear = identity / dt + ops.stiffness_u - ops.alpha * identity;

  RomStepResult out;
  out.state.u = state.u;
  out.state.v = state.v;
  out.state.t = state.t + dt;
  Vector r = rom_residual(ops, nonlinear, state, out.state.u, out.state.v, dt);
  std::vector<double> trace{r.norm()};
  for (int it = 1; it <= newton.max_iterations; ++it) {
    jac.topLeftCorner(k, k) = top_left_linear + nonlinear.jacobian(out.state.u, ops.mu);
    const Vector delta = jac.partialPivLu().solve(r);
    out.state.u -= delta.head(k);
    out.state.v -= delta.tail(k);
    r = rom_residual(ops, nonlinear, state, out.state.u, out.state.v, dt);
    const double norm = r.norm();
    trace.push_back(norm);
    out.newton_iterations = it;
    out.residual = norm;
    if (norm <= tol) return out;
    if (!std::isfinite(norm)) break;
  }
  std::ostringstream msg;
  msg << "ROM Newton: no convergence; residual trace";
  for (double t : trace) msg << ' ' << t;
  throw NewtonFailure(msg.str(), trace.back(), out.newton_iterations);
}

RomTrajectory rom_solve(const RomOperators& ops, const ReducedNonlinearity& nonlinear, const Vector& u0,
                        const Vector& v0, double dt, double t_final, int snapshot_stride,
                        const NewtonOptions& newton) {
  if (snapshot_stride < 1) throw Error("rom_solve: snapshot stride must be >= 1");
  const std::size_t steps = num_time_steps(dt, t_final);
  const auto stride = static_cast<std::size_t>(snapshot_stride);
  const auto columns = static_cast<Eigen::Index>(steps / stride + 1);
  const auto k = static_cast<Eigen::Index>(ops.size());

  RomTrajectory traj;
  traj.steps = steps;
  traj.u.resize(k, columns);
  traj.v.resize(k, columns);
  traj.times.reserve(static_cast<std::size_t>(columns));

  const auto start = std::chrono::steady_clock::now();
  RomState state{u0, v0, 0.0};
  traj.times.push_back(0.0);
  traj.u.col(0) = u0;
  traj.v.col(0) = v0;
  std::size_t newton_total = 0;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    try {
      RomStepResult next = rom_step(ops, nonlinear, state, dt, newton);
      newton_total += static_cast<std::size_t>(next.newton_iterations);
      state = std::move(next.state);
      state.t = t;
    } catch (const NewtonFailure& failure) {
      throw StepFailure("ROM step failed at t = " + std::to_string(t) + ": " + failure.what(), t,
                        failure.residual());
    }
    if (s % stride == 0) {
      const auto c = static_cast<Eigen::Index>(s / stride);
      traj.times.push_back(t);
      traj.u.col(c) = state.u;
      traj.v.col(c) = state.v;
    }
  }
  traj.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  traj.mean_newton_iterations = static_cast<double>(newton_total) / static_cast<double>(steps);
  return traj;
}

Vector project_state(const DenseMatrix& psi, const BlockSparseMatrix& mass, const Vector& x) {
  return psi.transpose() * mass.multiply(x);
}

double relative_l2_error(const BlockSparseMatrix& mass, const Vector& reference, const Vector& approx) {
  const double denom = mass_norm(mass, reference);
  if (!(denom > 0.0)) throw Error("relative_l2_error: reference has zero norm");
  return mass_norm(mass, approx - reference) / denom;
}

}  // namespace fhnrom
