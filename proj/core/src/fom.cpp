#include "fhnrom/fom.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "fhnrom/error.hpp"

namespace fhnrom {

FomOperators::FomOperators(std::shared_ptr<const DGSpace> space, const FhnParameters& params, double penalty)
    : space_(std::move(space)), params_(params), penalty_(penalty) {
  if (!space_) throw Error("FomOperators: null space");
  if (!(params.alpha > 0.0) || !(params.beta > 0.0)) throw Error("FomOperators: alpha and beta must be positive");
  mass_ = std::make_shared<const BlockSparseMatrix>(assemble_mass(*space_));
  stiffness_u_ = std::make_shared<const BlockSparseMatrix>(assemble_stiffness_sipg(*space_, params.diffusion_u, penalty));
  stiffness_v_ = std::make_shared<const BlockSparseMatrix>(assemble_stiffness_sipg(*space_, params.diffusion_v, penalty));
}

FomOperators FomOperators::with_mu(double mu) const {
  FomOperators copy = *this;
  copy.params_.mu = mu;
  return copy;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void append(Triplets& out, const SparseMatrix& m, double scale, Eigen::Index row0, Eigen::Index col0) {
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      out.emplace_back(static_cast<int>(row0 + it.row()), static_cast<int>(col0 + it.col()), scale * it.value());
    }
  }
}

}  // namespace

FomStepper::FomStepper(FomOperators ops, double dt, NewtonOptions newton)
    : ops_(std::move(ops)), dt_(dt), newton_(newton) {
  if (!(dt > 0.0)) throw Error("FomStepper: dt must be positive");
  const auto n = static_cast<Eigen::Index>(ops_.num_dofs());
  const FhnParameters& p = ops_.params();
  const SparseMatrix m = ops_.mass().to_sparse();
  const SparseMatrix su = ops_.stiffness_u().to_sparse();
  const SparseMatrix sv = ops_.stiffness_v().to_sparse();

  Triplets t;
  t.reserve(static_cast<std::size_t>(4 * m.nonZeros() + su.nonZeros() + sv.nonZeros()));
  append(t, m, 1.0 / dt - p.alpha, 0, 0);
  append(t, su, 1.0, 0, 0);
  append(t, m, p.alpha, 0, n);
  append(t, m, -p.beta, n, 0);
  append(t, m, 1.0 / dt + p.beta, n, n);
  append(t, sv, 1.0, n, n);
  linear_.resize(2 * n, 2 * n);
  linear_.setFromTriplets(t.begin(), t.end());
  linear_.makeCompressed();

  // Locate every entry of the top-left diagonal blocks, where J_F lands.
  const DGSpace& space = ops_.space();
  const int nloc = space.local_size();
  diagonal_positions_.reserve(space.num_elements() * static_cast<std::size_t>(nloc * nloc));
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    for (int j = 0; j < nloc; ++j) {
      const auto col = static_cast<Eigen::Index>(space.dof(e, j));
      const auto* inner = linear_.innerIndexPtr();
      const auto begin = linear_.outerIndexPtr()[col];
      const auto end = linear_.outerIndexPtr()[col + 1];
      for (int i = 0; i < nloc; ++i) {
        const auto row = static_cast<int>(space.dof(e, i));
        const auto* it = std::lower_bound(inner + begin, inner + end, row);
        if (it == inner + end || *it != row) throw Error("FomStepper: diagonal block entry missing from pattern");
        diagonal_positions_.push_back(static_cast<Eigen::Index>(it - inner));
      }
    }
  }
  jacobian_ = linear_;
  lu_.analyzePattern(jacobian_);
}

Vector FomStepper::residual(const Vector& u_n, const Vector& v_n, const Vector& u, const Vector& v) const {
  const auto n = static_cast<Eigen::Index>(ops_.num_dofs());
  Vector x(2 * n);
  x << u, v;
  Vector r = linear_ * x;
  Vector m_prev(2 * n);
  m_prev.head(n) = ops_.mass().multiply(u_n);
  m_prev.tail(n) = ops_.mass().multiply(v_n);
  r -= m_prev / dt_;
  r.head(n) += assemble_nonlinear(ops_.space(), u, ops_.params().mu);
  return r;
}

void FomStepper::load_jacobian(const Vector& u) {
  nonlinear_jacobian_blocks(ops_.space(), u, ops_.params().mu, jf_blocks_);
  double* values = jacobian_.valuePtr();
  const double* base = linear_.valuePtr();
  std::copy(base, base + linear_.nonZeros(), values);
  for (std::size_t k = 0; k < diagonal_positions_.size(); ++k) values[diagonal_positions_[k]] += jf_blocks_[k];
}

FomStepResult FomStepper::step(const Vector& u_n, const Vector& v_n) {
  const auto n = static_cast<Eigen::Index>(ops_.num_dofs());
  if (u_n.size() != n || v_n.size() != n) throw DimensionError("FomStepper::step: state length mismatch");
  const double tol = newton_.tolerance * std::sqrt(static_cast<double>(n));

  FomStepResult out;
  out.u = u_n;
  out.v = v_n;
  Vector r = residual(u_n, v_n, out.u, out.v);
  double norm = r.norm();
  for (int it = 1; it <= newton_.max_iterations; ++it) {
    load_jacobian(out.u);
    lu_.factorize(jacobian_);
    if (lu_.info() != Eigen::Success) {
      throw NewtonFailure("FOM Newton: Jacobian factorization failed", norm, it);
    }
    const Vector delta = lu_.solve(r);
    out.u -= delta.head(n);
    out.v -= delta.tail(n);
    r = residual(u_n, v_n, out.u, out.v);
    norm = r.norm();
    out.newton_iterations = it;
    out.residual = norm;
    if (!std::isfinite(norm)) throw NewtonFailure("FOM Newton: residual is not finite", norm, it);
    if (norm <= tol) return out;
  }
  throw NewtonFailure("FOM Newton: no convergence, residual " + std::to_string(norm), norm,
                      newton_.max_iterations);
}

std::size_t num_time_steps(double dt, double t_final) {
  if (!(dt > 0.0) || !(t_final > 0.0)) throw Error("time grid: dt and t_final must be positive");
  return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

Trajectory fom_solve(const FomOperators& ops, const Vector& u0, const Vector& v0, double dt, double t_final,
                     const FomSolveOptions& options) {
  if (options.snapshot_stride < 1) throw Error("fom_solve: snapshot stride must be >= 1");
  const std::size_t steps = num_time_steps(dt, t_final);
  const auto stride = static_cast<std::size_t>(options.snapshot_stride);
  const std::size_t columns = steps / stride + 1;
  const auto n = static_cast<Eigen::Index>(ops.num_dofs());

  Trajectory traj;
  traj.steps = steps;
  traj.times.reserve(columns);
  traj.u.resize(n, static_cast<Eigen::Index>(columns));
  traj.v.resize(n, static_cast<Eigen::Index>(columns));
  if (options.store_nonlinear) traj.f.resize(n, static_cast<Eigen::Index>(columns));

  auto store = [&](std::size_t column, double t, const Vector& u, const Vector& v) {
    const auto c = static_cast<Eigen::Index>(column);
    traj.times.push_back(t);
    traj.u.col(c) = u;
    traj.v.col(c) = v;
    if (options.store_nonlinear) traj.f.col(c) = assemble_nonlinear(ops.space(), u, ops.params().mu);
  };

  FomStepper stepper(ops, dt, options.newton);
  const auto start = std::chrono::steady_clock::now();
  Vector u = u0;
  Vector v = v0;
  store(0, 0.0, u, v);
  std::size_t newton_total = 0;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    try {
      FomStepResult next = stepper.step(u, v);
      newton_total += static_cast<std::size_t>(next.newton_iterations);
      u = std::move(next.u);
      v = std::move(next.v);
    } catch (const NewtonFailure& failure) {
      throw StepFailure("FOM step failed at t = " + std::to_string(t) + ": " + failure.what(), t,
                        failure.residual());
    }
    if (s % stride == 0) store(s / stride, t, u, v);
  }
  traj.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  traj.mean_newton_iterations = static_cast<double>(newton_total) / static_cast<double>(steps);
  return traj;
}

Vector random_initial_condition(const DGSpace& space, std::uint64_t seed) {
  const ModalBasis& basis = space.basis();
  const int nloc = basis.size();
  Eigen::MatrixXd vandermonde(nloc, nloc);
  for (int i = 0; i < nloc; ++i) {
    vandermonde.row(i) = basis.values(basis.nodes()[static_cast<std::size_t>(i)]).transpose();
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(vandermonde);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Vector out(static_cast<Eigen::Index>(space.num_dofs()));
  Eigen::VectorXd nodal(nloc);
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    for (int i = 0; i < nloc; ++i) nodal(i) = uniform(rng);
    out.segment(static_cast<Eigen::Index>(space.dof(e, 0)), nloc) = lu.solve(nodal);
  }
  return out;
}

double max_abs_at_quadrature(const DGSpace& space, const Vector& u) {
  const int nloc = space.local_size();
  double worst = 0.0;
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const Eigen::VectorXd values = space.volume_values() * u.segment(static_cast<Eigen::Index>(space.dof(e, 0)), nloc);
    worst = std::max(worst, values.cwiseAbs().maxCoeff());
  }
  return worst;
}

double mass_norm(const BlockSparseMatrix& mass, const Vector& x) {
  return std::sqrt(std::max(0.0, x.dot(mass.multiply(x))));
}

}  // namespace fhnrom
