#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/SparseLU>

#include "fhnrom/assembly.hpp"
#include "fhnrom/block_sparse.hpp"
#include "fhnrom/dg_space.hpp"

namespace fhnrom {

/// Coefficients of the FitzHugh-Nagumo system
///   u_t = D_u lap u - alpha (v - u) - f(u; mu)
///   v_t = D_v lap v - beta (v - u)
struct FhnParameters {
  double diffusion_u = 0.04;
  double diffusion_v = 1.0;
  double alpha = 0.3;
  double beta = 1.0;
  double mu = 0.0;
};

struct NewtonOptions {
  /// Converged when ||residual||_2 <= tolerance * sqrt(size).
  double tolerance = 1e-9;
  int max_iterations = 25;
};

/// Discrete operators of the full-order model. Matrices are shared between
/// copies, so `with_mu` is cheap.
class FomOperators {
 public:
  FomOperators(std::shared_ptr<const DGSpace> space, const FhnParameters& params,
               double penalty = kDefaultPenalty);

  const DGSpace& space() const { return *space_; }
  const std::shared_ptr<const DGSpace>& space_ptr() const { return space_; }
  const BlockSparseMatrix& mass() const { return *mass_; }
  const BlockSparseMatrix& stiffness_u() const { return *stiffness_u_; }
  const BlockSparseMatrix& stiffness_v() const { return *stiffness_v_; }
  const FhnParameters& params() const { return params_; }
  double penalty() const { return penalty_; }
  std::size_t num_dofs() const { return space_->num_dofs(); }

  FomOperators with_mu(double mu) const;

 private:
  FomOperators() = default;

  std::shared_ptr<const DGSpace> space_;
  std::shared_ptr<const BlockSparseMatrix> mass_;
  std::shared_ptr<const BlockSparseMatrix> stiffness_u_;
  std::shared_ptr<const BlockSparseMatrix> stiffness_v_;
  FhnParameters params_;
  double penalty_ = kDefaultPenalty;
};

struct FomStepResult {
  Vector u;
  Vector v;
  int newton_iterations = 0;
  double residual = 0.0;
};

/// Backward Euler for the coupled 2N system, solved by Newton with the exact
/// Jacobian
///   [ M/dt + S_u - alpha M + J_F   alpha M             ]
///   [ -beta M                      M/dt + S_v + beta M ].
/// Newton starts from the previous state and always takes at least one step.
/// Holds a sparse LU whose pattern is analyzed once, so a stepper is not
/// shareable between threads.
class FomStepper {
 public:
  FomStepper(FomOperators ops, double dt, NewtonOptions newton = {});

  FomStepResult step(const Vector& u_n, const Vector& v_n);

  /// Backward-Euler residual [r_u; r_v] of a candidate (u, v).
  Vector residual(const Vector& u_n, const Vector& v_n, const Vector& u, const Vector& v) const;

  const FomOperators& operators() const { return ops_; }
  double dt() const { return dt_; }

 private:
  void load_jacobian(const Vector& u);

  FomOperators ops_;
  double dt_;
  NewtonOptions newton_;
  SparseMatrix linear_;
  SparseMatrix jacobian_;
  std::vector<Eigen::Index> diagonal_positions_;
  std::vector<double> jf_blocks_;
  Eigen::SparseLU<SparseMatrix> lu_;
};

/// Snapshot record of a run. Column j of each matrix is the state at times[j].
struct Trajectory {
  std::vector<double> times;
  DenseMatrix u;
  DenseMatrix v;
  DenseMatrix f;  // F(u; mu) at stored states; empty when not requested
  std::size_t steps = 0;
  double wall_seconds = 0.0;
  double mean_newton_iterations = 0.0;
};

struct FomSolveOptions {
  int snapshot_stride = 1;
  bool store_nonlinear = true;
  NewtonOptions newton;
};

/// Runs ceil(t_final/dt) steps and stores every stride-th state (the initial
/// state included). Step failures surface as StepFailure with the time.
Trajectory fom_solve(const FomOperators& ops, const Vector& u0, const Vector& v0, double dt, double t_final,
                     const FomSolveOptions& options = {});

/// Number of backward-Euler steps to reach t_final.
std::size_t num_time_steps(double dt, double t_final);

/// I.i.d. uniform(-1, 1) values at the local nodes of every element, mapped
/// to modal coefficients through the local Vandermonde matrix.
Vector random_initial_condition(const DGSpace& space, std::uint64_t seed);

/// max |u_h| over the volume quadrature points.
double max_abs_at_quadrature(const DGSpace& space, const Vector& u);

/// sqrt(x^T M x)
double mass_norm(const BlockSparseMatrix& mass, const Vector& x);

}  // namespace fhnrom
