#pragma once

#include <memory>
#include <vector>

#include "fhnrom/deim.hpp"
#include "fhnrom/dg_space.hpp"
#include "fhnrom/fom.hpp"
#include "fhnrom/pod.hpp"

namespace fhnrom {

/// Reduced nonlinear term N(u~) and its k x k Jacobian.
class ReducedNonlinearity {
 public:
  virtual ~ReducedNonlinearity() = default;
  virtual int size() const = 0;
  virtual Vector evaluate(const Vector& reduced_u, double mu) const = 0;
  virtual DenseMatrix jacobian(const Vector& reduced_u, double mu) const = 0;
};

/// Psi_u^T F(Psi_u u~): lifts to the full space and assembles every element.
class PodNonlinearity final : public ReducedNonlinearity {
 public:
  PodNonlinearity(std::shared_ptr<const DGSpace> space, DenseMatrix psi_u);

  int size() const override { return static_cast<int>(psi_u_.cols()); }
  Vector evaluate(const Vector& reduced_u, double mu) const override;
  /// Psi_u^T J_F Psi_u, accumulated element block by element block.
  DenseMatrix jacobian(const Vector& reduced_u, double mu) const override;

 private:
  std::shared_ptr<const DGSpace> space_;
  DenseMatrix psi_u_;
};

/// Q P^T F(Psi_u u~), evaluated on the DEIM owner elements only.
class DeimNonlinearity final : public ReducedNonlinearity {
 public:
  explicit DeimNonlinearity(std::shared_ptr<const DeimOperator> op);

  int size() const override { return op_->num_modes(); }
  Vector evaluate(const Vector& reduced_u, double mu) const override { return op_->evaluate(reduced_u, mu); }
  DenseMatrix jacobian(const Vector& reduced_u, double mu) const override { return op_->jacobian(reduced_u, mu); }

  const DeimOperator& op() const { return *op_; }

 private:
  std::shared_ptr<const DeimOperator> op_;
};

struct RomState {
  Vector u;
  Vector v;
  double t = 0.0;
};

struct RomStepResult {
  RomState state;
  int newton_iterations = 0;
  double residual = 0.0;
};

/// Backward-Euler residual of the 2k reduced system for a candidate (u, v).
Vector rom_residual(const RomOperators& ops, const ReducedNonlinearity& nonlinear, const RomState& previous,
                    const Vector& u, const Vector& v, double dt);

/// One backward-Euler step of the reduced system, Newton to
/// ||r|| <= tol * sqrt(2k), at least one Newton update.
RomStepResult rom_step(const RomOperators& ops, const ReducedNonlinearity& nonlinear, const RomState& state,
                       double dt, const NewtonOptions& newton = {});

struct RomTrajectory {
  std::vector<double> times;
  DenseMatrix u;  // k x columns
  DenseMatrix v;
  std::size_t steps = 0;
  double wall_seconds = 0.0;
  double mean_newton_iterations = 0.0;
};

/// Same time grid as fom_solve. Step failures surface as StepFailure.
RomTrajectory rom_solve(const RomOperators& ops, const ReducedNonlinearity& nonlinear, const Vector& u0,
                        const Vector& v0, double dt, double t_final, int snapshot_stride = 1,
                        const NewtonOptions& newton = {});

/// M-orthogonal projection coefficients Psi^T M x.
Vector project_state(const DenseMatrix& psi, const BlockSparseMatrix& mass, const Vector& x);

/// ||approx - reference||_M / ||reference||_M
double relative_l2_error(const BlockSparseMatrix& mass, const Vector& reference, const Vector& approx);

}  // namespace fhnrom
