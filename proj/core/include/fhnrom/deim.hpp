#pragma once

#include <cstdint>
#include <vector>

#include "fhnrom/dg_space.hpp"

namespace fhnrom {

using IndexList = std::vector<Eigen::Index>;

/// Greedy DEIM interpolation indices, one per column of W, in column order.
/// Throws RankError naming the column whose residual vanished.
IndexList deim_select(const DenseMatrix& w);

/// Work counters for the online DEIM phase.
struct OpCounter {
  std::uint64_t flops = 0;
  /// Jacobian entries formed for P^T J_F.
  std::uint64_t jacobian_entries = 0;
};

/// Offline-built DEIM approximation of Psi_u^T F(Psi_u u~; mu).
///
/// The online methods touch only the elements owning the interpolation
/// indices; nothing they do scales with the number of degrees of freedom.
class DeimOperator {
 public:
  /// Throws SingularMatrixError when P^T W is singular.
  static DeimOperator build(const DenseMatrix& psi_u, const DenseMatrix& w, IndexList indices,
                            const DGSpace& space);

  int num_modes() const { return static_cast<int>(projector_.rows()); }
  int num_points() const { return static_cast<int>(indices_.size()); }
  int local_size() const { return local_size_; }

  const DenseMatrix& basis() const { return basis_; }
  const IndexList& indices() const { return indices_; }
  /// Q = Psi_u^T W (P^T W)^{-1}, k x n.
  const DenseMatrix& projector() const { return projector_; }
  /// Element owning each interpolation index.
  const std::vector<std::size_t>& owner_elements() const { return owners_; }
  std::size_t num_sampled_elements() const { return sampled_.size(); }

  /// Q P^T F(Psi_u u~; mu), length k.
  Vector evaluate(const Vector& reduced_u, double mu, OpCounter* counter = nullptr) const;

  /// Q (P^T J_F) Psi_u, k x k, using exactly n * N_loc Jacobian entries.
  DenseMatrix jacobian(const Vector& reduced_u, double mu, OpCounter* counter = nullptr) const;

  /// W (P^T W)^{-1} P^T f for a full-length vector (offline diagnostics).
  Vector interpolate(const Vector& f) const;

 private:
  struct SampledElement {
    std::size_t element = 0;
    double det = 0.0;
    std::vector<int> local_rows;  // sampled local dof of this element
    std::vector<int> slots;       // position of each in `indices_`
    DenseMatrix psi_rows;         // N_loc x k restriction of Psi_u
  };

  DenseMatrix basis_;
  IndexList indices_;
  DenseMatrix projector_;
  DenseMatrix sampled_basis_;  // P^T W
  std::vector<std::size_t> owners_;
  std::vector<SampledElement> sampled_;
  Eigen::MatrixXd phi_;    // reference basis at volume points
  Eigen::VectorXd weights_;
  int local_size_ = 0;
};

/// ||(P^T W)^{-1}||_2, the amplification factor in the DEIM error bound.
double deim_error_bound(const DenseMatrix& w, const IndexList& indices);

/// Rows of `m` selected by `indices` (P^T m).
DenseMatrix select_rows(const DenseMatrix& m, const IndexList& indices);

}  // namespace fhnrom
