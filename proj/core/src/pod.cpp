#include "fhnrom/pod.hpp"

#include <cmath>

#include "fhnrom/error.hpp"

namespace fhnrom {

int numerical_rank(const Vector& singular_values, double relative_tolerance) {
  if (singular_values.size() == 0 || !(singular_values(0) > 0.0)) return 0;
  const double cutoff = relative_tolerance * singular_values(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > cutoff) ++rank;
  }
  return rank;
}

int select_mode_count(const Vector& singular_values, int rank, const ModeSelection& selection) {
  if (selection.modes) {
    const int k = *selection.modes;
    if (k < 1) throw Error("mode selection: explicit mode count must be >= 1");
    if (k > rank) {
      throw RankError("mode selection: requested " + std::to_string(k) + " modes but the snapshot set has rank " +
                          std::to_string(rank),
                      rank);
    }
    return k;
  }
  if (rank == 0) throw RankError("mode selection: snapshot set is numerically zero", 0);
  if (selection.energy >= 1.0) return rank;
  if (!(selection.energy > 0.0)) throw Error("mode selection: energy fraction must be in (0, 1]");
  const Vector energy = singular_values.array().square();
  const double total = energy.sum();
  double running = 0.0;
  for (int k = 1; k <= rank; ++k) {
    running += energy(k - 1);
    if (running >= selection.energy * total) return k;
  }
  return rank;
}

PodBasis compute_pod_basis(const DenseMatrix& snapshots, const BlockCholesky& factor,
                           const ModeSelection& selection, const SvdOptions& svd) {
  if (snapshots.cols() < 1) throw DimensionError("compute_pod_basis: no snapshots");
  if (static_cast<std::size_t>(snapshots.rows()) != factor.dim()) {
    throw DimensionError("compute_pod_basis: snapshot rows do not match the mass matrix");
  }
  DenseMatrix weighted = snapshots;
  factor.apply_in_place(weighted);
  SvdOptions options = svd;
  options.compute_right = false;
  SvdResult result = thin_svd(weighted, options);
  weighted.resize(0, 0);

  PodBasis basis;
  basis.singular_values = std::move(result.singular_values);
  basis.rank = numerical_rank(basis.singular_values, result.rank_tolerance);
  const int k = select_mode_count(basis.singular_values, basis.rank, selection);
  basis.modes = result.left.leftCols(k);
  factor.solve_in_place(basis.modes);
  return basis;
}

double m_orthonormality_defect(const DenseMatrix& psi, const BlockSparseMatrix& mass) {
  const DenseMatrix gram = psi.transpose() * mass.multiply_matrix(psi);
  return (gram - DenseMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

RomOperators reduce_operators(const DenseMatrix& psi_u, const DenseMatrix& psi_v, const BlockSparseMatrix& mass,
                              const BlockSparseMatrix& stiffness_u, const BlockSparseMatrix& stiffness_v,
                              const FhnParameters& params) {
  const auto n = static_cast<Eigen::Index>(mass.dim());
  if (psi_u.rows() != n || psi_v.rows() != n || stiffness_u.dim() != mass.dim() || stiffness_v.dim() != mass.dim()) {
    throw DimensionError("reduce_operators: basis rows do not match operator dimension");
  }
  if (psi_u.cols() != psi_v.cols()) throw DimensionError("reduce_operators: u and v bases differ in size");
  constexpr double tol = 1e-8;
  const DenseMatrix m_psi_u = mass.multiply_matrix(psi_u);
  const DenseMatrix m_psi_v = mass.multiply_matrix(psi_v);
  const auto k = psi_u.cols();
  const double defect_u = (psi_u.transpose() * m_psi_u - DenseMatrix::Identity(k, k)).cwiseAbs().maxCoeff();
  const double defect_v = (psi_v.transpose() * m_psi_v - DenseMatrix::Identity(k, k)).cwiseAbs().maxCoeff();
  if (defect_u > tol || defect_v > tol) {
    throw Error("reduce_operators: bases are not M-orthonormal (defect u " + std::to_string(defect_u) + ", v " +
                std::to_string(defect_v) + ")");
  }
  RomOperators ops;
  ops.stiffness_u = psi_u.transpose() * stiffness_u.multiply_matrix(psi_u);
  ops.stiffness_v = psi_v.transpose() * stiffness_v.multiply_matrix(psi_v);
  ops.mass_uv = psi_u.transpose() * m_psi_v;
  ops.mass_vu = psi_v.transpose() * m_psi_u;
  ops.alpha = params.alpha;
  ops.beta = params.beta;
  ops.mu = params.mu;
  return ops;
}

}  // namespace fhnrom
