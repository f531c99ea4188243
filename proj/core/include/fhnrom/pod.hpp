#pragma once

#include <optional>

#include "fhnrom/block_sparse.hpp"
#include "fhnrom/dg_space.hpp"
#include "fhnrom/fom.hpp"
#include "fhnrom/numerics.hpp"

namespace fhnrom {

/// Either an explicit mode count, or the smallest count whose retained
/// energy sum_{i<=k} s_i^2 / sum s_i^2 reaches `energy`.
struct ModeSelection {
  std::optional<int> modes;
  double energy = 0.9999;
};

/// M-orthonormal POD basis of one field.
struct PodBasis {
  DenseMatrix modes;       // N x k coefficient vectors
  Vector singular_values;  // full spectrum, nonincreasing
  int rank = 0;            // numerical rank of the snapshot set

  int size() const { return static_cast<int>(modes.cols()); }
};

struct ReducedBasis {
  PodBasis u;
  PodBasis v;
};

/// Number of singular values above `relative_tolerance * s_1`.
int numerical_rank(const Vector& singular_values, double relative_tolerance);

/// Mode count for a spectrum. Throws RankError when an explicit count
/// exceeds the numerical rank. Energy >= 1 selects the full rank.
int select_mode_count(const Vector& singular_values, int rank, const ModeSelection& selection);

/// Weighted POD: SVD of R U where M = R^T R, left vectors mapped back by
/// R^{-1}. Snapshots are used raw (no centering).
PodBasis compute_pod_basis(const DenseMatrix& snapshots, const BlockCholesky& factor,
                           const ModeSelection& selection, const SvdOptions& svd = {});

/// max |Psi^T M Psi - I|
double m_orthonormality_defect(const DenseMatrix& psi, const BlockSparseMatrix& mass);

/// Galerkin-projected k x k operators of the reduced system
///   u~_t + S~_u u~ + alpha M~_u v~ - alpha u~ + N(u~) = 0
///   v~_t + S~_v v~ + beta v~ - beta M~_v u~ = 0.
struct RomOperators {
  DenseMatrix stiffness_u;  // Psi_u^T S_u Psi_u
  DenseMatrix stiffness_v;  // Psi_v^T S_v Psi_v
  DenseMatrix mass_uv;      // Psi_u^T M Psi_v
  DenseMatrix mass_vu;      // Psi_v^T M Psi_u
  double alpha = 0.0;
  double beta = 0.0;
  double mu = 0.0;

  int size() const { return static_cast<int>(stiffness_u.rows()); }
};

/// Throws DimensionError on shape mismatch and Error when either basis is
/// not M-orthonormal to 1e-8 (the reduced alpha/beta terms rely on it).
RomOperators reduce_operators(const DenseMatrix& psi_u, const DenseMatrix& psi_v, const BlockSparseMatrix& mass,
                              const BlockSparseMatrix& stiffness_u, const BlockSparseMatrix& stiffness_v,
                              const FhnParameters& params);

}  // namespace fhnrom
