#pragma once

#include <vector>

#include "fhnrom/block_sparse.hpp"
#include "fhnrom/dg_space.hpp"

namespace fhnrom {

/// Cholesky factor R of a block-diagonal SPD matrix, M = R^T R. R is block
/// diagonal with upper-triangular blocks; only diagonal blocks are touched.
class BlockCholesky {
 public:
  explicit BlockCholesky(const BlockSparseMatrix& m);

  std::size_t dim() const { return num_blocks_ * static_cast<std::size_t>(block_size_); }
  int block_size() const { return block_size_; }
  std::size_t num_factored_blocks() const { return num_blocks_; }

  /// R x
  Vector apply(const Vector& x) const;
  /// R X, column by column, in place.
  void apply_in_place(DenseMatrix& x) const;
  /// R^{-1} y
  Vector solve(const Vector& y) const;
  /// R^{-1} Y, in place.
  void solve_in_place(DenseMatrix& y) const;

  DenseMatrix to_dense() const;

 private:
  Eigen::Map<const Eigen::MatrixXd> block(std::size_t e) const;

  std::size_t num_blocks_ = 0;
  int block_size_ = 0;
  std::vector<double> factors_;
};

/// Throws SingularMatrixError if `m` is not block diagonal SPD.
BlockCholesky cholesky(const BlockSparseMatrix& m);

struct SvdResult {
  DenseMatrix left;
  Vector singular_values;  // nonincreasing
  DenseMatrix right;       // empty unless requested
  /// Relative threshold below which singular values are numerically zero;
  /// looser on the Gram route, which squares the conditioning.
  double rank_tolerance = 0.0;
};

struct SvdOptions {
  bool compute_right = true;
  /// Matrices whose smaller side exceeds this go through the Gram
  /// (method-of-snapshots) route instead of a direct SVD.
  Eigen::Index direct_limit = 2000;
};

/// Thin SVD A = U diag(s) V^T with min(rows, cols) singular triplets.
SvdResult thin_svd(const DenseMatrix& a, const SvdOptions& options = {});

/// Largest singular value.
double spectral_norm(const DenseMatrix& a);

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order. The
/// matrix is overwritten by its eigenvectors.
Vector symmetric_eigen_in_place(DenseMatrix& a);

/// Direct solve of a block-sparse system. Block-diagonal systems are solved
/// block by block, others by sparse LU. Throws SingularMatrixError.
Vector solve_sparse(const BlockSparseMatrix& a, const Vector& b);

/// Dense LU solve with a singularity check.
DenseMatrix solve_dense(const DenseMatrix& a, const DenseMatrix& b);
Vector solve_dense(const DenseMatrix& a, const Vector& b);

}  // namespace fhnrom
