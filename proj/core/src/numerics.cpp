#include "fhnrom/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "fhnrom/error.hpp"

namespace fhnrom {

BlockCholesky::BlockCholesky(const BlockSparseMatrix& m)
    : num_blocks_(m.num_block_rows()), block_size_(m.block_size()) {
  if (!m.is_block_diagonal()) {
    throw SingularMatrixError("cholesky: only block-diagonal mass matrices are supported");
  }
  const auto b = static_cast<std::size_t>(block_size_);
  factors_.resize(num_blocks_ * b * b);
  for (std::size_t e = 0; e < num_blocks_; ++e) {
    Eigen::LLT<Eigen::MatrixXd> llt(m.diagonal_block(e));
    if (llt.info() != Eigen::Success) {
      throw SingularMatrixError("cholesky: block " + std::to_string(e) + " is not positive definite");
    }
    Eigen::Map<Eigen::MatrixXd> out(factors_.data() + e * b * b, block_size_, block_size_);
    out = llt.matrixU();
  }
}

Eigen::Map<const Eigen::MatrixXd> BlockCholesky::block(std::size_t e) const {
  const auto b = static_cast<std::size_t>(block_size_);
  return Eigen::Map<const Eigen::MatrixXd>(factors_.data() + e * b * b, block_size_, block_size_);
}

Vector BlockCholesky::apply(const Vector& x) const {
  DenseMatrix m = x;
  apply_in_place(m);
  return m.col(0);
}

void BlockCholesky::apply_in_place(DenseMatrix& x) const {
  if (static_cast<std::size_t>(x.rows()) != dim()) throw DimensionError("BlockCholesky::apply: row mismatch");
  const auto b = static_cast<Eigen::Index>(block_size_);
  for (std::size_t e = 0; e < num_blocks_; ++e) {
    auto rows = x.middleRows(static_cast<Eigen::Index>(e) * b, b);
    rows = block(e).triangularView<Eigen::Upper>() * rows;
  }
}

Vector BlockCholesky::solve(const Vector& y) const {
  DenseMatrix m = y;
  solve_in_place(m);
  return m.col(0);
}

void BlockCholesky::solve_in_place(DenseMatrix& y) const {
  if (static_cast<std::size_t>(y.rows()) != dim()) throw DimensionError("BlockCholesky::solve: row mismatch");
  const auto b = static_cast<Eigen::Index>(block_size_);
  for (std::size_t e = 0; e < num_blocks_; ++e) {
    auto rows = y.middleRows(static_cast<Eigen::Index>(e) * b, b);
    block(e).triangularView<Eigen::Upper>().solveInPlace(rows);
  }
}

DenseMatrix BlockCholesky::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dim());
  DenseMatrix r = DenseMatrix::Zero(n, n);
  const auto b = static_cast<Eigen::Index>(block_size_);
  for (std::size_t e = 0; e < num_blocks_; ++e) {
    const auto o = static_cast<Eigen::Index>(e) * b;
    r.block(o, o, b, b) = block(e).triangularView<Eigen::Upper>();
  }
  return r;
}

BlockCholesky cholesky(const BlockSparseMatrix& m) { return BlockCholesky(m); }

Vector symmetric_eigen_in_place(DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("symmetric_eigen: matrix must be square");
  const Eigen::Index n = a.rows();
  if (n == 0) return Vector(0);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(a.selfadjointView<Eigen::Lower>());
  if (solver.info() != Eigen::Success) throw Error("symmetric_eigen: QR iteration did not converge");
  // Ascending from the solver; flip to descending.
  Vector w = solver.eigenvalues().reverse();
  a = solver.eigenvectors().rowwise().reverse();
  return w;
}

namespace {

// Symmetric product A^T A (transpose_first) or A A^T, lower triangle
// computed and mirrored.
DenseMatrix gram(const DenseMatrix& a, bool transpose_first) {
  const auto n = transpose_first ? a.cols() : a.rows();
  DenseMatrix g = DenseMatrix::Zero(n, n);
  if (transpose_first) {
    g.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  } else {
    g.selfadjointView<Eigen::Lower>().rankUpdate(a);
  }
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

// Columns of `partner` scaled by 1/sigma; columns with negligible sigma are
// left at zero.
void normalize_partner(DenseMatrix& partner, const Vector& sigma) {
  const double cutoff = sigma.size() > 0 ? sigma(0) * 1e-14 : 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) {
      partner.col(i) /= sigma(i);
    } else {
      partner.col(i).setZero();
    }
  }
}

}  // namespace

SvdResult thin_svd(const DenseMatrix& a, const SvdOptions& options) {
  if (!a.allFinite()) throw Error("thin_svd: matrix has non-finite entries");
  SvdResult out;
  const Eigen::Index small = std::min(a.rows(), a.cols());
  if (small == 0) {
    out.left.resize(a.rows(), 0);
    out.right.resize(options.compute_right ? a.cols() : 0, 0);
    return out;
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const auto big = static_cast<double>(std::max(a.rows(), a.cols()));
  if (small <= options.direct_limit) {
    out.rank_tolerance = big * eps;
    const unsigned flags = options.compute_right ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : Eigen::ComputeThinU;
    Eigen::BDCSVD<DenseMatrix> svd(a, flags);
    out.left = svd.matrixU();
    out.singular_values = svd.singularValues();
    if (options.compute_right) out.right = svd.matrixV();
    return out;
  }

  out.rank_tolerance = std::sqrt(big * eps);
  const bool tall = a.rows() >= a.cols();
  DenseMatrix g = gram(a, tall);
  Vector lambda = symmetric_eigen_in_place(g);
  out.singular_values = lambda.cwiseMax(0.0).cwiseSqrt();
  if (tall) {
    // g holds V; U = A V / sigma.
    out.left = a * g;
    normalize_partner(out.left, out.singular_values);
    if (options.compute_right) out.right = std::move(g);
  } else {
    out.left = std::move(g);
    if (options.compute_right) {
      out.right = a.transpose() * out.left;
      normalize_partner(out.right, out.singular_values);
    }
  }
  return out;
}

double spectral_norm(const DenseMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (!a.allFinite()) throw Error("spectral_norm: matrix has non-finite entries");
  Eigen::BDCSVD<DenseMatrix> svd(a);
  return svd.singularValues()(0);
}

Vector solve_sparse(const BlockSparseMatrix& a, const Vector& b) {
  if (static_cast<std::size_t>(b.size()) != a.dim()) throw DimensionError("solve_sparse: rhs length mismatch");
  if (a.is_block_diagonal()) {
    const auto bs = static_cast<Eigen::Index>(a.block_size());
    Vector x(b.size());
    for (std::size_t e = 0; e < a.num_block_rows(); ++e) {
      if (!a.has_block(e, e)) throw SingularMatrixError("solve_sparse: missing diagonal block");
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a.diagonal_block(e));
      if (!lu.isInvertible()) {
        throw SingularMatrixError("solve_sparse: diagonal block " + std::to_string(e) + " is singular");
      }
      const auto o = static_cast<Eigen::Index>(e) * bs;
      x.segment(o, bs) = lu.solve(b.segment(o, bs));
    }
    return x;
  }
  SparseMatrix s = a.to_sparse();
  s.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(s);
  if (lu.info() != Eigen::Success) throw SingularMatrixError("solve_sparse: sparse LU failed: " + lu.lastErrorMessage());
  Vector x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SingularMatrixError("solve_sparse: solve failed");
  return x;
}

DenseMatrix solve_dense(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) throw DimensionError("solve_dense: dimension mismatch");
  Eigen::FullPivLU<DenseMatrix> lu(a);
  if (!lu.isInvertible()) throw SingularMatrixError("solve_dense: matrix is singular");
  return lu.solve(b);
}

Vector solve_dense(const DenseMatrix& a, const Vector& b) {
  return solve_dense(a, DenseMatrix(b)).col(0);
}

}  // namespace fhnrom
