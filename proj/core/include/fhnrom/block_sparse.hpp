#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace fhnrom {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Square matrix made of dense `block_size` x `block_size` blocks indexed by
/// (element_row, element_col). Stored as block CSR; blocks are column-major.
class BlockSparseMatrix {
 public:
  using Block = Eigen::Map<const Eigen::MatrixXd>;
  using MutableBlock = Eigen::Map<Eigen::MatrixXd>;

  BlockSparseMatrix() = default;

  std::size_t num_block_rows() const { return num_block_rows_; }
  int block_size() const { return block_size_; }
  std::size_t dim() const { return num_block_rows_ * static_cast<std::size_t>(block_size_); }
  std::size_t num_blocks() const { return block_cols_.size(); }
  std::size_t num_stored_entries() const { return values_.size(); }

  /// True if block (row, col) is stored.
  bool has_block(std::size_t row, std::size_t col) const;
  Block block(std::size_t row, std::size_t col) const;
  Block diagonal_block(std::size_t row) const { return block(row, row); }

  /// Column indices of stored blocks in block row `row`, ascending.
  std::vector<std::size_t> block_columns(std::size_t row) const;

  bool is_block_diagonal() const;

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  void multiply_add(const Eigen::VectorXd& x, double scale, Eigen::VectorXd& y) const;
  /// A X for a dense block of columns.
  Eigen::MatrixXd multiply_matrix(const Eigen::MatrixXd& x) const;

  SparseMatrix to_sparse() const;
  Eigen::MatrixXd to_dense() const;

  /// Max |A(i,j) - A(j,i)| over all entries.
  double max_asymmetry() const;

  /// Debug dump, one "row col value" line per stored entry (0-based).
  void write_coordinate(std::ostream& out) const;

 private:
  friend class BlockSparseBuilder;

  std::size_t find(std::size_t row, std::size_t col) const;

  std::size_t num_block_rows_ = 0;
  int block_size_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> block_cols_;
  std::vector<double> values_;
};

/// Accumulates blocks, then freezes them into a BlockSparseMatrix.
class BlockSparseBuilder {
 public:
  BlockSparseBuilder(std::size_t num_block_rows, int block_size);

  /// Adds `values` into block (row, col), creating it if needed.
  void add(std::size_t row, std::size_t col, const Eigen::MatrixXd& values);
  BlockSparseMatrix build() &&;

 private:
  std::size_t num_block_rows_;
  int block_size_;
  std::map<std::pair<std::size_t, std::size_t>, Eigen::MatrixXd> blocks_;
};

}  // namespace fhnrom
