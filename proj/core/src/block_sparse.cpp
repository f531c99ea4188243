#include "fhnrom/block_sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "fhnrom/error.hpp"

namespace fhnrom {

namespace {
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
}

std::size_t BlockSparseMatrix::find(std::size_t row, std::size_t col) const {
  if (row >= num_block_rows_) return npos;
  const auto begin = block_cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  const auto end = block_cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return npos;
  return static_cast<std::size_t>(it - block_cols_.begin());
}

bool BlockSparseMatrix::has_block(std::size_t row, std::size_t col) const {
  return find(row, col) != npos;
}

BlockSparseMatrix::Block BlockSparseMatrix::block(std::size_t row, std::size_t col) const {
  const std::size_t k = find(row, col);
  if (k == npos) throw DimensionError("BlockSparseMatrix: block not stored");
  const auto b = static_cast<std::size_t>(block_size_);
  return Block(values_.data() + k * b * b, block_size_, block_size_);
}

std::vector<std::size_t> BlockSparseMatrix::block_columns(std::size_t row) const {
  return {block_cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]),
          block_cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1])};
}

bool BlockSparseMatrix::is_block_diagonal() const {
  for (std::size_t r = 0; r < num_block_rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (block_cols_[k] != r) return false;
    }
  }
  return true;
}

void BlockSparseMatrix::multiply_add(const Eigen::VectorXd& x, double scale, Eigen::VectorXd& y) const {
  if (static_cast<std::size_t>(x.size()) != dim() || static_cast<std::size_t>(y.size()) != dim()) {
    throw DimensionError("BlockSparseMatrix::multiply: vector length mismatch");
  }
  const auto b = static_cast<Eigen::Index>(block_size_);
  for (std::size_t r = 0; r < num_block_rows_; ++r) {
    auto yr = y.segment(static_cast<Eigen::Index>(r) * b, b);
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      Block blk(values_.data() + k * static_cast<std::size_t>(b * b), b, b);
      yr.noalias() += scale * (blk * x.segment(static_cast<Eigen::Index>(block_cols_[k]) * b, b));
    }
  }
}

Eigen::VectorXd BlockSparseMatrix::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
  multiply_add(x, 1.0, y);
  return y;
}

Eigen::MatrixXd BlockSparseMatrix::multiply_matrix(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.rows()) != dim()) {
    throw DimensionError("BlockSparseMatrix::multiply_matrix: row mismatch");
  }
  const auto b = static_cast<Eigen::Index>(block_size_);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  for (std::size_t r = 0; r < num_block_rows_; ++r) {
    auto yr = y.middleRows(static_cast<Eigen::Index>(r) * b, b);
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      Block blk(values_.data() + k * static_cast<std::size_t>(b * b), b, b);
      yr.noalias() += blk * x.middleRows(static_cast<Eigen::Index>(block_cols_[k]) * b, b);
    }
  }
  return y;
}

SparseMatrix BlockSparseMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(values_.size());
  const auto b = static_cast<std::size_t>(block_size_);
  for (std::size_t r = 0; r < num_block_rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const double* v = values_.data() + k * b * b;
      for (std::size_t j = 0; j < b; ++j) {
        for (std::size_t i = 0; i < b; ++i) {
          triplets.emplace_back(static_cast<int>(r * b + i), static_cast<int>(block_cols_[k] * b + j), v[j * b + i]);
        }
      }
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Eigen::MatrixXd BlockSparseMatrix::to_dense() const { return Eigen::MatrixXd(to_sparse()); }

double BlockSparseMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (std::size_t r = 0; r < num_block_rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t c = block_cols_[k];
      const Block a = block(r, c);
      if (!has_block(c, r)) {
        worst = std::max(worst, a.cwiseAbs().maxCoeff());
        continue;
      }
      const Block at = block(c, r);
      worst = std::max(worst, (a - at.transpose()).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

void BlockSparseMatrix::write_coordinate(std::ostream& out) const {
  const auto b = static_cast<std::size_t>(block_size_);
  out << std::setprecision(17);
  for (std::size_t r = 0; r < num_block_rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const double* v = values_.data() + k * b * b;
      for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
          out << r * b + i << ' ' << block_cols_[k] * b + j << ' ' << v[j * b + i] << '\n';
        }
      }
    }
  }
}

BlockSparseBuilder::BlockSparseBuilder(std::size_t num_block_rows, int block_size)
    : num_block_rows_(num_block_rows), block_size_(block_size) {
  if (block_size <= 0) throw DimensionError("BlockSparseBuilder: block size must be positive");
}

void BlockSparseBuilder::add(std::size_t row, std::size_t col, const Eigen::MatrixXd& values) {
  if (row >= num_block_rows_ || col >= num_block_rows_) {
    throw DimensionError("BlockSparseBuilder: block index out of range");
  }
  if (values.rows() != block_size_ || values.cols() != block_size_) {
    throw DimensionError("BlockSparseBuilder: block has wrong shape");
  }
  auto [it, inserted] = blocks_.try_emplace({row, col}, values);
  if (!inserted) it->second += values;
}

BlockSparseMatrix BlockSparseBuilder::build() && {
  BlockSparseMatrix m;
  m.num_block_rows_ = num_block_rows_;
  m.block_size_ = block_size_;
  m.row_ptr_.assign(num_block_rows_ + 1, 0);
  const auto bb = static_cast<std::size_t>(block_size_ * block_size_);
  m.block_cols_.reserve(blocks_.size());
  m.values_.reserve(blocks_.size() * bb);
  for (const auto& [key, blk] : blocks_) {
    ++m.row_ptr_[key.first + 1];
    m.block_cols_.push_back(key.second);
    m.values_.insert(m.values_.end(), blk.data(), blk.data() + bb);
  }
  for (std::size_t r = 0; r < num_block_rows_; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  blocks_.clear();
  return m;
}

}  // namespace fhnrom
