#include "fhnrom/deim.hpp"

#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "fhnrom/assembly.hpp"
#include "fhnrom/error.hpp"
#include "fhnrom/numerics.hpp"

namespace fhnrom {

DenseMatrix select_rows(const DenseMatrix& m, const IndexList& indices) {
  DenseMatrix out(static_cast<Eigen::Index>(indices.size()), m.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(indices[i]);
  return out;
}

IndexList deim_select(const DenseMatrix& w) {
  const Eigen::Index n = w.cols();
  if (n == 0) return {};
  if (n > w.rows()) throw RankError("deim_select: more columns than rows", w.rows());
  IndexList p;
  p.reserve(static_cast<std::size_t>(n));
  Eigen::Index first = 0;
  if (!(w.col(0).cwiseAbs().maxCoeff(&first) > 0.0)) {
    throw RankError("deim_select: column 0 is zero", 0);
  }
  p.push_back(first);
  for (Eigen::Index l = 1; l < n; ++l) {
    const DenseMatrix pw = select_rows(w.leftCols(l), p);
    Vector rhs(l);
    for (Eigen::Index i = 0; i < l; ++i) rhs(i) = w(p[static_cast<std::size_t>(i)], l);
    const Eigen::PartialPivLU<DenseMatrix> lu(pw);
    const Vector c = lu.solve(rhs);
    const Vector r = w.col(l) - w.leftCols(l) * c;
    Eigen::Index next = 0;
    const double peak = r.cwiseAbs().maxCoeff(&next);
    const double scale = w.col(l).cwiseAbs().maxCoeff();
    if (!(peak > 1e-12 * scale) || !std::isfinite(peak)) {
      throw RankError("deim_select: residual vanished at column " + std::to_string(l) +
                          " (columns are linearly dependent)",
                      l);
    }
    p.push_back(next);
  }
  return p;
}

DeimOperator DeimOperator::build(const DenseMatrix& psi_u, const DenseMatrix& w, IndexList indices,
                                 const DGSpace& space) {
  const auto n_dofs = static_cast<Eigen::Index>(space.num_dofs());
  if (psi_u.rows() != n_dofs || w.rows() != n_dofs) throw DimensionError("DeimOperator: row count mismatch");
  if (static_cast<Eigen::Index>(indices.size()) != w.cols()) {
    throw DimensionError("DeimOperator: need one index per DEIM basis column");
  }
  for (const auto idx : indices) {
    if (idx < 0 || idx >= n_dofs) throw DimensionError("DeimOperator: interpolation index out of range");
  }

  DeimOperator op;
  op.basis_ = w;
  op.indices_ = std::move(indices);
  op.local_size_ = space.local_size();
  op.sampled_basis_ = select_rows(w, op.indices_);
  Eigen::FullPivLU<DenseMatrix> lu(op.sampled_basis_);
  if (!lu.isInvertible()) throw SingularMatrixError("DeimOperator: P^T W is singular");
  // Q = (Psi^T W) (P^T W)^{-1}  <=>  (P^T W)^T Q^T = (Psi^T W)^T
  const DenseMatrix psi_w = psi_u.transpose() * w;
  op.projector_ = op.sampled_basis_.transpose().fullPivLu().solve(psi_w.transpose()).transpose();

  const auto nloc = static_cast<std::size_t>(space.local_size());
  std::map<std::size_t, std::size_t> slot_of_element;
  op.owners_.reserve(op.indices_.size());
  for (std::size_t s = 0; s < op.indices_.size(); ++s) {
    const auto dof = static_cast<std::size_t>(op.indices_[s]);
    const std::size_t element = dof / nloc;
    op.owners_.push_back(element);
    auto [it, inserted] = slot_of_element.try_emplace(element, op.sampled_.size());
    if (inserted) {
      SampledElement se;
      se.element = element;
      se.det = std::abs(space.mesh().affine_maps()[element].det);
      se.psi_rows = psi_u.middleRows(static_cast<Eigen::Index>(space.dof(element, 0)), space.local_size());
      op.sampled_.push_back(std::move(se));
    }
    SampledElement& se = op.sampled_[it->second];
    se.local_rows.push_back(static_cast<int>(dof % nloc));
    se.slots.push_back(static_cast<int>(s));
  }
  op.phi_ = space.volume_values();
  op.weights_ = Eigen::Map<const Eigen::VectorXd>(space.volume_rule().weights.data(),
                                                  static_cast<Eigen::Index>(space.volume_rule().size()));
  return op;
}

Vector DeimOperator::evaluate(const Vector& reduced_u, double mu, OpCounter* counter) const {
  const auto k = static_cast<Eigen::Index>(num_modes());
  if (reduced_u.size() != k) throw DimensionError("DeimOperator::evaluate: reduced state has wrong length");
  const auto nq = phi_.rows();
  const auto nloc = static_cast<Eigen::Index>(local_size_);
  std::uint64_t flops = 0;

  Vector sampled(static_cast<Eigen::Index>(indices_.size()));
  Eigen::VectorXd coeffs(nloc);
  Eigen::VectorXd values(nq);
  for (const SampledElement& se : sampled_) {
    coeffs.noalias() = se.psi_rows * reduced_u;
    values.noalias() = phi_ * coeffs;
    for (Eigen::Index q = 0; q < nq; ++q) values(q) = se.det * weights_(q) * bistable(values(q), mu);
    flops += static_cast<std::uint64_t>(2 * nloc * k + 2 * nq * nloc + 7 * nq);
    for (std::size_t r = 0; r < se.local_rows.size(); ++r) {
      sampled(se.slots[r]) = phi_.col(se.local_rows[r]).dot(values);
      flops += static_cast<std::uint64_t>(2 * nq);
    }
  }
  Vector out = projector_ * sampled;
  flops += static_cast<std::uint64_t>(2 * k * sampled.size());
  if (counter) counter->flops += flops;
  return out;
}

DenseMatrix DeimOperator::jacobian(const Vector& reduced_u, double mu, OpCounter* counter) const {
  const auto k = static_cast<Eigen::Index>(num_modes());
  if (reduced_u.size() != k) throw DimensionError("DeimOperator::jacobian: reduced state has wrong length");
  const auto nq = phi_.rows();
  const auto nloc = static_cast<Eigen::Index>(local_size_);
  std::uint64_t flops = 0;
  std::uint64_t entries = 0;

  // Row s of P^T J_F Psi_u; each sampled row of J_F has N_loc nonzeros.
  DenseMatrix sampled(static_cast<Eigen::Index>(indices_.size()), k);
  Eigen::VectorXd coeffs(nloc);
  Eigen::VectorXd values(nq);
  Eigen::RowVectorXd jacobian_row(nloc);
  for (const SampledElement& se : sampled_) {
    coeffs.noalias() = se.psi_rows * reduced_u;
    values.noalias() = phi_ * coeffs;
    for (Eigen::Index q = 0; q < nq; ++q) values(q) = se.det * weights_(q) * bistable_derivative(values(q), mu);
    flops += static_cast<std::uint64_t>(2 * nloc * k + 2 * nq * nloc + 7 * nq);
    for (std::size_t r = 0; r < se.local_rows.size(); ++r) {
      jacobian_row.noalias() = (phi_.col(se.local_rows[r]).cwiseProduct(values)).transpose() * phi_;
      entries += static_cast<std::uint64_t>(nloc);
      sampled.row(se.slots[r]).noalias() = jacobian_row * se.psi_rows;
      flops += static_cast<std::uint64_t>(nq + 2 * nq * nloc + 2 * nloc * k);
    }
  }
  const auto expected = static_cast<std::uint64_t>(indices_.size()) * static_cast<std::uint64_t>(nloc);
  if (entries != expected) throw Error("DeimOperator::jacobian: touched entry count differs from n * N_loc");
  DenseMatrix out = projector_ * sampled;
  flops += static_cast<std::uint64_t>(2 * k * k * sampled.rows());
  if (counter) {
    counter->flops += flops;
    counter->jacobian_entries += entries;
  }
  return out;
}

Vector DeimOperator::interpolate(const Vector& f) const {
  if (f.size() != basis_.rows()) throw DimensionError("DeimOperator::interpolate: vector length mismatch");
  Vector sampled(static_cast<Eigen::Index>(indices_.size()));
  for (std::size_t i = 0; i < indices_.size(); ++i) sampled(static_cast<Eigen::Index>(i)) = f(indices_[i]);
  return basis_ * sampled_basis_.fullPivLu().solve(sampled);
}

double deim_error_bound(const DenseMatrix& w, const IndexList& indices) {
  if (static_cast<Eigen::Index>(indices.size()) != w.cols()) {
    throw DimensionError("deim_error_bound: need one index per column");
  }
  const DenseMatrix pw = select_rows(w, indices);
  Eigen::FullPivLU<DenseMatrix> lu(pw);
  if (!lu.isInvertible()) throw SingularMatrixError("deim_error_bound: P^T W is singular");
  return spectral_norm(lu.inverse());
}

}  // namespace fhnrom
