#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "fhnrom/mesh.hpp"
#include "fhnrom/quadrature.hpp"

namespace fhnrom {

using Vector = Eigen::VectorXd;
/// Dense matrices are column-major (Eigen default); snapshot columns are
/// contiguous.
using DenseMatrix = Eigen::MatrixXd;

/// L2-orthonormal modal basis of P_q on the reference triangle, built by
/// Gram-Schmidt on monomials ordered by total degree. The first function is
/// the constant sqrt(2).
class ModalBasis {
 public:
  explicit ModalBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return size_; }

  Eigen::VectorXd values(const Eigen::Vector2d& xi) const;
  /// size() x 2 matrix of reference gradients.
  Eigen::MatrixXd gradients(const Eigen::Vector2d& xi) const;
  /// Average of each basis function over the reference triangle.
  const Eigen::VectorXd& reference_means() const { return means_; }
  /// Equispaced lattice points used for nodal initial data (vertices at q=1).
  const std::vector<Eigen::Vector2d>& nodes() const { return nodes_; }

 private:
  int degree_;
  int size_;
  std::vector<std::pair<int, int>> exponents_;
  Eigen::MatrixXd coefficients_;  // phi_i = sum_j C(i,j) x^a_j y^b_j
  Eigen::VectorXd means_;
  std::vector<Eigen::Vector2d> nodes_;
};

/// Discontinuous piecewise-polynomial space over a mesh. Degree of freedom
/// `local` of element `e` has global index e * local_size() + local.
class DGSpace {
 public:
  DGSpace(Mesh mesh, int degree);

  const Mesh& mesh() const { return mesh_; }
  const ModalBasis& basis() const { return basis_; }
  int degree() const { return basis_.degree(); }
  int local_size() const { return basis_.size(); }
  std::size_t num_elements() const { return mesh_.num_elements(); }
  std::size_t num_dofs() const { return num_elements() * static_cast<std::size_t>(local_size()); }
  std::size_t dof(std::size_t element, int local) const {
    return element * static_cast<std::size_t>(local_size()) + static_cast<std::size_t>(local);
  }

  /// Volume rule exact for the cubic nonlinearity times a test function.
  const TriangleRule& volume_rule() const { return volume_rule_; }
  /// Basis values at the volume points, (points x local_size).
  const Eigen::MatrixXd& volume_values() const { return volume_values_; }
  /// Reference gradients at volume point q, (local_size x 2).
  const Eigen::MatrixXd& volume_ref_gradients(std::size_t q) const { return volume_gradients_[q]; }
  const LineRule& face_rule() const { return face_rule_; }

  double evaluate(const Vector& coefficients, std::size_t element, const Eigen::Vector2d& xi) const;
  double cell_average(const Vector& coefficients, std::size_t element) const;
  std::vector<double> cell_averages(const Vector& coefficients) const;

 private:
  Mesh mesh_;
  ModalBasis basis_;
  TriangleRule volume_rule_;
  Eigen::MatrixXd volume_values_;
  std::vector<Eigen::MatrixXd> volume_gradients_;
  LineRule face_rule_;
};

}  // namespace fhnrom
