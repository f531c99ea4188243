#include "fhnrom/dg_space.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "fhnrom/error.hpp"

namespace fhnrom {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Integral of x^a y^b over the reference triangle.
double monomial_integral(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

}  // namespace

ModalBasis::ModalBasis(int degree) : degree_(degree), size_((degree + 1) * (degree + 2) / 2) {
  if (degree < 0 || degree > 2) throw Error("ModalBasis: supported degrees are 0, 1, 2");
  for (int total = 0; total <= degree; ++total) {
    for (int b = 0; b <= total; ++b) exponents_.emplace_back(total - b, b);
  }
  Eigen::MatrixXd gram(size_, size_);
  for (int i = 0; i < size_; ++i) {
    for (int j = 0; j < size_; ++j) {
      const auto [ai, bi] = exponents_[static_cast<std::size_t>(i)];
      const auto [aj, bj] = exponents_[static_cast<std::size_t>(j)];
      gram(i, j) = monomial_integral(ai + aj, bi + bj);
    }
  }
  // gram = L L^T  =>  phi = L^{-1} m is orthonormal.
  const Eigen::MatrixXd lower = gram.llt().matrixL();
  coefficients_ = lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(size_, size_));

  means_.resize(size_);
  for (int i = 0; i < size_; ++i) {
    double integral = 0.0;
    for (int j = 0; j < size_; ++j) {
      const auto [a, b] = exponents_[static_cast<std::size_t>(j)];
      integral += coefficients_(i, j) * monomial_integral(a, b);
    }
    means_(i) = integral / 0.5;
  }

  if (degree == 0) {
    nodes_.emplace_back(1.0 / 3.0, 1.0 / 3.0);
  } else {
    for (int j = 0; j <= degree; ++j) {
      for (int i = 0; i + j <= degree; ++i) {
        nodes_.emplace_back(static_cast<double>(i) / degree, static_cast<double>(j) / degree);
      }
    }
  }
}

Eigen::VectorXd ModalBasis::values(const Eigen::Vector2d& xi) const {
  Eigen::VectorXd m(size_);
  for (int j = 0; j < size_; ++j) {
    const auto [a, b] = exponents_[static_cast<std::size_t>(j)];
    m(j) = std::pow(xi.x(), a) * std::pow(xi.y(), b);
  }
  return coefficients_ * m;
}

Eigen::MatrixXd ModalBasis::gradients(const Eigen::Vector2d& xi) const {
  Eigen::MatrixXd dm(size_, 2);
  for (int j = 0; j < size_; ++j) {
    const auto [a, b] = exponents_[static_cast<std::size_t>(j)];
    dm(j, 0) = a == 0 ? 0.0 : a * std::pow(xi.x(), a - 1) * std::pow(xi.y(), b);
    dm(j, 1) = b == 0 ? 0.0 : b * std::pow(xi.x(), a) * std::pow(xi.y(), b - 1);
  }
  return coefficients_ * dm;
}

DGSpace::DGSpace(Mesh mesh, int degree)
    : mesh_(std::move(mesh)),
      basis_(degree),
      volume_rule_(triangle_rule(4 * degree)),
      face_rule_(gauss_legendre(3)) {
  const auto nq = static_cast<Eigen::Index>(volume_rule_.size());
  volume_values_.resize(nq, basis_.size());
  volume_gradients_.reserve(volume_rule_.size());
  for (Eigen::Index q = 0; q < nq; ++q) {
    const auto& xi = volume_rule_.points[static_cast<std::size_t>(q)];
    volume_values_.row(q) = basis_.values(xi).transpose();
    volume_gradients_.push_back(basis_.gradients(xi));
  }
}

double DGSpace::evaluate(const Vector& coefficients, std::size_t element, const Eigen::Vector2d& xi) const {
  const Eigen::VectorXd phi = basis_.values(xi);
  return coefficients.segment(static_cast<Eigen::Index>(dof(element, 0)), local_size()).dot(phi);
}

double DGSpace::cell_average(const Vector& coefficients, std::size_t element) const {
  return coefficients.segment(static_cast<Eigen::Index>(dof(element, 0)), local_size())
      .dot(basis_.reference_means());
}

std::vector<double> DGSpace::cell_averages(const Vector& coefficients) const {
  if (static_cast<std::size_t>(coefficients.size()) != num_dofs()) {
    throw DimensionError("cell_averages: coefficient vector has wrong length");
  }
  std::vector<double> out(num_elements());
  for (std::size_t e = 0; e < num_elements(); ++e) out[e] = cell_average(coefficients, e);
  return out;
}

}  // namespace fhnrom
