#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace fhnrom::testing {

/// 6-point Gauss-Legendre on [-1, 1], hard-coded.
inline const std::array<double, 6> kGaussNodes = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                                                  0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
inline const std::array<double, 6> kGaussWeights = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                                                    0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

/// Integral of g over the triangle (a, b, c) with a 36-point collapsed
/// Gauss rule (exact for polynomials of degree <= 10).
inline double integrate_triangle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                                 const std::function<double(const Eigen::Vector2d&)>& g) {
  const double det = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  double sum = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      const double s = 0.5 * (kGaussNodes[i] + 1.0);
      const double t = 0.5 * (kGaussNodes[j] + 1.0);
      const double w = 0.25 * kGaussWeights[i] * kGaussWeights[j] * (1.0 - t);
      const Eigen::Vector2d xi(s * (1.0 - t), t);
      sum += w * g(a + xi.x() * (b - a) + xi.y() * (c - a));
    }
  }
  return det * sum;
}

/// Integral of g along the segment [a, b].
inline double integrate_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                const std::function<double(const Eigen::Vector2d&)>& g) {
  double sum = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    const double s = 0.5 * (kGaussNodes[i] + 1.0);
    sum += 0.5 * kGaussWeights[i] * g(a + s * (b - a));
  }
  return (b - a).norm() * sum;
}

/// Largest singular value by power iteration on A^T A.
inline double power_iteration_norm(const Eigen::MatrixXd& a, int iterations = 2000) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(a.cols());
  double lambda = 0.0;
  for (int i = 0; i < iterations; ++i) {
    const Eigen::VectorXd y = a.transpose() * (a * x);
    lambda = y.norm() / x.norm();
    x = y / y.norm();
  }
  return std::sqrt(lambda);
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
inline Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a) {
  const auto n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * (a.squaredNorm() + 1e-300)) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Eigen::VectorXd d = a.diagonal();
  std::sort(d.data(), d.data() + d.size(), std::greater<>());
  return d;
}

}  // namespace fhnrom::testing
