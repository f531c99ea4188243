#pragma once

#include <vector>

#include <Eigen/Core>

namespace fhnrom {

/// Quadrature on the reference triangle (0,0), (1,0), (0,1). Weights sum to
/// the reference area 1/2.
struct TriangleRule {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Quadrature on [0, 1]. Weights sum to 1.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre with n points mapped to [0, 1]; exact to degree 2n-1.
LineRule gauss_legendre(int n);

/// Symmetric 7-point rule, exact to degree 5.
TriangleRule triangle_rule_degree5();

/// Collapsed (Duffy) tensor Gauss rule with n*n points, exact to degree 2n-2.
TriangleRule collapsed_gauss_rule(int n);

/// Cheapest available rule exact to at least `degree`.
TriangleRule triangle_rule(int degree);

}  // namespace fhnrom
