#include "fhnrom/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "fhnrom/error.hpp"

namespace fhnrom {

LineRule gauss_legendre(int n) {
  if (n < 1) throw Error("gauss_legendre: need at least one point");
  LineRule rule;
  rule.degree = 2 * n - 1;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  // Newton on P_n from the Chebyshev-like initial guess, on [-1, 1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto idx = static_cast<std::size_t>(n - 1 - i);
    rule.points[idx] = 0.5 * (x + 1.0);
    rule.weights[idx] = 0.5 * w;
  }
  return rule;
}

TriangleRule triangle_rule_degree5() {
  const double s15 = std::sqrt(15.0);
  const double a = (6.0 - s15) / 21.0;
  const double b = (6.0 + s15) / 21.0;
  const double wa = (155.0 - s15) / 1200.0;
  const double wb = (155.0 + s15) / 1200.0;

  TriangleRule rule;
  rule.degree = 5;
  rule.points = {
      {1.0 / 3.0, 1.0 / 3.0},
      {a, a}, {1.0 - 2.0 * a, a}, {a, 1.0 - 2.0 * a},
      {b, b}, {1.0 - 2.0 * b, b}, {b, 1.0 - 2.0 * b},
  };
  rule.weights = {0.225, wa, wa, wa, wb, wb, wb};
  for (double& w : rule.weights) w *= 0.5;
  return rule;
}

TriangleRule collapsed_gauss_rule(int n) {
  const LineRule g = gauss_legendre(n);
  TriangleRule rule;
  rule.degree = 2 * n - 2;
  rule.points.reserve(static_cast<std::size_t>(n * n));
  rule.weights.reserve(static_cast<std::size_t>(n * n));
  // (s, t) in [0,1]^2 -> (x, y) = (s (1 - t), t), Jacobian (1 - t).
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double s = g.points[i];
      const double t = g.points[j];
      rule.points.emplace_back(s * (1.0 - t), t);
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - t));
    }
  }
  return rule;
}

TriangleRule triangle_rule(int degree) {
  if (degree <= 5) return triangle_rule_degree5();
  return collapsed_gauss_rule((degree + 3) / 2);
}

}  // namespace fhnrom
