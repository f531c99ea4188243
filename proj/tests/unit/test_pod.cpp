#include <cmath>
#include <memory>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "fhnrom/error.hpp"
#include "fhnrom/pod.hpp"
#include "unit/oracles.hpp"

using namespace fhnrom;

namespace {

DenseMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseMatrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = dist(gen);
  return a;
}

struct Setup {
  explicit Setup(int refinements) : space(build_square_mesh(10.0, refinements), 1), mass(assemble_mass(space)), factor(mass) {}
  DGSpace space;
  BlockSparseMatrix mass;
  BlockCholesky factor;
};

double projection_residual(const DenseMatrix& w, const DenseMatrix& psi, const Eigen::MatrixXd& m) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    const Vector e = w.col(j) - psi * (psi.transpose() * (m * w.col(j)));
    total += e.dot(m * e);
  }
  return total;
}

ModeSelection explicit_modes(int k) {
  ModeSelection s;
  s.modes = k;
  return s;
}

}  // namespace

TEST_CASE("single snapshot gives its normalized direction") {
  const Setup s(1);
  const DenseMatrix w = random_matrix(static_cast<Eigen::Index>(s.space.num_dofs()), 1, 1);
  const PodBasis b = compute_pod_basis(w, s.factor, ModeSelection{});
  const double norm_m = std::sqrt(w.col(0).dot(s.mass.multiply(w.col(0))));
  REQUIRE(b.size() == 1);
  CHECK(b.rank == 1);
  CHECK(std::abs(b.singular_values(0) - norm_m) <= 1e-12 * norm_m);
  const double sign = b.modes(0, 0) * w(0, 0) > 0 ? 1.0 : -1.0;
  CHECK((sign * b.modes.col(0) - w.col(0) / norm_m).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("duplicated snapshots stay rank one") {
  const Setup s(1);
  const DenseMatrix w = random_matrix(static_cast<Eigen::Index>(s.space.num_dofs()), 1, 2);
  DenseMatrix w3(w.rows(), 3);
  w3 << w, w, w;
  const PodBasis b = compute_pod_basis(w3, s.factor, ModeSelection{});
  CHECK(b.rank == 1);
  CHECK(b.size() == 1);
  CHECK(b.singular_values(1) <= 1e-12 * b.singular_values(0));
  CHECK_THROWS_AS(compute_pod_basis(w3, s.factor, explicit_modes(2)), RankError);
  try {
    compute_pod_basis(w3, s.factor, explicit_modes(3));
  } catch (const RankError& e) {
    CHECK(e.achievable_rank() == 1);
  }
}

TEST_CASE("weighted POD matches a Gram-matrix eigen oracle") {
  const Setup s(1);
  const auto n = static_cast<Eigen::Index>(s.space.num_dofs());
  const DenseMatrix w = random_matrix(n, 10, 3);
  const Eigen::MatrixXd m = s.mass.to_dense();
  const Eigen::VectorXd lambda = fhnrom::testing::jacobi_eigenvalues(w.transpose() * m * w);
  const PodBasis full = compute_pod_basis(w, s.factor, explicit_modes(10));
  CHECK(m_orthonormality_defect(full.modes, s.mass) <= 1e-8);
  for (Eigen::Index i = 0; i < 10; ++i) {
    CHECK(std::abs(full.singular_values(i) * full.singular_values(i) - lambda(i)) <= 1e-10 * lambda(0));
  }
  const double total = w.cwiseProduct(m * w).sum();
  CHECK(projection_residual(w, full.modes, m) <= 1e-10 * total);
  for (int r = 1; r <= 10; ++r) {
    const PodBasis b = compute_pod_basis(w, s.factor, explicit_modes(r));
    const double tail = lambda.tail(10 - r).sum();
    const double res = projection_residual(w, b.modes, m);
    CHECK(std::abs(res - tail) <= 1e-6 * std::max(tail, 1e-12 * total) + 1e-10 * total);
  }
}

TEST_CASE("Gram route agrees with the direct route") {
  const Setup s(2);
  const auto n = static_cast<Eigen::Index>(s.space.num_dofs());
  const DenseMatrix w = random_matrix(n, 40, 4);
  SvdOptions gram;
  gram.direct_limit = 10;
  const PodBasis d = compute_pod_basis(w, s.factor, explicit_modes(8));
  const PodBasis g = compute_pod_basis(w, s.factor, explicit_modes(8), gram);
  CHECK((d.singular_values - g.singular_values).cwiseAbs().maxCoeff() <= 1e-10 * d.singular_values(0));
  CHECK(m_orthonormality_defect(g.modes, s.mass) <= 1e-8);
  // Same subspace: projectors agree.
  const Eigen::MatrixXd m = s.mass.to_dense();
  const Eigen::MatrixXd pd = d.modes * d.modes.transpose() * m;
  const Eigen::MatrixXd pg = g.modes * g.modes.transpose() * m;
  CHECK((pd - pg).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("energy criterion picks the smallest sufficient count") {
  Vector sigma(4);
  sigma << 10.0, 1.0, 0.1, 0.0;
  ModeSelection sel;
  sel.energy = 0.99;
  CHECK(select_mode_count(sigma, 3, sel) == 1);
  sel.energy = 0.9999;
  CHECK(select_mode_count(sigma, 3, sel) == 2);
  sel.energy = 0.999999;
  CHECK(select_mode_count(sigma, 3, sel) == 3);
  sel.energy = 1.0;
  CHECK(select_mode_count(sigma, 3, sel) == 3);
  CHECK(numerical_rank(sigma, 1e-3) == 3);
  CHECK(numerical_rank(sigma, 0.05) == 2);
  CHECK_THROWS_AS(select_mode_count(sigma, 3, explicit_modes(4)), RankError);
}

TEST_CASE("adding a snapshot already in the span leaves the spectrum unchanged") {
  const Setup s(1);
  const auto n = static_cast<Eigen::Index>(s.space.num_dofs());
  const DenseMatrix w = random_matrix(n, 5, 6);
  DenseMatrix extended(n, 6);
  extended << w, Eigen::MatrixXd::Zero(n, 1);
  const PodBasis a = compute_pod_basis(w, s.factor, explicit_modes(5));
  const PodBasis b = compute_pod_basis(extended, s.factor, explicit_modes(5));
  CHECK((a.singular_values - b.singular_values.head(5)).cwiseAbs().maxCoeff() <= 1e-10 * a.singular_values(0));
}

TEST_CASE("reduced operators") {
  const Setup s(1);
  const auto n = static_cast<Eigen::Index>(s.space.num_dofs());
  const BlockSparseMatrix su = assemble_stiffness_sipg(s.space, 0.04);
  const BlockSparseMatrix sv = assemble_stiffness_sipg(s.space, 1.0);
  FhnParameters p;

  const PodBasis bu = compute_pod_basis(random_matrix(n, 3, 7), s.factor, explicit_modes(3));
  const PodBasis bv = compute_pod_basis(random_matrix(n, 3, 8), s.factor, explicit_modes(3));

  SUBCASE("same basis gives identity coupling") {
    const RomOperators ops = reduce_operators(bu.modes, bu.modes, s.mass, su, sv, p);
    CHECK((ops.mass_uv - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((ops.mass_vu - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("constant mode is in the stiffness kernel") {
    Vector one = project_function(s.space, [](const Point2&) { return 1.0; });
    one /= std::sqrt(one.dot(s.mass.multiply(one)));
    const RomOperators ops = reduce_operators(one, one, s.mass, su, sv, p);
    CHECK(std::abs(ops.stiffness_u(0, 0)) <= 1e-12);
    CHECK(std::abs(ops.stiffness_v(0, 0)) <= 1e-12);
  }
  SUBCASE("entries match triple-product sums") {
    const RomOperators ops = reduce_operators(bu.modes, bv.modes, s.mass, su, sv, p);
    const Eigen::MatrixXd m = s.mass.to_dense();
    const Eigen::MatrixXd sud = su.to_dense();
    const Eigen::MatrixXd svd = sv.to_dense();
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double e_su = 0, e_sv = 0, e_muv = 0, e_mvu = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = 0; j < n; ++j) {
            e_su += bu.modes(i, a) * sud(i, j) * bu.modes(j, b);
            e_sv += bv.modes(i, a) * svd(i, j) * bv.modes(j, b);
            e_muv += bu.modes(i, a) * m(i, j) * bv.modes(j, b);
            e_mvu += bv.modes(i, a) * m(i, j) * bu.modes(j, b);
          }
        }
        CHECK(std::abs(ops.stiffness_u(a, b) - e_su) <= 1e-10 * (1 + std::abs(e_su)));
        CHECK(std::abs(ops.stiffness_v(a, b) - e_sv) <= 1e-10 * (1 + std::abs(e_sv)));
        CHECK(std::abs(ops.mass_uv(a, b) - e_muv) <= 1e-10);
        CHECK(std::abs(ops.mass_vu(a, b) - e_mvu) <= 1e-10);
      }
    }
    CHECK((ops.mass_vu - ops.mass_uv.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    std::mt19937 gen(9);
    std::normal_distribution<double> dist;
    for (int t = 0; t < 20; ++t) {
      Vector x(3);
      for (int i = 0; i < 3; ++i) x(i) = dist(gen);
      CHECK(x.dot(ops.stiffness_u * x) >= -1e-10);
      CHECK(x.dot(ops.stiffness_v * x) >= -1e-10);
    }
  }
  SUBCASE("shape and orthonormality checks") {
    CHECK_THROWS_AS(reduce_operators(bu.modes, bv.modes.leftCols(2), s.mass, su, sv, p), DimensionError);
    CHECK_THROWS_AS(reduce_operators(2.0 * bu.modes, bv.modes, s.mass, su, sv, p), Error);
  }
}
