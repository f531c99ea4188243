#include "fhnrom/assembly.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "fhnrom/error.hpp"

namespace fhnrom {

namespace {

void check_length(const DGSpace& space, const Vector& u, const char* who) {
  if (static_cast<std::size_t>(u.size()) != space.num_dofs()) {
    throw DimensionError(std::string(who) + ": state vector length does not match the space");
  }
}

}  // namespace

BlockSparseMatrix assemble_mass(const DGSpace& space) {
  const int nloc = space.local_size();
  const auto& rule = space.volume_rule();
  const Eigen::MatrixXd& phi = space.volume_values();
  // Reference mass block, identity up to rounding for the orthonormal basis.
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(nloc, nloc);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto row = phi.row(static_cast<Eigen::Index>(q));
    ref.noalias() += rule.weights[q] * row.transpose() * row;
  }
  BlockSparseBuilder builder(space.num_elements(), nloc);
  const auto& maps = space.mesh().affine_maps();
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    builder.add(e, e, std::abs(maps[e].det) * ref);
  }
  return std::move(builder).build();
}

BlockSparseMatrix assemble_stiffness_sipg(const DGSpace& space, double diffusion, double penalty) {
  if (!(diffusion > 0.0)) throw Error("assemble_stiffness_sipg: diffusion must be positive");
  const int nloc = space.local_size();
  const Mesh& mesh = space.mesh();
  const auto& maps = mesh.affine_maps();
  const auto& rule = space.volume_rule();
  const ModalBasis& basis = space.basis();
  BlockSparseBuilder builder(space.num_elements(), nloc);

  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const AffineMap& map = maps[e];
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(nloc, nloc);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::MatrixXd grad = space.volume_ref_gradients(q) * map.inverse_jacobian;
      block.noalias() += rule.weights[q] * grad * grad.transpose();
    }
    builder.add(e, e, diffusion * std::abs(map.det) * block);
  }

  const LineRule& line = space.face_rule();
  const double q1 = space.degree() + 1.0;
  for (const InteriorFace& face : mesh.interior_faces()) {
    const auto left = static_cast<std::size_t>(face.left);
    const auto right = static_cast<std::size_t>(face.right);
    const Point2 a = mesh.vertex(face.left, face.left_edge);
    const Point2 b = mesh.vertex(face.left, (face.left_edge + 1) % 3);
    const double sigma = penalty * diffusion * q1 * q1 / face.length;

    Eigen::MatrixXd ll = Eigen::MatrixXd::Zero(nloc, nloc);
    Eigen::MatrixXd lr = ll;
    Eigen::MatrixXd rl = ll;
    Eigen::MatrixXd rr = ll;
    for (std::size_t q = 0; q < line.size(); ++q) {
      const Point2 x = a + line.points[q] * (b - a);
      const double w = line.weights[q] * face.length;
      const Point2 xi_l = maps[left].to_reference(x);
      const Point2 xi_r = maps[right].to_reference(x);
      // Jump [w] = w_L - w_R; average {D grad w . n} with n from L to R.
      const Eigen::VectorXd jl = basis.values(xi_l);
      const Eigen::VectorXd jr = -basis.values(xi_r);
      const Eigen::VectorXd fl = 0.5 * diffusion * (basis.gradients(xi_l) * maps[left].inverse_jacobian) * face.normal;
      const Eigen::VectorXd fr = 0.5 * diffusion * (basis.gradients(xi_r) * maps[right].inverse_jacobian) * face.normal;
      // A(i, j) for test i on X, trial j on Y:
      //   -{D grad phi_j . n}[phi_i] - {D grad phi_i . n}[phi_j] + sigma [phi_j][phi_i]
      auto term = [&](const Eigen::VectorXd& jx, const Eigen::VectorXd& fx, const Eigen::VectorXd& jy,
                      const Eigen::VectorXd& fy) -> Eigen::MatrixXd {
        return w * (-jx * fy.transpose() - fx * jy.transpose() + sigma * jx * jy.transpose());
      };
      ll += term(jl, fl, jl, fl);
      lr += term(jl, fl, jr, fr);
      rl += term(jr, fr, jl, fl);
      rr += term(jr, fr, jr, fr);
    }
    builder.add(left, left, ll);
    builder.add(left, right, lr);
    builder.add(right, left, rl);
    builder.add(right, right, rr);
  }
  return std::move(builder).build();
}

Vector assemble_nonlinear(const DGSpace& space, const Vector& u, double mu) {
  check_length(space, u, "assemble_nonlinear");
  const int nloc = space.local_size();
  const auto& rule = space.volume_rule();
  const Eigen::MatrixXd& phi = space.volume_values();
  const auto& maps = space.mesh().affine_maps();
  const auto nq = static_cast<Eigen::Index>(rule.size());
  const Eigen::Map<const Eigen::VectorXd> weights(rule.weights.data(), nq);

  Vector out(u.size());
  Eigen::VectorXd values(nq);
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const auto offset = static_cast<Eigen::Index>(space.dof(e, 0));
    values.noalias() = phi * u.segment(offset, nloc);
    for (Eigen::Index q = 0; q < nq; ++q) values(q) = weights(q) * bistable(values(q), mu);
    out.segment(offset, nloc).noalias() = std::abs(maps[e].det) * (phi.transpose() * values);
  }
  return out;
}

void nonlinear_jacobian_blocks(const DGSpace& space, const Vector& u, double mu, std::vector<double>& blocks) {
  check_length(space, u, "nonlinear_jacobian_blocks");
  const int nloc = space.local_size();
  const auto& rule = space.volume_rule();
  const Eigen::MatrixXd& phi = space.volume_values();
  const auto& maps = space.mesh().affine_maps();
  const auto nq = static_cast<Eigen::Index>(rule.size());
  const auto bb = static_cast<std::size_t>(nloc * nloc);
  blocks.resize(space.num_elements() * bb);

  Eigen::VectorXd values(nq);
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const auto offset = static_cast<Eigen::Index>(space.dof(e, 0));
    values.noalias() = phi * u.segment(offset, nloc);
    for (Eigen::Index q = 0; q < nq; ++q) {
      values(q) = rule.weights[static_cast<std::size_t>(q)] * bistable_derivative(values(q), mu);
    }
    Eigen::Map<Eigen::MatrixXd> block(blocks.data() + e * bb, nloc, nloc);
    block.noalias() = std::abs(maps[e].det) * (phi.transpose() * values.asDiagonal() * phi);
  }
}

BlockSparseMatrix assemble_nonlinear_jacobian(const DGSpace& space, const Vector& u, double mu) {
  std::vector<double> blocks;
  nonlinear_jacobian_blocks(space, u, mu, blocks);
  const int nloc = space.local_size();
  const auto bb = static_cast<std::size_t>(nloc * nloc);
  BlockSparseBuilder builder(space.num_elements(), nloc);
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    builder.add(e, e, Eigen::Map<const Eigen::MatrixXd>(blocks.data() + e * bb, nloc, nloc));
  }
  return std::move(builder).build();
}

Vector project_function(const DGSpace& space, const ScalarField& g) {
  const int nloc = space.local_size();
  const auto& rule = space.volume_rule();
  const Eigen::MatrixXd& phi = space.volume_values();
  const auto& maps = space.mesh().affine_maps();
  Eigen::MatrixXd ref_mass = Eigen::MatrixXd::Zero(nloc, nloc);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto row = phi.row(static_cast<Eigen::Index>(q));
    ref_mass.noalias() += rule.weights[q] * row.transpose() * row;
  }
  const Eigen::LLT<Eigen::MatrixXd> ref_mass_llt(ref_mass);
  Vector out(static_cast<Eigen::Index>(space.num_dofs()));
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    // M_E = |det J| M_ref; the |det J| factors cancel.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nloc);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 x = maps[e].to_physical(rule.points[q]);
      rhs += rule.weights[q] * g(x) * phi.row(static_cast<Eigen::Index>(q)).transpose();
    }
    out.segment(static_cast<Eigen::Index>(space.dof(e, 0)), nloc) = ref_mass_llt.solve(rhs);
  }
  return out;
}

}  // namespace fhnrom
