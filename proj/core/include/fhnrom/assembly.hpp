#pragma once

#include <functional>

#include "fhnrom/block_sparse.hpp"
#include "fhnrom/dg_space.hpp"

namespace fhnrom {

/// Bistable nonlinearity f(u; mu) = (u - mu)(u^2 - 1).
inline double bistable(double u, double mu) { return (u - mu) * (u * u - 1.0); }
/// f'(u; mu) = 3u^2 - 2 mu u - 1.
inline double bistable_derivative(double u, double mu) { return 3.0 * u * u - 2.0 * mu * u - 1.0; }

/// Default SIPG penalty constant; the face penalty is
/// sigma0 * D * (q+1)^2 / h_f.
inline constexpr double kDefaultPenalty = 10.0;

/// Block-diagonal mass matrix; with the orthonormal basis each block is
/// |det J_E| * I.
BlockSparseMatrix assemble_mass(const DGSpace& space);

/// Symmetric interior penalty form for -div(D grad u) with zero-flux
/// boundaries. Only interior faces contribute face terms.
BlockSparseMatrix assemble_stiffness_sipg(const DGSpace& space, double diffusion,
                                          double penalty = kDefaultPenalty);

/// F_i = int_E f(u_h; mu) phi_i, element by element.
Vector assemble_nonlinear(const DGSpace& space, const Vector& u, double mu);

/// Block-diagonal Jacobian of assemble_nonlinear with respect to u.
BlockSparseMatrix assemble_nonlinear_jacobian(const DGSpace& space, const Vector& u, double mu);

/// Writes the N_el Jacobian blocks (each local_size^2, column-major) into
/// `blocks`, resizing it as needed. Used by the time steppers to avoid
/// rebuilding the block structure every Newton iteration.
void nonlinear_jacobian_blocks(const DGSpace& space, const Vector& u, double mu, std::vector<double>& blocks);

using ScalarField = std::function<double(const Point2&)>;

/// Elementwise L2 projection of a pointwise function.
Vector project_function(const DGSpace& space, const ScalarField& g);

}  // namespace fhnrom
