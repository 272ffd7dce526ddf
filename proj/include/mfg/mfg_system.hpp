#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "mfg/coupling.hpp"
#include "mfg/hamiltonian.hpp"
#include "mfg/torus_grid.hpp"

namespace mfg {

/// Discrete analogue of (u_lambda, m_lambda, Hbar_lambda) at homotopy
/// parameter lambda. On accepted solver iterates: integrate(u) = 0,
/// integrate(m) = 1 (to 1e-10) and min m > 0.
struct Solution {
  ScalarField u;
  ScalarField m;
  double hbar = 0.0;
  double lambda = 0.0;
};

/// Nodewise residual of the coupled system plus the two scalar constraints.
///
/// fp_block  = lap(m) - div(D_p H_lambda(x, Du) * m)
/// hjb_block = lap(u) + H_lambda(x, Du) - g(m) - hbar
/// mass_gap  = 1 - integrate(m),  mean_u = integrate(u)
struct ResidualVector {
  Eigen::ArrayXd fp_block;
  Eigen::ArrayXd hjb_block;
  double mass_gap = 0.0;
  double mean_u = 0.0;

  /// Constrained residual in the Newton unknown ordering (du, dm, dhbar):
  /// FP rows with node 0 replaced by the mass constraint, then HJB rows,
  /// then the mean-u row. Size 2N+1.
  Eigen::VectorXd ordered() const;
  double sup_norm() const { return ordered().lpNorm<Eigen::Infinity>(); }
};

ResidualVector residual(const LambdaFamily& fam, const CouplingSpec& c, const Solution& v);

/// Exact derivative of the constrained residual, sparse, order 2N+1.
/// Unknowns: du (N), dm (N), dhbar (1). Full Newton: includes the
/// m * D^2_pp H * D(du) cross block of the linearized transport term.
Eigen::SparseMatrix<double> assemble_jacobian(const LambdaFamily& fam, const CouplingSpec& c,
                                              const Solution& v);

/// Direct sparse solve with one step of iterative refinement; guarantees
/// ||J x - rhs||_inf <= max(1e-10, 1e-10 ||rhs||_inf) or throws LinearSolveError.
Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& rhs);

}  // namespace mfg
