#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "mfg/torus_grid.hpp"

namespace mfg {

/// Stack-allocated vector/matrix in momentum space (dimension = grid dim <= 3).
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

/// Model Hamiltonian H(x,p) = a(x) (1+|p|^2)^(gamma/2) + V(x).
///
/// gamma > 1 is enforced here; strict positivity of a is certified by
/// check_assumptions (a degenerate coefficient must be constructible so the
/// checker can flag it).
struct HamiltonianSpec {
  double gamma;
  ScalarField a;
  ScalarField V;

  HamiltonianSpec(double gamma_, ScalarField a_, ScalarField V_);
};

/// Interpolated family H_lambda(x,p) = lambda*H(x,p) + (1-lambda)*(1+|p|^2)^(gamma/2).
struct LambdaFamily {
  HamiltonianSpec base;
  double lambda;

  LambdaFamily(HamiltonianSpec b, double lam);

  const TorusGrid& grid() const { return base.a.grid; }
  double gamma() const { return base.gamma; }
  /// Effective momentum coefficient lambda*a(x) + (1-lambda).
  double weight(long node) const { return lambda * base.a.values[node] + (1.0 - lambda); }
};

double eval_H(const LambdaFamily& fam, long node, const SmallVec& p);
SmallVec eval_DpH(const LambdaFamily& fam, long node, const SmallVec& p);
/// Analytic Hessian in p; arranged so that for gamma == 2 the rank-one term
/// is exactly zero and the result is exactly [lambda*a + (1-lambda)] * 2 * I.
SmallMat eval_DppH(const LambdaFamily& fam, long node, const SmallVec& p);

/// Field-level evaluations with p = Du(x) nodewise.
ScalarField hamiltonian_field(const LambdaFamily& fam, const VectorField& Du);
VectorField drift_field(const LambdaFamily& fam, const VectorField& Du);

/// D^2_pp H(x,Du(x)) = c_iso(x) I + c_rank1(x) Du(x) Du(x)^T.
struct HessianCoeffs {
  Eigen::ArrayXd c_iso;
  Eigen::ArrayXd c_rank1;
};
HessianCoeffs hessian_coeffs(const LambdaFamily& fam, const VectorField& Du);

/// One record per growth assumption. fitted_c is the smallest constant making
/// the sampled bound hold (for the convexity entry it is the sampled minimum
/// Hessian eigenvalue); it is reported even on pass.
struct AssumptionEntry {
  std::string id;
  double fitted_c = 0.0;
  bool pass = true;
  long worst_node = 0;
  SmallVec worst_p;
};

struct AssumptionReport {
  std::vector<AssumptionEntry> entries;  // A1.1, A1.2, A2, A3, A4
  double min_hessian_eigenvalue = 0.0;
  double delta_min = 0.0;
  double p_max = 0.0;
  int samples_per_axis = 0;
  bool pass = false;

  const AssumptionEntry& entry(const std::string& id) const;
};

/// Samples all grid nodes against a tensor grid of momenta with |p_i| <= p_max
/// and fits the constants of A1-A4. Passes iff every fitted constant is finite
/// and the minimum Hessian eigenvalue is >= delta_min.
AssumptionReport check_assumptions(const LambdaFamily& fam, double p_max = 10.0,
                                   int samples_per_axis = 33, double delta_min = 1e-8);

/// Spatial-derivative part of A4, evaluated through grid derivatives of a and
/// V: |D_x H| = lambda*(|Da|(1+|p|^2)^(gamma/2) + |DV|), |D_xx H| analogous with
/// laplacians, and the cross bound |D^2_xp H| <= C|p|^(gamma-1) + C fitted from
/// centered differences of D_p H along grid directions.
struct DxHNorms {
  ScalarField da_norm;   // |Da(x)|
  ScalarField dv_norm;   // |DV(x)|
  ScalarField lapa_abs;  // |lap a(x)|
  ScalarField lapv_abs;  // |lap V(x)|
  ScalarField dxh_p0;    // |D_x H(x, 0)|
  ScalarField dxxh_p0;   // |D_xx H(x, 0)|
  double c_dx = 0.0;     // fitted C in |D_x H| <= C H + C
  double c_dxx = 0.0;    // fitted C in |D_xx H| <= C H + C
  double c_dxp = 0.0;    // fitted C in |D^2_xp H| <= C |p|^(gamma-1) + C
  bool feasible = true;
};

DxHNorms eval_DxH_norms(const LambdaFamily& fam, double p_max = 10.0, int samples_per_axis = 33);

}  // namespace mfg
