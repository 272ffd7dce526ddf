#include "mfg/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "mfg/errors.hpp"

namespace mfg {

namespace {

void require_positive_density(const Solution& v) {
  if (!(v.m.values.minCoeff() >= kMFloor))
    throw PositivityError("diagnostics: density at or below the log floor");
}

Eigen::ArrayXd dot_field(const VectorField& A, const VectorField& B) {
  Eigen::ArrayXd d = A.comp[0] * B.comp[0];
  for (int k = 1; k < A.grid.dim(); ++k) d += A.comp[k] * B.comp[k];
  return d;
}

}  // namespace

double sobolev_two_star(int dim, double two_star_eff) {
  if (dim == 3) return 6.0;  // 2d/(d-2)
  if (dim == 1 || dim == 2) {
    if (!(two_star_eff > 2.0))
      throw std::invalid_argument("sobolev_two_star: surrogate must exceed 2");
    return two_star_eff;
  }
  throw std::invalid_argument("sobolev_two_star: dim must be 1, 2 or 3");
}

double energy_identity_gap(const LambdaFamily& fam, const CouplingSpec& c, const Solution& v) {
  const VectorField Du = gradient(v.u);
  const ScalarField H = hamiltonian_field(fam, Du);
  const VectorField dph = drift_field(fam, Du);
  const ScalarField gm = g_field(c, v.m);

  const ScalarField gm_m{v.m.grid, gm.values * v.m.values};
  const ScalarField lagrangian_m{v.m.grid, (H.values - dot_field(dph, Du)) * v.m.values};
  return std::abs(v.hbar + integrate(gm_m) - integrate(lagrangian_m));
}

DiagnosticsReport basic_bounds(const LambdaFamily& fam, const CouplingSpec& c, const Solution& v) {
  require_positive_density(v);
  const TorusGrid& grid = v.m.grid;
  const VectorField Du = gradient(v.u);
  const ScalarField gm = g_field(c, v.m);
  const ScalarField du_mag = Du.magnitude();
  const ScalarField lnm{grid, v.m.values.log()};
  const VectorField dlnm = gradient(lnm);
  const VectorField dph = drift_field(fam, Du);

  DiagnosticsReport rep;
  rep.hbar = v.hbar;
  rep.int_g = integrate(gm);
  rep.int_gm = integrate({grid, gm.values * v.m.values});
  rep.kinetic = integrate({grid, du_mag.values.pow(fam.gamma()) * v.m.values});
  rep.m_linf = v.m.values.abs().maxCoeff();
  rep.m_min = v.m.values.minCoeff();
  rep.lnm_l1 = lp_norm(lnm, 1.0);
  rep.lnm_linf = lnm.values.abs().maxCoeff();
  rep.dlnm_l2 = lp_norm(dlnm.magnitude(), 2.0);
  rep.dlnm_linf = dlnm.magnitude().values.maxCoeff();
  rep.dph_l2 = lp_norm(dph.magnitude(), 2.0);
  if (c.kind == CouplingKind::Power) rep.m_l1alpha = lp_norm(v.m, 1.0 + c.alpha);
  rep.energy_gap = energy_identity_gap(fam, c, v);
  return rep;
}

MoserRecord moser_ratio(const LambdaFamily& fam, const CouplingSpec& c, const Solution& v,
                        double p, double two_star_eff) {
  const int dim = v.m.grid.dim();
  const double two_star = sobolev_two_star(dim, two_star_eff);
  const double p_upper =
      std::max(c.kind == CouplingKind::Power ? 1.0 + c.alpha : 0.0, 0.5 * two_star);
  if (!(p > 1.0 && p < p_upper))
    throw std::invalid_argument("moser_ratio: p outside (1, max{1+alpha, 2*/2})");

  const double p_conj = p / (p - 1.0);
  const VectorField dph = drift_field(fam, gradient(v.u));
  const ScalarField dph_sq{v.m.grid, dot_field(dph, dph)};

  MoserRecord rec;
  rec.p = p;
  rec.two_star = two_star;
  rec.surrogate = dim != 3;
  rec.exponent = 1.0 / (1.0 - 2.0 * p / two_star);
  rec.lhs = v.m.values.abs().maxCoeff();
  rec.rhs_driver = std::pow(1.0 + lp_norm(dph_sq, p_conj), rec.exponent);
  rec.ratio = rec.lhs == 0.0 ? 0.0 : rec.lhs / rec.rhs_driver;
  return rec;
}

BernsteinRecord bernstein_quantities(const LambdaFamily& /*fam*/, const CouplingSpec& c,
                                     const Solution& v, double p, double two_star_eff) {
  if (!(p > 1.0)) throw std::invalid_argument("bernstein_quantities: p must be > 1");
  const int dim = v.m.grid.dim();
  const double two_star = sobolev_two_star(dim, two_star_eff);
  const double s_half = 0.5 * two_star;  // d/(d-2) for d = 3

  const VectorField Du = gradient(v.u);
  const ScalarField vsq{v.m.grid, dot_field(Du, Du)};  // v = |Du|^2
  const ScalarField gm = g_field(c, v.m);
  const ScalarField g_abs{v.m.grid, gm.values.abs()};

  BernsteinRecord rec;
  rec.p = p;
  rec.two_star = two_star;
  rec.surrogate = dim != 3;
  const double big_e = (p + 1.0) * s_half;        // d(p+1)/(d-2)
  const double t = s_half * (p + 1.0) / p;        // d(p+1)/((d-2)p)
  rec.beta_p = t / (t - 1.0);                     // conjugate power
  rec.r_p = 2.0 * rec.beta_p;
  rec.lhs = lp_norm(vsq, big_e);                  // (int v^E)^(1/E)
  const double g_2beta = lp_norm(g_abs, 2.0 * rec.beta_p);
  rec.rhs_driver = g_2beta * g_2beta;             // (int |g|^(2 beta))^(1/beta)
  rec.ratio = rec.lhs == 0.0 ? 0.0 : rec.lhs / rec.rhs_driver;
  rec.du_norm = lp_norm(Du.magnitude(), 2.0 * big_e);
  rec.g_norm = lp_norm(g_abs, rec.r_p);
  return rec;
}

LogIntegrabilityRecord log_estimates(const LambdaFamily& fam, const CouplingSpec& c, const Solution& v,
                            double p, double q, double l, double two_star_eff) {
  if (c.kind != CouplingKind::Log)
    throw std::invalid_argument("log_estimates: requires the Log coupling");
  require_positive_density(v);
  if (std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-12)
    throw std::invalid_argument("log_estimates: p, q must be conjugate exponents");
  const double two_star = sobolev_two_star(v.m.grid.dim(), two_star_eff);
  if (!(q > 1.0 && q < 0.5 * two_star))
    throw std::invalid_argument("log_estimates: q outside (1, 2*/2)");
  if (!(l > 1.0)) throw std::invalid_argument("log_estimates: l must be > 1");

  const TorusGrid& grid = v.m.grid;
  const ScalarField lnm{grid, v.m.values.log()};
  const VectorField Du = gradient(v.u);
  const VectorField dph = drift_field(fam, Du);

  LogIntegrabilityRecord rec;
  rec.p = p;
  rec.q = q;
  rec.l = l;
  rec.lhs = lp_norm(lnm, q * (l + 1.0));
  rec.rhs_driver = std::pow(lp_norm(Du.magnitude(), 2.0 * p * (fam.gamma() - 1.0)),
                            fam.gamma() - 1.0);
  rec.ratio = rec.lhs == 0.0 ? 0.0 : rec.lhs / rec.rhs_driver;
  rec.dlnm_l2 = lp_norm(gradient(lnm).magnitude(), 2.0);
  rec.dph_l2 = lp_norm(dph.magnitude(), 2.0);
  rec.slack = rec.dph_l2 - rec.dlnm_l2;
  return rec;
}

LowerBoundRecord lower_bound_monitor(const Solution& v) {
  require_positive_density(v);
  const ScalarField lnm{v.m.grid, v.m.values.log()};
  LowerBoundRecord rec;
  rec.m_min = v.m.values.minCoeff();
  rec.lnm_linf = lnm.values.abs().maxCoeff();
  rec.dlnm_linf = gradient(lnm).magnitude().values.maxCoeff();
  return rec;
}

double quadratic_log_oracle(const LambdaFamily& fam, const CouplingSpec& c, const Solution& v) {
  if (c.kind != CouplingKind::Log)
    throw std::invalid_argument("quadratic_log_oracle: requires the Log coupling");
  if (fam.gamma() != 2.0)
    throw std::invalid_argument("quadratic_log_oracle: requires gamma = 2");
  if (fam.lambda != 1.0)
    throw std::invalid_argument("quadratic_log_oracle: requires lambda = 1");
  if ((fam.base.a.values - 1.0).abs().maxCoeff() > 1e-14)
    throw std::invalid_argument("quadratic_log_oracle: requires a identically 1");
  const Eigen::ArrayXd w = (2.0 * v.u.values).exp();
  const double z = integrate({v.u.grid, w});
  return (v.m.values - w / z).abs().maxCoeff();
}

}  // namespace mfg
