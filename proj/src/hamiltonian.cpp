#include "mfg/hamiltonian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PGrid {
  std::vector<double> axis;  // sample values per momentum axis
  int dim;

  long count() const {
    long c = 1;
    for (int k = 0; k < dim; ++k) c *= static_cast<long>(axis.size());
    return c;
  }

  SmallVec sample(long idx) const {
    SmallVec p(dim);
    const long na = static_cast<long>(axis.size());
    for (int k = 0; k < dim; ++k) {
      p[k] = axis[idx % na];
      idx /= na;
    }
    return p;
  }
};

PGrid make_pgrid(int dim, double p_max, int samples_per_axis) {
  if (!(p_max > 0.0)) throw std::invalid_argument("check_assumptions: P_max must be > 0");
  if (samples_per_axis < 2) throw std::invalid_argument("check_assumptions: need >= 2 samples per axis");
  PGrid g;
  g.dim = dim;
  g.axis.resize(samples_per_axis);
  const double step = 2.0 * p_max / (samples_per_axis - 1);
  for (int i = 0; i < samples_per_axis; ++i) g.axis[i] = -p_max + i * step;
  return g;
}

/// Running maximum with the sample that attains it.
struct MaxFit {
  double value = 0.0;
  long node = 0;
  SmallVec p;

  void update(double v, long n, const SmallVec& pv) {
    if (v > value) {
      value = v;
      node = n;
      p = pv;
    }
  }

  AssumptionEntry finish(const std::string& id) const {
    AssumptionEntry e;
    e.id = id;
    e.fitted_c = value;
    e.pass = std::isfinite(value);
    e.worst_node = node;
    e.worst_p = p;
    return e;
  }
};

}  // namespace

HamiltonianSpec::HamiltonianSpec(double gamma_, ScalarField a_, ScalarField V_)
    : gamma(gamma_), a(std::move(a_)), V(std::move(V_)) {
  if (!(gamma > 1.0)) throw std::invalid_argument("HamiltonianSpec: gamma must be > 1");
  if (a.grid != V.grid) throw std::invalid_argument("HamiltonianSpec: a and V on different grids");
  if ((a.values < 0.0).any()) throw std::invalid_argument("HamiltonianSpec: a must be nonnegative");
}

LambdaFamily::LambdaFamily(HamiltonianSpec b, double lam) : base(std::move(b)), lambda(lam) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("LambdaFamily: lambda outside [0,1]");
}

double eval_H(const LambdaFamily& fam, long node, const SmallVec& p) {
  const double s = 1.0 + p.squaredNorm();
  return fam.weight(node) * std::pow(s, 0.5 * fam.gamma()) + fam.lambda * fam.base.V.values[node];
}

SmallVec eval_DpH(const LambdaFamily& fam, long node, const SmallVec& p) {
  const double s = 1.0 + p.squaredNorm();
  const double factor = fam.weight(node) * fam.gamma() * std::pow(s, 0.5 * fam.gamma() - 1.0);
  return factor * p;
}

SmallMat eval_DppH(const LambdaFamily& fam, long node, const SmallVec& p) {
  const double s = 1.0 + p.squaredNorm();
  const double g = fam.gamma();
  const double w = fam.weight(node);
  const double c_iso = w * g * std::pow(s, 0.5 * g - 1.0);
  const double c_rank1 = w * g * (g - 2.0) * std::pow(s, 0.5 * g - 2.0);
  SmallMat out(p.size(), p.size());
  for (int k = 0; k < p.size(); ++k) {
    for (int l = k; l < p.size(); ++l) {
      const double v = c_rank1 * (p[k] * p[l]);
      out(k, l) = v;
      out(l, k) = v;
    }
    out(k, k) += c_iso;
  }
  return out;
}

ScalarField hamiltonian_field(const LambdaFamily& fam, const VectorField& Du) {
  const TorusGrid& g = fam.grid();
  if (Du.grid != g) throw std::invalid_argument("hamiltonian_field: grid mismatch");
  Eigen::ArrayXd s = 1.0 + Du.comp[0] * Du.comp[0];
  for (int k = 1; k < g.dim(); ++k) s += Du.comp[k] * Du.comp[k];
  Eigen::ArrayXd w = fam.lambda * fam.base.a.values + (1.0 - fam.lambda);
  return {g, w * s.pow(0.5 * fam.gamma()) + fam.lambda * fam.base.V.values};
}

VectorField drift_field(const LambdaFamily& fam, const VectorField& Du) {
  const TorusGrid& g = fam.grid();
  if (Du.grid != g) throw std::invalid_argument("drift_field: grid mismatch");
  Eigen::ArrayXd s = 1.0 + Du.comp[0] * Du.comp[0];
  for (int k = 1; k < g.dim(); ++k) s += Du.comp[k] * Du.comp[k];
  Eigen::ArrayXd w = fam.lambda * fam.base.a.values + (1.0 - fam.lambda);
  Eigen::ArrayXd factor = w * fam.gamma() * s.pow(0.5 * fam.gamma() - 1.0);
  VectorField out(g);
  for (int k = 0; k < g.dim(); ++k) out.comp[k] = factor * Du.comp[k];
  return out;
}

HessianCoeffs hessian_coeffs(const LambdaFamily& fam, const VectorField& Du) {
  const TorusGrid& g = fam.grid();
  Eigen::ArrayXd s = 1.0 + Du.comp[0] * Du.comp[0];
  for (int k = 1; k < g.dim(); ++k) s += Du.comp[k] * Du.comp[k];
  Eigen::ArrayXd w = fam.lambda * fam.base.a.values + (1.0 - fam.lambda);
  const double gam = fam.gamma();
  HessianCoeffs out;
  out.c_iso = w * gam * s.pow(0.5 * gam - 1.0);
  out.c_rank1 = w * gam * (gam - 2.0) * s.pow(0.5 * gam - 2.0);
  return out;
}

const AssumptionEntry& AssumptionReport::entry(const std::string& id) const {
  for (const auto& e : entries)
    if (e.id == id) return e;
  throw std::out_of_range("no assumption entry " + id);
}

AssumptionReport check_assumptions(const LambdaFamily& fam, double p_max, int samples_per_axis,
                                   double delta_min) {
  const TorusGrid& grid = fam.grid();
  const int d = grid.dim();
  const double gam = fam.gamma();
  const PGrid pg = make_pgrid(d, p_max, samples_per_axis);

  const Eigen::ArrayXd w = fam.lambda * fam.base.a.values + (1.0 - fam.lambda);
  const Eigen::ArrayXd lamV = fam.lambda * fam.base.V.values;

  double min_eig = kInf;
  long min_eig_node = 0;
  SmallVec min_eig_p;

  // Growth constants are line-to-line shorthand (the two sides of A1.2 need
  // not share one C: for the model with max V > 0 no single constant works).
  // Upper bounds fit the smallest C directly; lower bounds of the form
  // X >= -C + c|p|^gamma fit the offset C = max(0, sup(-X)), the smallest
  // offset for which a positive growth coefficient exists on the sample box.
  MaxFit a12, a3, a2, a4;

  Eigen::ArrayXd H(grid.size()), ratio(grid.size());
  for (long si = 0; si < pg.count(); ++si) {
    const SmallVec p = pg.sample(si);
    const double pn2 = p.squaredNorm();
    const double pn = std::sqrt(pn2);
    const double s = 1.0 + pn2;
    const double sg2 = std::pow(s, 0.5 * gam);
    const double se1 = std::pow(s, 0.5 * gam - 1.0);
    const double se2 = std::pow(s, 0.5 * gam - 2.0);
    const double p_gam = std::pow(pn, gam);
    const double p_gm1 = std::pow(pn, gam - 1.0);
    const double p_gm2 = std::pow(pn, gam - 2.0);  // +inf at p=0 for gam<2

    H = w * sg2 + lamV;

    // A1.1: spectrum of D^2_pp H = c_iso I + c_rank1 p p^T.
    {
      const double iso = gam * se1;
      const double pdir = gam * (se1 + (gam - 2.0) * se2 * pn2);
      const double factor = (d == 1) ? pdir : std::min(iso, pdir);
      long node;
      const double val = w.minCoeff(&node) * factor;
      if (val < min_eig) {
        min_eig = val;
        min_eig_node = node;
        min_eig_p = p;
      }
      // A4: |D_pp H| <= C |p|^(gam-2) + C, spectral norm.
      const double bnorm_factor = std::max(std::abs(iso), std::abs(pdir));
      long node4;
      const double bmax = w.maxCoeff(&node4) * bnorm_factor;
      a4.update(bmax / (p_gm2 + 1.0), node4, p);
    }

    // A1.2: H <= C + C|p|^gam and H >= -C + c|p|^gam.
    {
      long node;
      const double up = (H / (1.0 + p_gam)).maxCoeff(&node);
      a12.update(up, node, p);
      long nlo;
      const double lo = (-H).maxCoeff(&nlo);
      a12.update(lo, nlo, p);
    }

    // A2: |D_p H| <= C + C |p|^(gam-1).
    {
      long node;
      const double dph = w.maxCoeff(&node) * gam * pn * se1;
      a2.update(dph / (1.0 + p_gm1), node, p);
    }

    // A3: p.D_pH - H >= -C + c|p|^gam.
    {
      ratio = H - w * (gam * pn2 * se1);  // -Q(x,p)
      long node;
      const double lo = ratio.maxCoeff(&node);
      a3.update(lo, node, p);
    }
  }

  AssumptionReport rep;
  rep.delta_min = delta_min;
  rep.p_max = p_max;
  rep.samples_per_axis = samples_per_axis;
  rep.min_hessian_eigenvalue = min_eig;

  AssumptionEntry a11;
  a11.id = "A1.1";
  a11.fitted_c = min_eig;
  a11.pass = min_eig >= delta_min;
  a11.worst_node = min_eig_node;
  a11.worst_p = min_eig_p;
  rep.entries.push_back(a11);

  rep.entries.push_back(a12.finish("A1.2"));
  rep.entries.push_back(a2.finish("A2"));
  rep.entries.push_back(a3.finish("A3"));
  rep.entries.push_back(a4.finish("A4"));

  rep.pass = true;
  for (const auto& e : rep.entries) rep.pass = rep.pass && e.pass;
  return rep;
}

DxHNorms eval_DxH_norms(const LambdaFamily& fam, double p_max, int samples_per_axis) {
  const TorusGrid& grid = fam.grid();
  const double gam = fam.gamma();
  const double lam = fam.lambda;
  const PGrid pg = make_pgrid(grid.dim(), p_max, samples_per_axis);

  const ScalarField da_norm = gradient(fam.base.a).magnitude();
  const ScalarField dv_norm = gradient(fam.base.V).magnitude();
  ScalarField lapa_abs = laplacian(fam.base.a);
  lapa_abs.values = lapa_abs.values.abs();
  ScalarField lapv_abs = laplacian(fam.base.V);
  lapv_abs.values = lapv_abs.values.abs();

  DxHNorms out{da_norm,
               dv_norm,
               lapa_abs,
               lapv_abs,
               {grid, lam * (da_norm.values + dv_norm.values)},
               {grid, lam * (lapa_abs.values + lapv_abs.values)},
               0.0,
               0.0,
               0.0,
               true};

  const Eigen::ArrayXd w = lam * fam.base.a.values + (1.0 - lam);
  const Eigen::ArrayXd lamV = lam * fam.base.V.values;
  // The bounded summand of |D_x H| is charged to the additive constant, the
  // H-growth summand to C*H; same split for |D_xx H|.
  out.c_dx = lam * dv_norm.values.maxCoeff();
  out.c_dxx = lam * lapv_abs.values.maxCoeff();

  Eigen::ArrayXd H(grid.size());
  for (long si = 0; si < pg.count(); ++si) {
    const SmallVec p = pg.sample(si);
    const double pn2 = p.squaredNorm();
    const double pn = std::sqrt(pn2);
    const double s = 1.0 + pn2;
    const double sg2 = std::pow(s, 0.5 * gam);
    const double se1 = std::pow(s, 0.5 * gam - 1.0);
    const double p_gm1 = std::pow(pn, gam - 1.0);
    H = w * sg2 + lamV;

    for (long j = 0; j < grid.size(); ++j) {
      const double num_dx = lam * da_norm.values[j] * sg2;
      const double num_dxx = lam * lapa_abs.values[j] * sg2;
      if (H[j] > 0.0) {
        out.c_dx = std::max(out.c_dx, num_dx / H[j]);
        out.c_dxx = std::max(out.c_dxx, num_dxx / H[j]);
      } else if (num_dx > 0.0 || num_dxx > 0.0) {
        out.feasible = false;
      }
    }

    // |D^2_xp H| = gam * s^(gam/2-1) * |p| * lam * |Da|  (outer-product norm).
    const double cross = gam * se1 * pn * lam * da_norm.values.maxCoeff();
    out.c_dxp = std::max(out.c_dxp, cross / (1.0 + p_gm1));
  }
  return out;
}

}  // namespace mfg
