#include "mfg/torus_grid.hpp"

#include <cmath>
#include <limits>

namespace mfg {

namespace {

void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
  if (a != b) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

ScalarField VectorField::magnitude() const {
  Eigen::ArrayXd m2 = comp[0] * comp[0];
  for (int k = 1; k < grid.dim(); ++k) m2 += comp[k] * comp[k];
  return {grid, m2.sqrt()};
}

Eigen::ArrayXd shifted(const TorusGrid& g, const Eigen::ArrayXd& v, int axis, int offset) {
  const int n = g.points_per_axis();
  const long stride = g.stride(axis);
  const long block = stride * n;
  Eigen::ArrayXd out(v.size());
  for (long base = 0; base < g.size(); base += block) {
    for (int i = 0; i < n; ++i) {
      int ip = (i + offset) % n;
      if (ip < 0) ip += n;
      const long dst = base + static_cast<long>(i) * stride;
      const long src = base + static_cast<long>(ip) * stride;
      out.segment(dst, stride) = v.segment(src, stride);
    }
  }
  return out;
}

double compensated_sum(const Eigen::ArrayXd& v) {
  double sum = 0.0;
  double comp = 0.0;
  for (long i = 0; i < v.size(); ++i) {
    const double x = v[i];
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

VectorField gradient(const ScalarField& f) {
  const TorusGrid& g = f.grid;
  const double scale = 0.5 * g.points_per_axis();  // 1/(2h)
  VectorField out(g);
  for (int k = 0; k < g.dim(); ++k) {
    // Single subtraction per node: the same rounded edge values telescope
    // exactly in the summation-by-parts identity.
    out.comp[k] = (shifted(g, f.values, k, +1) - shifted(g, f.values, k, -1)) * scale;
  }
  return out;
}

ScalarField divergence(const VectorField& F) {
  const TorusGrid& g = F.grid;
  const double scale = 0.5 * g.points_per_axis();
  Eigen::ArrayXd acc = shifted(g, F.comp[0], 0, +1) - shifted(g, F.comp[0], 0, -1);
  for (int k = 1; k < g.dim(); ++k)
    acc += shifted(g, F.comp[k], k, +1) - shifted(g, F.comp[k], k, -1);
  return {g, acc * scale};
}

ScalarField laplacian(const ScalarField& f) {
  const TorusGrid& g = f.grid;
  const double n = g.points_per_axis();
  const double scale = n * n;  // 1/h^2
  // Evaluated as (f+ - f) + (f- - f): each edge difference appears once with
  // each sign across the grid, so the discrete mass identity sum_x lap(f) = 0
  // survives rounding.
  Eigen::ArrayXd acc =
      (shifted(g, f.values, 0, +1) - f.values) + (shifted(g, f.values, 0, -1) - f.values);
  for (int k = 1; k < g.dim(); ++k)
    acc += (shifted(g, f.values, k, +1) - f.values) + (shifted(g, f.values, k, -1) - f.values);
  return {g, acc * scale};
}

double integrate(const ScalarField& f) {
  return compensated_sum(f.values) / static_cast<double>(f.grid.size());
}

double lp_norm(const ScalarField& f, double p) {
  if (std::isinf(p)) return f.values.abs().maxCoeff();
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
  if (p == 1.0) return integrate({f.grid, f.values.abs()});
  ScalarField powed{f.grid, f.values.abs().pow(p)};
  return std::pow(integrate(powed), 1.0 / p);
}

ScalarField mean_zero_project(const ScalarField& f) {
  return {f.grid, f.values - integrate(f)};
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid);
  return compensated_sum(a.values * b.values) / static_cast<double>(a.grid.size());
}

double inner(const VectorField& A, const VectorField& B) {
  require_same_grid(A.grid, B.grid);
  double s = 0.0;
  for (int k = 0; k < A.grid.dim(); ++k)
    s += compensated_sum(A.comp[k] * B.comp[k]) / static_cast<double>(A.grid.size());
  return s;
}

}  // namespace mfg
