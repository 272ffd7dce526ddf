#include "mfg/mfg_system.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfg/errors.hpp"

namespace mfg {

Eigen::VectorXd ResidualVector::ordered() const {
  const long n_nodes = fp_block.size();
  Eigen::VectorXd r(2 * n_nodes + 1);
  r.segment(0, n_nodes) = fp_block.matrix();
  r[0] = -mass_gap;  // integrate(m) - 1
  r.segment(n_nodes, n_nodes) = hjb_block.matrix();
  r[2 * n_nodes] = mean_u;
  return r;
}

ResidualVector residual(const LambdaFamily& fam, const CouplingSpec& c, const Solution& v) {
  const TorusGrid& grid = fam.grid();
  if (v.u.grid != grid || v.m.grid != grid)
    throw std::invalid_argument("residual: solution grid mismatch");

  const VectorField Du = gradient(v.u);
  const ScalarField H = hamiltonian_field(fam, Du);
  const ScalarField gm = g_field(c, v.m);  // throws PositivityError below floor

  VectorField flux = drift_field(fam, Du);
  for (int k = 0; k < grid.dim(); ++k) flux.comp[k] *= v.m.values;

  ResidualVector r;
  r.hjb_block = laplacian(v.u).values + (H.values - gm.values - v.hbar);
  r.fp_block = laplacian(v.m).values - divergence(flux).values;
  r.mass_gap = 1.0 - integrate(v.m);
  r.mean_u = integrate(v.u);
  return r;
}

Eigen::SparseMatrix<double> assemble_jacobian(const LambdaFamily& fam, const CouplingSpec& c,
                                              const Solution& v) {
  const TorusGrid& grid = fam.grid();
  const long N = grid.size();
  const int d = grid.dim();
  const double n = grid.points_per_axis();
  const double lap_scale = n * n;
  const double grad_scale = 0.5 * n;
  const double vol = grid.cell_volume();

  const VectorField Du = gradient(v.u);
  const VectorField dph = drift_field(fam, Du);
  const HessianCoeffs hc = hessian_coeffs(fam, Du);
  const ScalarField gp = g_prime_field(c, v.m);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(N) * (4 * d * d + 6 * d + 6) + 2 * N);

  for (long j = 0; j < N; ++j) {
    if (j == 0) {
      // Mass constraint replaces the (rank-deficient) FP row at node 0.
      for (long col = 0; col < N; ++col) trips.emplace_back(0, static_cast<int>(N + col), vol);
    } else {
      const int row = static_cast<int>(j);
      // dm: laplacian
      trips.emplace_back(row, static_cast<int>(N + j), -2.0 * d * lap_scale);
      for (int k = 0; k < d; ++k) {
        trips.emplace_back(row, static_cast<int>(N + grid.neighbor(j, k, +1)), lap_scale);
        trips.emplace_back(row, static_cast<int>(N + grid.neighbor(j, k, -1)), lap_scale);
      }
      // dm: -div(D_pH dm)
      for (int k = 0; k < d; ++k) {
        const long jp = grid.neighbor(j, k, +1);
        const long jm = grid.neighbor(j, k, -1);
        trips.emplace_back(row, static_cast<int>(N + jp), -grad_scale * dph.comp[k][jp]);
        trips.emplace_back(row, static_cast<int>(N + jm), grad_scale * dph.comp[k][jm]);
      }
      // du: -div(m D^2_pp H grad(du)); D^2_pp H = c_iso I + c_rank1 Du Du^T
      for (int k = 0; k < d; ++k) {
        for (int s1 = -1; s1 <= 1; s1 += 2) {
          const long y = grid.neighbor(j, k, s1);
          const double outer = -grad_scale * s1 * v.m.values[y];
          for (int l = 0; l < d; ++l) {
            double b_kl = hc.c_rank1[y] * Du.comp[k][y] * Du.comp[l][y];
            if (k == l) b_kl += hc.c_iso[y];
            const double val = outer * b_kl * grad_scale;
            if (val == 0.0) continue;
            trips.emplace_back(row, static_cast<int>(grid.neighbor(y, l, +1)), val);
            trips.emplace_back(row, static_cast<int>(grid.neighbor(y, l, -1)), -val);
          }
        }
      }
    }

    // HJB row: lap(du) + D_pH . grad(du) - g'(m) dm - dhbar
    const int row = static_cast<int>(N + j);
    trips.emplace_back(row, static_cast<int>(j), -2.0 * d * lap_scale);
    for (int k = 0; k < d; ++k) {
      trips.emplace_back(row, static_cast<int>(grid.neighbor(j, k, +1)),
                         lap_scale + grad_scale * dph.comp[k][j]);
      trips.emplace_back(row, static_cast<int>(grid.neighbor(j, k, -1)),
                         lap_scale - grad_scale * dph.comp[k][j]);
    }
    trips.emplace_back(row, static_cast<int>(N + j), -gp.values[j]);
    trips.emplace_back(row, static_cast<int>(2 * N), -1.0);
  }

  // Mean-u row, paired with the dhbar column.
  for (long col = 0; col < N; ++col)
    trips.emplace_back(static_cast<int>(2 * N), static_cast<int>(col), vol);

  Eigen::SparseMatrix<double> J(2 * N + 1, 2 * N + 1);
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& rhs) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(J);
  lu.factorize(J);
  if (lu.info() != Eigen::Success) throw LinearSolveError("sparse LU factorization failed");

  Eigen::VectorXd x = lu.solve(rhs);
  Eigen::VectorXd r = rhs - J * x;
  x += lu.solve(r).eval();  // one refinement pass
  r = rhs - J * x;

  const double tol = std::max(1e-10, 1e-10 * rhs.lpNorm<Eigen::Infinity>());
  const double res = r.lpNorm<Eigen::Infinity>();
  if (!(res <= tol)) throw LinearSolveError("linear solve residual " + std::to_string(res) +
                                            " exceeds contract " + std::to_string(tol));
  return x;
}

}  // namespace mfg
