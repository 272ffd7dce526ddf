#include "mfg/newton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfg/errors.hpp"

namespace mfg {

void SolverConfig::validate() const {
  if (!(newton_tol > 0.0) || !(lambda_step_init > 0.0) || !(lambda_step_min > 0.0) ||
      !(armijo_c > 0.0))
    throw std::invalid_argument("SolverConfig: tolerances and steps must be positive");
  if (!(positivity_kappa > 0.0 && positivity_kappa < 1.0))
    throw std::invalid_argument("SolverConfig: positivity_kappa must be in (0,1)");
  if (max_newton_iters < 1 || max_backtracks < 1)
    throw std::invalid_argument("SolverConfig: iteration limits must be >= 1");
}

Solution initial_solution(const CouplingSpec& c, const TorusGrid& grid) {
  Solution v{ScalarField::zero(grid), ScalarField::constant(grid, 1.0), 0.0, 0.0};
  v.hbar = 1.0 - g(c, 1.0);  // H_0(x,0) = (1+0)^(gamma/2) = 1
  return v;
}

namespace {

void check_entry_positivity(const CouplingSpec& c, const Solution& v) {
  const double m_min = v.m.values.minCoeff();
  const double floor = c.kind == CouplingKind::Log ? kMFloor : 0.0;
  if (!(m_min > floor)) {
    std::ostringstream os;
    os << "newton_solve: initial density min " << m_min << " not above " << floor;
    throw PositivityError(os.str());
  }
}

/// Mean-zero projection of u and unit-mass rescale of m; with the constraint
/// rows active these corrections are round-off sized.
void renormalize(Solution& v) {
  v.u = mean_zero_project(v.u);
  const double mass = integrate(v.m);
  v.m.values /= mass;
}

TraceRecord make_record(const Solution& v, int iters, double residual_sup) {
  TraceRecord r;
  r.lambda = v.lambda;
  r.newton_iters = iters;
  r.residual_sup = residual_sup;
  r.hbar = v.hbar;
  r.m_min = v.m.values.minCoeff();
  r.m_linf = v.m.values.abs().maxCoeff();
  r.du_l2 = lp_norm(gradient(v.u).magnitude(), 2.0);
  return r;
}

}  // namespace

Solution newton_solve(const LambdaFamily& fam, const CouplingSpec& c, const Solution& v0,
                      const SolverConfig& cfg, NewtonStats* stats) {
  cfg.validate();
  check_entry_positivity(c, v0);

  Solution v = v0;
  v.lambda = fam.lambda;
  const long N = fam.grid().size();

  Eigen::VectorXd r = residual(fam, c, v).ordered();
  double rnorm = r.lpNorm<Eigen::Infinity>();
  if (stats) {
    stats->iterations = 0;
    stats->residual_sup = rnorm;
    stats->residual_history = {rnorm};
    stats->iterates.clear();
  }
  if (rnorm <= cfg.newton_tol) return v;  // v0 returned unchanged

  for (int iter = 1; iter <= cfg.max_newton_iters; ++iter) {
    const Eigen::SparseMatrix<double> J = assemble_jacobian(fam, c, v);
    const Eigen::VectorXd delta = solve_linear(J, -r);

    const double m_min = v.m.values.minCoeff();
    const Eigen::ArrayXd du = delta.segment(0, N).array();
    const Eigen::ArrayXd dm = delta.segment(N, N).array();
    const double dhbar = delta[2 * N];

    double step = 1.0;
    bool accepted = false;
    Solution trial = v;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt, step *= 0.5) {
      if (!((v.m.values + step * dm).minCoeff() >= cfg.positivity_kappa * m_min)) continue;
      trial.u.values = v.u.values + step * du;
      trial.m.values = v.m.values + step * dm;
      trial.hbar = v.hbar + step * dhbar;
      double trial_norm;
      try {
        trial_norm = residual(fam, c, trial).ordered().lpNorm<Eigen::Infinity>();
      } catch (const PositivityError&) {
        continue;  // m dipped below the log floor; shorten the step
      }
      if (trial_norm <= (1.0 - cfg.armijo_c * step) * rnorm) {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw NewtonFailure("newton_solve: line search exhausted " +
                              std::to_string(cfg.max_backtracks) + " backtracks",
                          v, iter - 1, rnorm);

    v = trial;
    renormalize(v);
    r = residual(fam, c, v).ordered();
    rnorm = r.lpNorm<Eigen::Infinity>();
    if (stats) {
      stats->iterations = iter;
      stats->residual_sup = rnorm;
      stats->residual_history.push_back(rnorm);
      stats->iterates.push_back(
          {rnorm, integrate(v.m), integrate(v.u), v.m.values.minCoeff(), step});
    }
    if (rnorm <= cfg.newton_tol) return v;
  }
  throw NewtonFailure("newton_solve: no convergence in " + std::to_string(cfg.max_newton_iters) +
                          " iterations",
                      v, cfg.max_newton_iters, rnorm);
}

ContinuationTrace continuation_solve(const HamiltonianSpec& base, const CouplingSpec& c,
                                     const TorusGrid& grid, const SolverConfig& cfg) {
  cfg.validate();
  if (base.a.grid != grid) throw std::invalid_argument("continuation_solve: grid mismatch");

  ContinuationTrace trace;
  if (cfg.enforce_gates) {
    const GateResult gate = check_coupling_gate(c, base.gamma, grid.dim());
    if (!gate.pass) {
      std::ostringstream os;
      os << "coupling gate failed (" << gate.rule << "), bound " << gate.bound;
      throw GateError(os.str());
    }
    const AssumptionReport rep =
        check_assumptions(LambdaFamily(base, 1.0), cfg.gate_p_max, cfg.gate_samples_per_axis,
                          cfg.gate_delta_min);
    if (!rep.pass) {
      std::string failed;
      for (const auto& e : rep.entries)
        if (!e.pass) failed += (failed.empty() ? "" : ", ") + e.id;
      throw GateError("Hamiltonian assumptions failed: " + failed);
    }
  } else {
    trace.warnings.push_back("gates overridden: A1-A8 were not enforced for this run");
  }

  Solution v = initial_solution(c, grid);
  {
    const LambdaFamily fam0(base, 0.0);
    const double r0 = residual(fam0, c, v).sup_norm();
    trace.records.push_back(make_record(v, 0, r0));
    if (cfg.keep_solutions) trace.solutions.push_back(v);
  }

  double lambda = 0.0;
  double step = cfg.lambda_step_init;
  while (lambda < 1.0) {
    const double target = std::min(1.0, lambda + step);
    const LambdaFamily fam(base, target);
    try {
      NewtonStats st;
      Solution next = newton_solve(fam, c, v, cfg, &st);
      v = next;
      lambda = target;
      trace.records.push_back(make_record(v, st.iterations, st.residual_sup));
      if (cfg.keep_solutions) trace.solutions.push_back(v);
      step = std::min(step * 1.5, cfg.lambda_step_init);
    } catch (const NewtonFailure&) {
      step *= 0.5;
    } catch (const LinearSolveError&) {
      step *= 0.5;
    } catch (const PositivityError&) {
      step *= 0.5;
    }
    if (lambda < 1.0 && step < cfg.lambda_step_min) {
      trace.final_solution = v;
      std::ostringstream os;
      os << "continuation step collapsed below " << cfg.lambda_step_min << " at lambda = "
         << lambda;
      throw StepCollapse(os.str(), trace);
    }
  }
  trace.final_solution = v;
  return trace;
}

}  // namespace mfg
