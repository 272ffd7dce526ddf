#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mfg/mfg_system.hpp"

namespace mfg {

/// Scheduling constants of the damped Newton / homotopy driver.
struct SolverConfig {
  double newton_tol = 1e-10;        // sup-norm target for the constrained residual
  int max_newton_iters = 30;
  double lambda_step_init = 0.125;  // also the cap when the step grows back
  double lambda_step_min = 1e-4;
  double positivity_kappa = 0.1;    // fraction-to-the-boundary guard on m
  double armijo_c = 1e-4;
  int max_backtracks = 20;

  // Gate enforcement (A1-A8) ahead of a continuation run.
  bool enforce_gates = true;
  double gate_p_max = 10.0;
  int gate_samples_per_axis = 33;
  double gate_delta_min = 1e-8;

  // Retain the accepted solution at every lambda record (for per-record
  // diagnostics sweeps).
  bool keep_solutions = false;

  void validate() const;
};

/// Per-iterate bookkeeping of one Newton solve.
struct IterateRecord {
  double residual_sup;
  double mass;     // integrate(m)
  double mean_u;   // integrate(u)
  double m_min;
  double step;     // accepted line-search step
};

struct NewtonStats {
  int iterations = 0;
  double residual_sup = 0.0;
  std::vector<double> residual_history;  // includes the initial residual
  std::vector<IterateRecord> iterates;   // accepted iterates only
};

struct NewtonFailure : std::runtime_error {
  NewtonFailure(const std::string& msg, Solution last_, int iterations_, double residual_sup_)
      : std::runtime_error(msg), last(std::move(last_)), iterations(iterations_),
        residual_sup(residual_sup_) {}
  Solution last;
  int iterations;
  double residual_sup;
};

/// One record per accepted continuation step (the lambda = 0 starting point
/// included, with zero iterations).
struct TraceRecord {
  double lambda;
  int newton_iters;
  double residual_sup;
  double hbar;
  double m_min;
  double m_linf;
  double du_l2;
};

struct ContinuationTrace {
  std::vector<TraceRecord> records;
  std::vector<std::string> warnings;
  std::vector<Solution> solutions;  // populated when SolverConfig::keep_solutions
  Solution final_solution;
};

struct StepCollapse : std::runtime_error {
  StepCollapse(const std::string& msg, ContinuationTrace partial_)
      : std::runtime_error(msg), partial(std::move(partial_)) {}
  ContinuationTrace partial;
};

/// The lambda = 0 solution: u = 0, m = 1, hbar = H_0(x,0) - g(1) = 1 - g(1).
Solution initial_solution(const CouplingSpec& c, const TorusGrid& grid);

/// Damped Newton at fixed lambda (taken from fam). Steps are halved until the
/// positivity guard min(m + s dm) >= kappa * min(m) and a sup-norm Armijo
/// decrease both hold; after each accepted step u is re-projected to mean zero
/// and m rescaled to unit mass. Throws NewtonFailure (carrying the last
/// iterate) on nonconvergence, PositivityError if v0 lacks a positive density.
Solution newton_solve(const LambdaFamily& fam, const CouplingSpec& c, const Solution& v0,
                      const SolverConfig& cfg, NewtonStats* stats = nullptr);

/// Homotopy march lambda: 0 -> 1 with zeroth-order predictor and adaptive
/// step: halve on Newton failure, grow by 1.5x (capped at lambda_step_init)
/// on success. Throws GateError if enforced gates fail, StepCollapse
/// (carrying the partial trace) once the step falls below lambda_step_min.
ContinuationTrace continuation_solve(const HamiltonianSpec& base, const CouplingSpec& c,
                                     const TorusGrid& grid, const SolverConfig& cfg);

}  // namespace mfg
