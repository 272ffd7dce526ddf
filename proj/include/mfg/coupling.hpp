#pragma once

#include <string>

#include "mfg/torus_grid.hpp"

namespace mfg {

/// Hard floor for logarithmic couplings; evaluation below it is an error,
/// never a clamp, so loss of positivity upstream cannot pass silently.
inline constexpr double kMFloor = 1e-12;

enum class CouplingKind { Power, Log };

/// The coupling nonlinearity g: m^alpha (Power) or ln m (Log).
struct CouplingSpec {
  CouplingKind kind = CouplingKind::Power;
  double alpha = 1.0;  // Power only

  static CouplingSpec power(double alpha);
  static CouplingSpec log();
};

double g(const CouplingSpec& c, double m);
double g_prime(const CouplingSpec& c, double m);

/// Nodewise g(m); throws PositivityError on any node below the domain floor.
ScalarField g_field(const CouplingSpec& c, const ScalarField& m);
ScalarField g_prime_field(const CouplingSpec& c, const ScalarField& m);

/// Exponent gate A7 (Power: alpha <= gamma/(d(gamma-1)), non-strict) or
/// A8 (Log: gamma < 2 + 1/(d-1), strict; unbounded for d = 1).
struct GateResult {
  bool pass = false;
  double bound = 0.0;  // the binding bound value (+inf when unbounded)
  std::string rule;
  /// Informational only: for Power with alpha < 1 the representative m^alpha
  /// does not satisfy the small-m branch g <= C m of A6.a near zero.
  bool small_m_caveat = false;
};

GateResult check_coupling_gate(const CouplingSpec& c, double gamma, int dim);

}  // namespace mfg
