#include "mfg/coupling.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mfg/errors.hpp"

namespace mfg {

CouplingSpec CouplingSpec::power(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("CouplingSpec: alpha must be > 0");
  return {CouplingKind::Power, alpha};
}

CouplingSpec CouplingSpec::log() { return {CouplingKind::Log, 0.0}; }

namespace {

void check_domain(const CouplingSpec& c, double m_min) {
  if (c.kind == CouplingKind::Log) {
    if (!(m_min >= kMFloor)) {
      std::ostringstream os;
      os << "log coupling evaluated at m = " << m_min << " below floor " << kMFloor;
      throw PositivityError(os.str());
    }
  } else if (!(m_min > 0.0)) {
    throw PositivityError("power coupling evaluated at nonpositive m");
  }
}

}  // namespace

double g(const CouplingSpec& c, double m) {
  check_domain(c, m);
  return c.kind == CouplingKind::Power ? std::pow(m, c.alpha) : std::log(m);
}

double g_prime(const CouplingSpec& c, double m) {
  check_domain(c, m);
  return c.kind == CouplingKind::Power ? c.alpha * std::pow(m, c.alpha - 1.0) : 1.0 / m;
}

ScalarField g_field(const CouplingSpec& c, const ScalarField& m) {
  check_domain(c, m.values.minCoeff());
  if (c.kind == CouplingKind::Power) return {m.grid, m.values.pow(c.alpha)};
  return {m.grid, m.values.log()};
}

ScalarField g_prime_field(const CouplingSpec& c, const ScalarField& m) {
  check_domain(c, m.values.minCoeff());
  if (c.kind == CouplingKind::Power) return {m.grid, c.alpha * m.values.pow(c.alpha - 1.0)};
  return {m.grid, m.values.inverse()};
}

GateResult check_coupling_gate(const CouplingSpec& c, double gamma, int dim) {
  if (!(gamma > 1.0)) throw std::invalid_argument("check_coupling_gate: gamma must be > 1");
  if (dim < 1 || dim > 3) throw std::invalid_argument("check_coupling_gate: dim must be 1, 2 or 3");
  GateResult r;
  if (c.kind == CouplingKind::Power) {
    r.bound = gamma / (dim * (gamma - 1.0));
    r.pass = c.alpha <= r.bound;  // non-strict, as printed
    r.rule = "A7: alpha <= gamma/(d(gamma-1))";
    r.small_m_caveat = c.alpha < 1.0;
  } else {
    r.bound = (dim == 1) ? std::numeric_limits<double>::infinity()
                         : 2.0 + 1.0 / (dim - 1.0);
    r.pass = gamma < r.bound;  // strict, as printed
    r.rule = "A8: 1 < gamma < 2 + 1/(d-1)";
  }
  return r;
}

}  // namespace mfg
