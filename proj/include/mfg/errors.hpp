#pragma once

#include <stdexcept>
#include <string>

namespace mfg {

/// Loss of strict positivity of the density (or log evaluation below floor).
struct PositivityError : std::runtime_error {
  explicit PositivityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Sparse factorization failed or the solve missed its residual contract.
struct LinearSolveError : std::runtime_error {
  explicit LinearSolveError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An enforced A1-A8 gate rejected the problem.
struct GateError : std::runtime_error {
  explicit GateError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed configuration, preset, or input file.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mfg
