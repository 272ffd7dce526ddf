#pragma once

#include <string>

#include "mfg/torus_grid.hpp"

namespace mfg {

/// Builds a coefficient field from a preset expression. Terms joined by '+':
///   const:c      -> c
///   sin:k:A      -> A sin(2 pi k x1)
///   cos2d:k:A    -> A cos(2 pi k x1) cos(2 pi k x2)   (dim >= 2)
/// e.g. "const:1+sin:1:0.2". Throws ConfigError on malformed input.
ScalarField make_preset_field(const std::string& spec, const TorusGrid& grid);

}  // namespace mfg
