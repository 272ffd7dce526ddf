#include "mfg/presets.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "mfg/errors.hpp"

namespace mfg {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("preset: bad number '" + tok + "' in " + context);
  }
}

}  // namespace

ScalarField make_preset_field(const std::string& spec, const TorusGrid& grid) {
  const std::string trimmed = trim(spec);
  if (trimmed.empty()) throw ConfigError("preset: empty expression");

  constexpr double two_pi = 2.0 * std::numbers::pi;
  ScalarField out = ScalarField::zero(grid);
  for (const std::string& raw : split(trimmed, '+')) {
    const std::string term = trim(raw);
    const std::vector<std::string> parts = split(term, ':');
    const std::string& name = parts[0];
    if (name == "const") {
      if (parts.size() != 2) throw ConfigError("preset: const expects const:c, got '" + term + "'");
      out.values += parse_number(parts[1], term);
    } else if (name == "sin") {
      if (parts.size() != 3) throw ConfigError("preset: sin expects sin:k:A, got '" + term + "'");
      const double k = parse_number(parts[1], term);
      const double amp = parse_number(parts[2], term);
      out.values += map_coords(grid, [&](double x0, double, double) {
                      return amp * std::sin(two_pi * k * x0);
                    }).values;
    } else if (name == "cos2d") {
      if (parts.size() != 3)
        throw ConfigError("preset: cos2d expects cos2d:k:A, got '" + term + "'");
      if (grid.dim() < 2) throw ConfigError("preset: cos2d requires dim >= 2");
      const double k = parse_number(parts[1], term);
      const double amp = parse_number(parts[2], term);
      out.values += map_coords(grid, [&](double x0, double x1, double) {
                      return amp * std::cos(two_pi * k * x0) * std::cos(two_pi * k * x1);
                    }).values;
    } else {
      throw ConfigError("preset: unknown term '" + term + "'");
    }
  }
  return out;
}

}  // namespace mfg
