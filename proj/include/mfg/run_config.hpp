#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "mfg/coupling.hpp"
#include "mfg/diagnostics.hpp"
#include "mfg/newton.hpp"

namespace mfg {

struct ProblemConfig {
  int dim = 1;
  int n = 64;
  double gamma = 2.0;
  std::string a_preset = "const:1";
  std::string v_preset = "const:0";
  CouplingSpec coupling = CouplingSpec::power(1.0);
};

struct DiagnosticsConfig {
  std::optional<double> moser_p;
  std::optional<double> bernstein_p;
  std::optional<double> log_p;
  std::optional<double> log_q;
  std::optional<double> l;
  double two_star_eff = 10.0;
};

struct OutputConfig {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
};

/// Everything a batch run needs. Gate enforcement lives in solver.enforce_gates.
struct RunConfig {
  ProblemConfig problem;
  SolverConfig solver;
  DiagnosticsConfig diagnostics;
  OutputConfig output;
};

/// Parses the config.json schema (schema_version 1); throws ConfigError.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_json(const RunConfig& cfg);

TorusGrid make_grid(const ProblemConfig& p);
HamiltonianSpec make_hamiltonian(const ProblemConfig& p);

/// solution.json: {schema_version, dim, n, gamma, lambda, hbar, coupling, u, m}.
/// Doubles serialize with shortest round-trip representation; write-then-read
/// reproduces every field bitwise.
void write_solution_json(const std::filesystem::path& path, const Solution& v,
                         const ProblemConfig& problem);

struct LoadedSolution {
  Solution solution;
  int dim = 0;
  int n = 0;
  double gamma = 0.0;
  CouplingSpec coupling;
};
LoadedSolution read_solution_json(const std::filesystem::path& path);

std::string trace_csv_string(const ContinuationTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const ContinuationTrace& trace);

std::string diagnostics_json_string(const DiagnosticsReport& rep,
                                    const std::vector<std::string>& warnings = {});
void write_diagnostics_json(const std::filesystem::path& path, const DiagnosticsReport& rep,
                            const std::vector<std::string>& warnings = {});

/// Full report: basic bounds, energy identity, recomputed residual sup-norm,
/// the optional Moser/Bernstein/log-integrability records per the config, and the
/// quadratic-log oracle whenever the run matches its configuration.
DiagnosticsReport compute_report(const LambdaFamily& fam, const CouplingSpec& c,
                                 const Solution& v, const DiagnosticsConfig& cfg);

/// 17-significant-digit decimal, round-trip exact for 64-bit floats.
std::string format_double(double x);

}  // namespace mfg
