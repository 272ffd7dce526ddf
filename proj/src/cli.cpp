#include "mfg/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "mfg/errors.hpp"

namespace mfg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  if (!fs::is_directory(dir)) throw ConfigError(dir.string() + " is not a directory");
}

json assumption_json(const AssumptionReport& rep) {
  json entries = json::array();
  for (const auto& e : rep.entries) {
    json worst;
    worst["x_index"] = e.worst_node;
    worst["p"] = std::vector<double>(e.worst_p.data(), e.worst_p.data() + e.worst_p.size());
    entries.push_back(
        {{"id", e.id}, {"fitted_C", e.fitted_c}, {"pass", e.pass}, {"worst", worst}});
  }
  return {{"entries", entries},
          {"min_hessian_eigenvalue", rep.min_hessian_eigenvalue},
          {"delta_min", rep.delta_min},
          {"p_max", rep.p_max},
          {"samples_per_axis", rep.samples_per_axis},
          {"pass", rep.pass}};
}

json gate_json(const GateResult& gate, const CouplingSpec& c, double gamma, int dim) {
  json g;
  g["kind"] = c.kind == CouplingKind::Power ? "power" : "log";
  g["gamma"] = gamma;
  g["dim"] = dim;
  if (c.kind == CouplingKind::Power) g["alpha"] = c.alpha;
  g["rule"] = gate.rule;
  g["bound"] = gate.bound;
  g["pass"] = gate.pass;
  if (gate.small_m_caveat)
    g["note"] = "alpha < 1: m^alpha does not satisfy the small-m branch of A6.a near zero";
  return g;
}

/// One sweep.csv row; numeric fields are NaN until filled.
struct SweepRow {
  std::string axis;
  std::string value;
  int status = 0;
  double lambda = kNan, iters = kNan, residual = kNan, hbar = kNan, m_min = kNan, m_linf = kNan,
         m_linf_max = kNan, du_l2 = kNan, int_g = kNan, int_gm = kNan, kinetic = kNan,
         lnm_l1 = kNan, moser_ratio = kNan, bernstein_ratio = kNan, log_ratio = kNan,
         log_slack = kNan, quad_log_oracle = kNan;
};

const char* kSweepHeader =
    "axis,value,status,lambda,iters,residual,hbar,m_min,m_linf,m_linf_max,du_l2,int_g,int_gm,"
    "kinetic,lnm_l1,moser_ratio,bernstein_ratio,log_ratio,log_slack,quad_log_oracle";

void append_row(std::ostringstream& os, const SweepRow& r) {
  os << r.axis << ',' << r.value << ',' << r.status;
  for (double x : {r.lambda, r.iters, r.residual, r.hbar, r.m_min, r.m_linf, r.m_linf_max,
                   r.du_l2, r.int_g, r.int_gm, r.kinetic, r.lnm_l1, r.moser_ratio,
                   r.bernstein_ratio, r.log_ratio, r.log_slack, r.quad_log_oracle})
    os << ',' << format_double(x);
  os << '\n';
}

void fill_from_report(SweepRow& row, const DiagnosticsReport& rep) {
  row.hbar = rep.hbar;
  row.m_min = rep.m_min;
  row.m_linf = rep.m_linf;
  row.int_g = rep.int_g;
  row.int_gm = rep.int_gm;
  row.kinetic = rep.kinetic;
  row.lnm_l1 = rep.lnm_l1;
  if (rep.moser) row.moser_ratio = rep.moser->ratio;
  if (rep.bernstein) row.bernstein_ratio = rep.bernstein->ratio;
  if (rep.log_integrability) {
    row.log_ratio = rep.log_integrability->ratio;
    row.log_slack = rep.log_integrability->slack;
  }
  if (rep.quad_log_oracle) row.quad_log_oracle = *rep.quad_log_oracle;
}

/// Runs one continuation; writes per-run artifacts into `dir`; returns the
/// exit status the standalone solve would have had.
int solve_into(const RunConfig& cfg, const fs::path& dir, ContinuationTrace* trace_out,
               DiagnosticsReport* report_out, std::ostream& err) {
  try {
    const HamiltonianSpec ham = make_hamiltonian(cfg.problem);
    const TorusGrid grid = ham.a.grid;
    ensure_directory(dir);
    ContinuationTrace trace;
    try {
      trace = continuation_solve(ham, cfg.problem.coupling, grid, cfg.solver);
    } catch (const StepCollapse& e) {
      if (cfg.output.csv) write_trace_csv(dir / "trace.csv", e.partial);
      err << "numerical failure: " << e.what() << "\n";
      if (trace_out) *trace_out = e.partial;
      return 3;
    }
    const LambdaFamily fam(ham, 1.0);
    const DiagnosticsReport rep =
        compute_report(fam, cfg.problem.coupling, trace.final_solution, cfg.diagnostics);
    if (cfg.output.csv) write_trace_csv(dir / "trace.csv", trace);
    if (cfg.output.json) {
      write_solution_json(dir / "solution.json", trace.final_solution, cfg.problem);
      write_diagnostics_json(dir / "diagnostics.json", rep, trace.warnings);
    }
    if (trace_out) *trace_out = trace;
    if (report_out) *report_out = rep;
    return 0;
  } catch (const GateError& e) {
    err << "gate failure: " << e.what() << "\n";
    return 1;
  } catch (const NewtonFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const LinearSolveError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const PositivityError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const HamiltonianSpec ham = make_hamiltonian(cfg.problem);
    const GateResult gate =
        check_coupling_gate(cfg.problem.coupling, cfg.problem.gamma, cfg.problem.dim);
    const LambdaFamily fam(ham, 1.0);
    const AssumptionReport rep = check_assumptions(fam, cfg.solver.gate_p_max,
                                                   cfg.solver.gate_samples_per_axis,
                                                   cfg.solver.gate_delta_min);
    const DxHNorms dx = eval_DxH_norms(fam, cfg.solver.gate_p_max,
                                       cfg.solver.gate_samples_per_axis);
    json j;
    j["schema_version"] = 1;
    j["assumptions"] = assumption_json(rep);
    j["dx_norms"] = {{"c_dx", dx.c_dx}, {"c_dxx", dx.c_dxx}, {"c_dxp", dx.c_dxp},
                     {"feasible", dx.feasible}};
    j["gate"] = gate_json(gate, cfg.problem.coupling, cfg.problem.gamma, cfg.problem.dim);
    const bool pass = rep.pass && gate.pass && dx.feasible;
    j["pass"] = pass;
    out << j.dump(2) << "\n";
    return pass ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ContinuationTrace trace;
  const int status = solve_into(cfg, cfg.output.directory, &trace, nullptr, err);
  if (status == 0) {
    const TraceRecord& last = trace.records.back();
    out << "reached lambda=1 in " << trace.records.size() - 1 << " steps, residual "
        << format_double(last.residual_sup) << ", hbar " << format_double(last.hbar) << "\n";
  }
  return status;
}

int cmd_sweep(const RunConfig& cfg, const std::string& axis,
              const std::vector<std::string>& values, std::ostream& out, std::ostream& err) {
  const bool per_lambda = axis == "lambda-record";
  if (axis != "gamma" && axis != "alpha" && axis != "n" && !per_lambda) {
    err << "error: unknown sweep axis '" << axis << "'\n";
    return 2;
  }
  if (!per_lambda && values.empty()) {
    err << "error: empty sweep value list\n";
    return 2;
  }
  if (axis == "alpha" && cfg.problem.coupling.kind != CouplingKind::Power) {
    err << "error: alpha sweep requires the power coupling\n";
    return 2;
  }

  std::ostringstream csv;
  csv << kSweepHeader << '\n';
  int worst = 0;

  try {
    ensure_directory(cfg.output.directory);

    if (per_lambda) {
      RunConfig run = cfg;
      run.solver.keep_solutions = true;
      run.output.directory = (fs::path(cfg.output.directory) / "lambda-record").string();
      ContinuationTrace trace;
      const int status = solve_into(run, run.output.directory, &trace, nullptr, err);
      const HamiltonianSpec ham = make_hamiltonian(cfg.problem);
      for (std::size_t i = 0; i < trace.solutions.size(); ++i) {
        const Solution& sol = trace.solutions[i];
        const TraceRecord& rec = trace.records[i];
        SweepRow row;
        row.axis = axis;
        row.value = format_double(sol.lambda);
        row.status = 0;
        row.lambda = sol.lambda;
        row.iters = rec.newton_iters;
        row.residual = rec.residual_sup;
        row.du_l2 = rec.du_l2;
        row.m_linf_max = rec.m_linf;
        const LambdaFamily fam(ham, sol.lambda);
        fill_from_report(row, compute_report(fam, cfg.problem.coupling, sol, cfg.diagnostics));
        append_row(csv, row);
      }
      worst = status;
    } else {
      for (const std::string& token : values) {
        RunConfig run = cfg;
        SweepRow row;
        row.axis = axis;
        row.value = token;
        try {
          if (axis == "gamma")
            run.problem.gamma = std::stod(token);
          else if (axis == "alpha")
            run.problem.coupling = CouplingSpec::power(std::stod(token));
          else
            run.problem.n = std::stoi(token);
        } catch (const std::exception&) {
          err << "error: bad sweep value '" << token << "'\n";
          return 2;
        }
        run.output.directory =
            (fs::path(cfg.output.directory) / (axis + "_" + token)).string();

        ContinuationTrace trace;
        DiagnosticsReport rep;
        row.status = solve_into(run, run.output.directory, &trace, &rep, err);
        if (row.status == 0) {
          const TraceRecord& last = trace.records.back();
          row.lambda = last.lambda;
          double total_iters = 0.0;
          double m_linf_max = 0.0;
          for (const TraceRecord& r : trace.records) {
            total_iters += r.newton_iters;
            m_linf_max = std::max(m_linf_max, r.m_linf);
          }
          row.iters = total_iters;
          row.residual = last.residual_sup;
          row.du_l2 = last.du_l2;
          fill_from_report(row, rep);
          row.m_linf_max = m_linf_max;
        }
        worst = std::max(worst, row.status);
        append_row(csv, row);
      }
    }

    std::ofstream f(fs::path(cfg.output.directory) / "sweep.csv", std::ios::trunc);
    if (!f) throw ConfigError("cannot write sweep.csv");
    f << csv.str();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  out << csv.str();
  return worst == 0 ? 0 : (worst == 2 ? 2 : worst);
}

int cmd_diagnose(const std::string& solution_path, const RunConfig& cfg, std::ostream& out,
                 std::ostream& err) {
  try {
    const LoadedSolution loaded = read_solution_json(solution_path);
    if (loaded.dim != cfg.problem.dim || loaded.n != cfg.problem.n ||
        loaded.gamma != cfg.problem.gamma ||
        loaded.coupling.kind != cfg.problem.coupling.kind ||
        (loaded.coupling.kind == CouplingKind::Power &&
         loaded.coupling.alpha != cfg.problem.coupling.alpha))
      throw ConfigError("solution.json problem fields do not match the config");

    const HamiltonianSpec ham = make_hamiltonian(cfg.problem);
    const LambdaFamily fam(ham, loaded.solution.lambda);
    const DiagnosticsReport rep =
        compute_report(fam, loaded.coupling, loaded.solution, cfg.diagnostics);
    if (rep.residual_sup > 1e-6)
      err << "warning: diagnosing a non-solution, residual sup-norm "
          << format_double(rep.residual_sup) << "\n";
    ensure_directory(cfg.output.directory);
    write_diagnostics_json(fs::path(cfg.output.directory) / "diagnostics.json", rep);
    out << diagnostics_json_string(rep);
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const PositivityError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"stationary mean-field games on the flat torus"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string axis;
  std::string values_csv;
  std::string solution_path;
  bool no_gates = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "path to config.json")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_flag("--no-gates", no_gates, "run even if A1-A8 gates fail (recorded as warning)");
  };

  CLI::App* check = app.add_subcommand("check", "verify assumptions A1-A8 and exponent gates");
  add_common(check);
  CLI::App* solve = app.add_subcommand("solve", "continuation solve to lambda = 1");
  add_common(solve);
  CLI::App* sweep = app.add_subcommand("sweep", "batch of solves along one axis");
  add_common(sweep);
  sweep->add_option("--sweep-axis", axis, "gamma | alpha | n | lambda-record")->required();
  sweep->add_option("--sweep-values", values_csv, "comma-separated values");
  CLI::App* diagnose = app.add_subcommand("diagnose", "recompute diagnostics for a solution.json");
  add_common(diagnose);
  diagnose->add_option("solution", solution_path, "path to solution.json")->required();

  std::vector<const char*> argv;
  argv.push_back("mfg");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  RunConfig cfg;
  try {
    cfg = load_run_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
  if (!out_dir.empty()) cfg.output.directory = out_dir;
  if (no_gates) cfg.solver.enforce_gates = false;

  if (check->parsed()) return cmd_check(cfg, out, err);
  if (solve->parsed()) return cmd_solve(cfg, out, err);
  if (sweep->parsed()) {
    std::vector<std::string> values;
    std::stringstream ss(values_csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) values.push_back(tok);
    return cmd_sweep(cfg, axis, values, out, err);
  }
  return cmd_diagnose(solution_path, cfg, out, err);
}

}  // namespace mfg::cli
