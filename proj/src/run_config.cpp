#include "mfg/run_config.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mfg/errors.hpp"
#include "mfg/presets.hpp"

namespace mfg {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

CouplingSpec parse_coupling(const json& problem) {
  const std::string kind = get_or<std::string>(problem, "coupling", "power");
  try {
    if (kind == "power") return CouplingSpec::power(get_or<double>(problem, "alpha", 1.0));
    if (kind == "log") return CouplingSpec::log();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("coupling must be 'power' or 'log', got '" + kind + "'");
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  const json j = parse_json(text, "config");
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  const int version = get_or<int>(j, "schema_version", 1);
  if (version != 1) throw ConfigError("config: unsupported schema_version");

  RunConfig cfg;
  if (j.contains("problem")) {
    const json& p = j.at("problem");
    cfg.problem.dim = get_or<int>(p, "dim", cfg.problem.dim);
    cfg.problem.n = get_or<int>(p, "n", cfg.problem.n);
    cfg.problem.gamma = get_or<double>(p, "gamma", cfg.problem.gamma);
    cfg.problem.a_preset = get_or<std::string>(p, "a_preset", cfg.problem.a_preset);
    cfg.problem.v_preset = get_or<std::string>(p, "V_preset", cfg.problem.v_preset);
    cfg.problem.coupling = parse_coupling(p);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    SolverConfig& sc = cfg.solver;
    sc.newton_tol = get_or<double>(s, "newton_tol", sc.newton_tol);
    sc.max_newton_iters = get_or<int>(s, "max_newton_iters", sc.max_newton_iters);
    sc.lambda_step_init = get_or<double>(s, "lambda_step_init", sc.lambda_step_init);
    sc.lambda_step_min = get_or<double>(s, "lambda_step_min", sc.lambda_step_min);
    sc.positivity_kappa = get_or<double>(s, "positivity_kappa", sc.positivity_kappa);
    sc.armijo_c = get_or<double>(s, "armijo_c", sc.armijo_c);
    sc.max_backtracks = get_or<int>(s, "max_backtracks", sc.max_backtracks);
  }
  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    auto opt = [&](const char* key) -> std::optional<double> {
      if (!d.contains(key) || d.at(key).is_null()) return std::nullopt;
      return get_or<double>(d, key, 0.0);
    };
    cfg.diagnostics.moser_p = opt("moser_p");
    cfg.diagnostics.bernstein_p = opt("bernstein_p");
    cfg.diagnostics.log_p = opt("log_p");
    cfg.diagnostics.log_q = opt("log_q");
    cfg.diagnostics.l = opt("l");
    cfg.diagnostics.two_star_eff = get_or<double>(d, "two_star_eff", 10.0);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    cfg.output.directory = get_or<std::string>(o, "directory", cfg.output.directory);
    if (o.contains("formats")) {
      cfg.output.csv = false;
      cfg.output.json = false;
      for (const auto& f : o.at("formats")) {
        const std::string name = f.get<std::string>();
        if (name == "csv")
          cfg.output.csv = true;
        else if (name == "json")
          cfg.output.json = true;
        else
          throw ConfigError("output.formats: unknown format '" + name + "'");
      }
    }
  }
  if (j.contains("gates")) cfg.solver.enforce_gates = get_or<bool>(j.at("gates"), "enforce", true);

  if (cfg.problem.dim < 1 || cfg.problem.dim > 3) throw ConfigError("problem.dim must be 1, 2 or 3");
  if (cfg.problem.n < 4 || cfg.problem.n % 2 != 0)
    throw ConfigError("problem.n must be even and >= 4");
  if (!(cfg.problem.gamma > 1.0)) throw ConfigError("problem.gamma must be > 1");
  try {
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string run_config_json(const RunConfig& cfg) {
  json j;
  j["schema_version"] = 1;
  json p;
  p["dim"] = cfg.problem.dim;
  p["n"] = cfg.problem.n;
  p["gamma"] = cfg.problem.gamma;
  p["a_preset"] = cfg.problem.a_preset;
  p["V_preset"] = cfg.problem.v_preset;
  p["coupling"] = cfg.problem.coupling.kind == CouplingKind::Power ? "power" : "log";
  if (cfg.problem.coupling.kind == CouplingKind::Power) p["alpha"] = cfg.problem.coupling.alpha;
  j["problem"] = p;
  json s;
  s["newton_tol"] = cfg.solver.newton_tol;
  s["max_newton_iters"] = cfg.solver.max_newton_iters;
  s["lambda_step_init"] = cfg.solver.lambda_step_init;
  s["lambda_step_min"] = cfg.solver.lambda_step_min;
  s["positivity_kappa"] = cfg.solver.positivity_kappa;
  s["armijo_c"] = cfg.solver.armijo_c;
  s["max_backtracks"] = cfg.solver.max_backtracks;
  j["solver"] = s;
  json d;
  if (cfg.diagnostics.moser_p) d["moser_p"] = *cfg.diagnostics.moser_p;
  if (cfg.diagnostics.bernstein_p) d["bernstein_p"] = *cfg.diagnostics.bernstein_p;
  if (cfg.diagnostics.log_p) d["log_p"] = *cfg.diagnostics.log_p;
  if (cfg.diagnostics.log_q) d["log_q"] = *cfg.diagnostics.log_q;
  if (cfg.diagnostics.l) d["l"] = *cfg.diagnostics.l;
  d["two_star_eff"] = cfg.diagnostics.two_star_eff;
  j["diagnostics"] = d;
  json o;
  o["directory"] = cfg.output.directory;
  json formats = json::array();
  if (cfg.output.csv) formats.push_back("csv");
  if (cfg.output.json) formats.push_back("json");
  o["formats"] = formats;
  j["output"] = o;
  j["gates"] = json{{"enforce", cfg.solver.enforce_gates}};
  return j.dump(2) + "\n";
}

TorusGrid make_grid(const ProblemConfig& p) {
  try {
    return TorusGrid(p.dim, p.n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

HamiltonianSpec make_hamiltonian(const ProblemConfig& p) {
  const TorusGrid grid = make_grid(p);
  try {
    return HamiltonianSpec(p.gamma, make_preset_field(p.a_preset, grid),
                           make_preset_field(p.v_preset, grid));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void write_solution_json(const std::filesystem::path& path, const Solution& v,
                         const ProblemConfig& problem) {
  json j;
  j["schema_version"] = 1;
  j["dim"] = problem.dim;
  j["n"] = problem.n;
  j["gamma"] = problem.gamma;
  j["lambda"] = v.lambda;
  j["hbar"] = v.hbar;
  json coup;
  coup["kind"] = problem.coupling.kind == CouplingKind::Power ? "power" : "log";
  if (problem.coupling.kind == CouplingKind::Power) coup["alpha"] = problem.coupling.alpha;
  j["coupling"] = coup;
  j["u"] = std::vector<double>(v.u.values.begin(), v.u.values.end());
  j["m"] = std::vector<double>(v.m.values.begin(), v.m.values.end());
  write_text(path, j.dump() + "\n");
}

LoadedSolution read_solution_json(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  for (const char* key : {"dim", "n", "gamma", "lambda", "hbar", "coupling", "u", "m"})
    if (!j.contains(key)) throw ConfigError(path.string() + ": missing field '" + key + "'");
  if (get_or<int>(j, "schema_version", 1) != 1)
    throw ConfigError(path.string() + ": unsupported schema_version");

  LoadedSolution out;
  out.dim = j.at("dim").get<int>();
  out.n = j.at("n").get<int>();
  out.gamma = j.at("gamma").get<double>();
  const json& coup = j.at("coupling");
  const std::string kind = get_or<std::string>(coup, "kind", "power");
  try {
    out.coupling = kind == "log" ? CouplingSpec::log()
                                 : CouplingSpec::power(get_or<double>(coup, "alpha", 1.0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  TorusGrid grid(1, 4);
  try {
    grid = TorusGrid(out.dim, out.n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  const auto u = j.at("u").get<std::vector<double>>();
  const auto m = j.at("m").get<std::vector<double>>();
  if (static_cast<long>(u.size()) != grid.size() || static_cast<long>(m.size()) != grid.size())
    throw ConfigError(path.string() + ": u/m length does not match n^dim");

  Eigen::ArrayXd ua = Eigen::Map<const Eigen::ArrayXd>(u.data(), grid.size());
  Eigen::ArrayXd ma = Eigen::Map<const Eigen::ArrayXd>(m.data(), grid.size());
  out.solution = Solution{ScalarField{grid, std::move(ua)}, ScalarField{grid, std::move(ma)},
                          j.at("hbar").get<double>(), j.at("lambda").get<double>()};
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string trace_csv_string(const ContinuationTrace& trace) {
  std::ostringstream os;
  os << "lambda,iters,residual,hbar,m_min,m_linf,du_l2\n";
  for (const TraceRecord& r : trace.records) {
    os << format_double(r.lambda) << ',' << r.newton_iters << ',' << format_double(r.residual_sup)
       << ',' << format_double(r.hbar) << ',' << format_double(r.m_min) << ','
       << format_double(r.m_linf) << ',' << format_double(r.du_l2) << '\n';
  }
  return os.str();
}

void write_trace_csv(const std::filesystem::path& path, const ContinuationTrace& trace) {
  write_text(path, trace_csv_string(trace));
}

std::string diagnostics_json_string(const DiagnosticsReport& rep,
                                    const std::vector<std::string>& warnings) {
  json j;
  j["schema_version"] = 1;
  j["warnings"] = warnings;
  j["residual_sup"] = rep.residual_sup;
  j["energy_gap"] = rep.energy_gap;
  j["hbar"] = rep.hbar;
  j["int_g"] = rep.int_g;
  j["int_gm"] = rep.int_gm;
  j["kinetic"] = rep.kinetic;
  j["m_linf"] = rep.m_linf;
  j["m_min"] = rep.m_min;
  j["lnm_l1"] = rep.lnm_l1;
  j["lnm_linf"] = rep.lnm_linf;
  j["dlnm_l2"] = rep.dlnm_l2;
  j["dlnm_linf"] = rep.dlnm_linf;
  j["dph_l2"] = rep.dph_l2;
  j["m_l1alpha"] = rep.m_l1alpha ? json(*rep.m_l1alpha) : json(nullptr);
  if (rep.moser) {
    const MoserRecord& m = *rep.moser;
    j["moser"] = {{"p", m.p},          {"two_star", m.two_star}, {"exponent", m.exponent},
                  {"lhs", m.lhs},      {"rhs_driver", m.rhs_driver}, {"ratio", m.ratio},
                  {"surrogate", m.surrogate}};
  } else {
    j["moser"] = nullptr;
  }
  if (rep.bernstein) {
    const BernsteinRecord& b = *rep.bernstein;
    j["bernstein"] = {{"p", b.p},
                      {"two_star", b.two_star},
                      {"beta_p", b.beta_p},
                      {"r_p", b.r_p},
                      {"lhs", b.lhs},
                      {"rhs_driver", b.rhs_driver},
                      {"ratio", b.ratio},
                      {"du_norm", b.du_norm},
                      {"g_norm", b.g_norm},
                      {"surrogate", b.surrogate}};
  } else {
    j["bernstein"] = nullptr;
  }
  if (rep.log_integrability) {
    const LogIntegrabilityRecord& l = *rep.log_integrability;
    j["log_integrability"] = {{"p", l.p},           {"q", l.q},
                    {"l", l.l},           {"lhs", l.lhs},
                    {"rhs_driver", l.rhs_driver}, {"ratio", l.ratio},
                    {"dlnm_l2", l.dlnm_l2},       {"dph_l2", l.dph_l2},
                    {"slack", l.slack}};
  } else {
    j["log_integrability"] = nullptr;
  }
  j["quad_log_oracle"] = rep.quad_log_oracle ? json(*rep.quad_log_oracle) : json(nullptr);
  return j.dump(2) + "\n";
}

void write_diagnostics_json(const std::filesystem::path& path, const DiagnosticsReport& rep,
                            const std::vector<std::string>& warnings) {
  write_text(path, diagnostics_json_string(rep, warnings));
}

DiagnosticsReport compute_report(const LambdaFamily& fam, const CouplingSpec& c,
                                 const Solution& v, const DiagnosticsConfig& cfg) {
  DiagnosticsReport rep = basic_bounds(fam, c, v);
  rep.residual_sup = residual(fam, c, v).sup_norm();
  if (cfg.moser_p) rep.moser = moser_ratio(fam, c, v, *cfg.moser_p, cfg.two_star_eff);
  if (cfg.bernstein_p)
    rep.bernstein = bernstein_quantities(fam, c, v, *cfg.bernstein_p, cfg.two_star_eff);
  if (cfg.log_p && cfg.log_q && cfg.l && c.kind == CouplingKind::Log)
    rep.log_integrability = log_estimates(fam, c, v, *cfg.log_p, *cfg.log_q, *cfg.l, cfg.two_star_eff);
  const bool oracle_applies = c.kind == CouplingKind::Log && fam.gamma() == 2.0 &&
                              fam.lambda == 1.0 &&
                              (fam.base.a.values - 1.0).abs().maxCoeff() <= 1e-14;
  if (oracle_applies) rep.quad_log_oracle = quadratic_log_oracle(fam, c, v);
  return rep;
}

}  // namespace mfg
