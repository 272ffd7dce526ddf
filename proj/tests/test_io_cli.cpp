#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfg/cli.hpp"
#include "mfg/errors.hpp"
#include "mfg/presets.hpp"
#include "test_helpers.hpp"

using namespace mfg;
using nlohmann::json;
namespace fs = std::filesystem;
using mfg::testing::kTwoPi;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mfg_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig quadratic_log_config(int n, const std::string& out_dir) {
  RunConfig cfg;
  cfg.problem.dim = 1;
  cfg.problem.n = n;
  cfg.problem.gamma = 2.0;
  cfg.problem.a_preset = "const:1";
  cfg.problem.v_preset = "sin:1:0.5";
  cfg.problem.coupling = CouplingSpec::log();
  cfg.diagnostics.log_p = 2.0;
  cfg.diagnostics.log_q = 2.0;
  cfg.diagnostics.l = 2.0;
  cfg.output.directory = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("preset parsing") {
  const TorusGrid g(2, 8);
  CHECK((make_preset_field("const:1.5", g).values - 1.5).abs().maxCoeff() == 0.0);

  const ScalarField s = make_preset_field("sin:1:0.5", g);
  const ScalarField expect =
      map_coords(g, [](double x, double, double) { return 0.5 * std::sin(kTwoPi * x); });
  CHECK((s.values - expect.values).abs().maxCoeff() == 0.0);

  const ScalarField sum = make_preset_field("const:1 + sin:2:0.25", g);
  const ScalarField expect2 = map_coords(
      g, [](double x, double, double) { return 1.0 + 0.25 * std::sin(2.0 * kTwoPi * x); });
  CHECK((sum.values - expect2.values).abs().maxCoeff() == 0.0);

  CHECK_NOTHROW(make_preset_field("cos2d:1:0.3", g));
  CHECK_THROWS_AS(make_preset_field("cos2d:1:0.3", TorusGrid(1, 8)), ConfigError);
  CHECK_THROWS_AS(make_preset_field("tanh:1:1", g), ConfigError);
  CHECK_THROWS_AS(make_preset_field("sin:1", g), ConfigError);
  CHECK_THROWS_AS(make_preset_field("sin:1:abc", g), ConfigError);
  CHECK_THROWS_AS(make_preset_field("", g), ConfigError);
}

TEST_CASE("run config parsing") {
  SUBCASE("defaults") {
    const RunConfig cfg = parse_run_config("{}");
    CHECK(cfg.problem.dim == 1);
    CHECK(cfg.problem.n == 64);
    CHECK(cfg.solver.newton_tol == 1e-10);
    CHECK(cfg.solver.enforce_gates);
    CHECK(cfg.output.csv);
    CHECK(cfg.output.json);
  }
  SUBCASE("full object round trips through its own serialization") {
    RunConfig cfg = quadratic_log_config(32, "somewhere");
    cfg.diagnostics.moser_p = 1.25;
    const RunConfig back = parse_run_config(run_config_json(cfg));
    CHECK(back.problem.n == 32);
    CHECK(back.problem.coupling.kind == CouplingKind::Log);
    CHECK(back.problem.v_preset == "sin:1:0.5");
    CHECK(*back.diagnostics.moser_p == 1.25);
    CHECK(back.output.directory == "somewhere");
  }
  SUBCASE("rejects malformed input") {
    CHECK_THROWS_AS(parse_run_config("{ not json"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"problem":{"n":5}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"problem":{"dim":4}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"problem":{"gamma":1.0}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"problem":{"coupling":"exp"}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"schema_version":2})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"output":{"formats":["xml"]}})"), ConfigError);
  }
}

TEST_CASE("solution.json round trip is bitwise") {
  const fs::path dir = fresh_dir("roundtrip");
  const TorusGrid g(1, 32);
  const HamiltonianSpec spec(2.0, ScalarField::constant(g, 1.0),
                             make_preset_field("sin:1:0.5", g));
  const ContinuationTrace trace =
      continuation_solve(spec, CouplingSpec::log(), g, SolverConfig{});
  ProblemConfig pc;
  pc.dim = 1;
  pc.n = 32;
  pc.gamma = 2.0;
  pc.coupling = CouplingSpec::log();

  write_solution_json(dir / "solution.json", trace.final_solution, pc);
  const LoadedSolution back = read_solution_json(dir / "solution.json");
  CHECK(back.gamma == 2.0);
  CHECK(back.coupling.kind == CouplingKind::Log);
  CHECK(back.solution.hbar == trace.final_solution.hbar);
  CHECK(back.solution.lambda == 1.0);
  CHECK((back.solution.u.values - trace.final_solution.u.values).abs().maxCoeff() == 0.0);
  CHECK((back.solution.m.values - trace.final_solution.m.values).abs().maxCoeff() == 0.0);

  SUBCASE("missing field rejected") {
    json j = json::parse(slurp(dir / "solution.json"));
    j.erase("m");
    std::ofstream(dir / "broken.json") << j.dump();
    CHECK_THROWS_AS(read_solution_json(dir / "broken.json"), ConfigError);
  }
  SUBCASE("length mismatch rejected") {
    json j = json::parse(slurp(dir / "solution.json"));
    j["n"] = 64;
    std::ofstream(dir / "short.json") << j.dump();
    CHECK_THROWS_AS(read_solution_json(dir / "short.json"), ConfigError);
  }
}

TEST_CASE("trace csv format and determinism") {
  const TorusGrid g(1, 32);
  const HamiltonianSpec spec(2.0, ScalarField::constant(g, 1.0),
                             make_preset_field("sin:1:0.5", g));
  const ContinuationTrace t1 = continuation_solve(spec, CouplingSpec::log(), g, SolverConfig{});
  const ContinuationTrace t2 = continuation_solve(spec, CouplingSpec::log(), g, SolverConfig{});
  const std::string csv1 = trace_csv_string(t1);
  CHECK(csv1 == trace_csv_string(t2));
  CHECK(csv1.substr(0, csv1.find('\n')) == "lambda,iters,residual,hbar,m_min,m_linf,du_l2");
  // one header + lambda=0 + eight steps
  CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 10);
}

TEST_CASE("cmd_check exit codes and reported bounds") {
  std::ostringstream out, err;
  auto check_with = [&](double gamma, const char* coupling, double alpha) {
    RunConfig cfg;
    cfg.problem.dim = 2;
    cfg.problem.n = 8;
    cfg.problem.gamma = gamma;
    cfg.problem.coupling =
        std::string(coupling) == "log" ? CouplingSpec::log() : CouplingSpec::power(alpha);
    out.str("");
    err.str("");
    return cli::cmd_check(cfg, out, err);
  };

  CHECK(check_with(3.0, "power", 1.0) == 1);
  json rep = json::parse(out.str());
  CHECK(rep["gate"]["bound"] == 0.75);
  CHECK_FALSE(rep["pass"].get<bool>());

  CHECK(check_with(2.0, "power", 1.0) == 0);
  rep = json::parse(out.str());
  CHECK(rep["gate"]["bound"] == 1.0);
  CHECK(rep["assumptions"]["entries"][0]["id"] == "A1.1");
  CHECK(rep["assumptions"]["pass"].get<bool>());

  CHECK(check_with(3.0, "log", 0.0) == 1);
  CHECK(check_with(2.9, "log", 0.0) == 0);
}

TEST_CASE("cmd_solve writes artifacts and reports the energy identity") {
  const fs::path dir = fresh_dir("solve");
  const RunConfig cfg = quadratic_log_config(64, dir.string());
  std::ostringstream out, err;
  const int status = cli::cmd_solve(cfg, out, err);
  CHECK(status == 0);
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "solution.json"));
  CHECK(fs::exists(dir / "diagnostics.json"));

  const json diag = json::parse(slurp(dir / "diagnostics.json"));
  CHECK(diag["energy_gap"].get<double>() <= 1e-10);
  CHECK(diag["residual_sup"].get<double>() <= 1e-10);
  CHECK(diag["m_min"].get<double>() > 0.0);
  CHECK_FALSE(diag["log_integrability"].is_null());
  CHECK(diag["log_integrability"]["slack"].get<double>() >= -1e-3);
  CHECK_FALSE(diag["quad_log_oracle"].is_null());
}

TEST_CASE("cmd_solve on the constant preset marches in eight uneventful steps") {
  const fs::path dir = fresh_dir("solve_const");
  RunConfig cfg;
  cfg.problem.dim = 1;
  cfg.problem.n = 64;
  cfg.problem.a_preset = "const:1";
  cfg.problem.v_preset = "const:0";
  cfg.problem.coupling = CouplingSpec::power(1.0);
  cfg.output.directory = dir.string();
  std::ostringstream out, err;
  REQUIRE(cli::cmd_solve(cfg, out, err) == 0);
  std::istringstream csv(slurp(dir / "trace.csv"));
  std::string line;
  std::getline(csv, line);  // header
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto c1 = line.find(',');
    const double lambda = std::stod(line.substr(0, c1));
    const int iters = std::stoi(line.substr(c1 + 1));
    CHECK(lambda == 0.125 * rows);
    CHECK(iters <= 1);
    ++rows;
  }
  CHECK(rows == 9);  // lambda = 0 plus the eight 0.125-steps, no halving
}

TEST_CASE("full solve with spatially varying a(x) at d=2") {
  // cos2d presets drive the rank-one Hessian cross blocks (gamma != 2) and an
  // x-dependent drift through the whole continuation
  const fs::path dir = fresh_dir("solve_cos2d");
  RunConfig cfg;
  cfg.problem.dim = 2;
  cfg.problem.n = 16;
  cfg.problem.gamma = 2.5;
  cfg.problem.a_preset = "const:1+cos2d:1:0.2";
  cfg.problem.v_preset = "cos2d:1:0.3";
  cfg.problem.coupling = CouplingSpec::power(0.5);  // A7 bound 2.5/3
  cfg.output.directory = dir.string();
  std::ostringstream out, err;
  REQUIRE(cli::cmd_solve(cfg, out, err) == 0);
  const json diag = json::parse(slurp(dir / "diagnostics.json"));
  CHECK(diag["residual_sup"].get<double>() <= 1e-10);
  CHECK(diag["energy_gap"].get<double>() <= 1e-10);
  CHECK(diag["m_min"].get<double>() > 0.0);
}

TEST_CASE("cmd_solve failure modes") {
  SUBCASE("gate failure exits 1") {
    RunConfig cfg;
    cfg.problem.dim = 2;
    cfg.problem.n = 8;
    cfg.problem.gamma = 3.0;
    cfg.problem.coupling = CouplingSpec::power(1.0);
    cfg.output.directory = fresh_dir("gatefail").string();
    std::ostringstream out, err;
    CHECK(cli::cmd_solve(cfg, out, err) == 1);
    CHECK(err.str().find("gate failure") != std::string::npos);
  }
  SUBCASE("unwritable output directory exits 2") {
    RunConfig cfg = quadratic_log_config(32, "/proc/no_such_dir/out");
    std::ostringstream out, err;
    CHECK(cli::cmd_solve(cfg, out, err) == 2);
  }
  SUBCASE("continuation step collapse exits 3 and leaves the partial trace") {
    const fs::path dir = fresh_dir("collapse");
    RunConfig cfg = quadratic_log_config(16, dir.string());
    cfg.problem.v_preset = "sin:1:40";  // far outside the Newton basin
    cfg.solver.max_newton_iters = 2;
    cfg.solver.lambda_step_min = 0.05;
    std::ostringstream out, err;
    CHECK(cli::cmd_solve(cfg, out, err) == 3);
    const std::string csv = slurp(dir / "trace.csv");
    CHECK(csv.find("lambda,iters") == 0);
    CHECK(err.str().find("numerical failure") != std::string::npos);
  }
  SUBCASE("gate override records a warning in diagnostics.json") {
    const fs::path dir = fresh_dir("warned");
    RunConfig cfg = quadratic_log_config(32, dir.string());
    cfg.solver.enforce_gates = false;
    std::ostringstream out, err;
    CHECK(cli::cmd_solve(cfg, out, err) == 0);
    const json d = json::parse(slurp(dir / "diagnostics.json"));
    CHECK(d["warnings"].size() == 1);
  }
}

TEST_CASE("cmd_sweep") {
  SUBCASE("empty value list exits 2") {
    std::ostringstream out, err;
    const RunConfig cfg = quadratic_log_config(32, fresh_dir("sweep_empty").string());
    CHECK(cli::cmd_sweep(cfg, "gamma", {}, out, err) == 2);
    CHECK(cli::cmd_sweep(cfg, "bogus", {"1"}, out, err) == 2);
  }
  SUBCASE("n sweep emits the oracle column") {
    const fs::path dir = fresh_dir("sweep_n");
    const RunConfig cfg = quadratic_log_config(32, dir.string());
    std::ostringstream out, err;
    const int status = cli::cmd_sweep(cfg, "n", {"16", "32"}, out, err);
    CHECK(status == 0);
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.find("quad_log_oracle") != std::string::npos);
    CHECK(csv.find("\nn,16,0,") != std::string::npos);
    CHECK(csv.find("\nn,32,0,") != std::string::npos);
    CHECK(fs::exists(dir / "n_16" / "trace.csv"));
  }
  SUBCASE("alpha sweep over the power family") {
    const fs::path dir = fresh_dir("sweep_alpha");
    RunConfig cfg = quadratic_log_config(16, dir.string());
    cfg.problem.dim = 2;
    cfg.problem.n = 8;
    cfg.problem.v_preset = "sin:1:0.3";
    cfg.problem.coupling = CouplingSpec::power(1.0);
    cfg.diagnostics = DiagnosticsConfig{};
    std::ostringstream out, err;
    const int status = cli::cmd_sweep(cfg, "alpha", {"0.25", "0.5", "1.0"}, out, err);
    CHECK(status == 0);
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }
  SUBCASE("per-run gate failures become status-1 rows and a nonzero exit") {
    const fs::path dir = fresh_dir("sweep_fail");
    RunConfig cfg = quadratic_log_config(16, dir.string());
    cfg.problem.dim = 2;
    cfg.problem.n = 8;
    cfg.problem.v_preset = "sin:1:0.3";
    cfg.problem.coupling = CouplingSpec::power(1.0);
    cfg.diagnostics = DiagnosticsConfig{};
    std::ostringstream out, err;
    const int status = cli::cmd_sweep(cfg, "alpha", {"0.5", "2.0"}, out, err);
    CHECK(status == 1);  // alpha = 2 violates A7 (bound 1)
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.find("\nalpha,0.5,0,") != std::string::npos);
    CHECK(csv.find("\nalpha,2.0,1,") != std::string::npos);
  }
  SUBCASE("lambda-record sweep emits one row per record") {
    const fs::path dir = fresh_dir("sweep_lambda");
    const RunConfig cfg = quadratic_log_config(32, dir.string());
    std::ostringstream out, err;
    const int status = cli::cmd_sweep(cfg, "lambda-record", {}, out, err);
    CHECK(status == 0);
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);  // header + lambda=0 + 8 steps
    CHECK(csv.find("lambda-record,0,0,") != std::string::npos);
    CHECK(csv.find("lambda-record,1,0,") != std::string::npos);
  }
}

TEST_CASE("cmd_diagnose") {
  const fs::path dir = fresh_dir("diagnose");
  const RunConfig cfg = quadratic_log_config(32, dir.string());
  std::ostringstream out, err;
  REQUIRE(cli::cmd_solve(cfg, out, err) == 0);
  const std::string solve_diag = slurp(dir / "diagnostics.json");

  SUBCASE("round trip reproduces the solve-time diagnostics bitwise") {
    RunConfig dcfg = cfg;
    dcfg.output.directory = (dir / "rediag").string();
    std::ostringstream dout, derr;
    CHECK(cli::cmd_diagnose((dir / "solution.json").string(), dcfg, dout, derr) == 0);
    CHECK(slurp(dir / "rediag" / "diagnostics.json") == solve_diag);
    CHECK(derr.str().empty());
  }
  SUBCASE("hand-edited hbar: warning plus energy gap of the same size") {
    json j = json::parse(slurp(dir / "solution.json"));
    j["hbar"] = j["hbar"].get<double>() + 0.01;
    std::ofstream(dir / "edited.json") << j.dump();
    RunConfig dcfg = cfg;
    dcfg.output.directory = (dir / "rediag2").string();
    std::ostringstream dout, derr;
    CHECK(cli::cmd_diagnose((dir / "edited.json").string(), dcfg, dout, derr) == 0);
    CHECK(derr.str().find("warning") != std::string::npos);
    const json d = json::parse(slurp(dir / "rediag2" / "diagnostics.json"));
    CHECK(d["energy_gap"].get<double>() == doctest::Approx(0.01).epsilon(1e-6));
  }
  SUBCASE("missing fields exit 2") {
    json j = json::parse(slurp(dir / "solution.json"));
    j.erase("m");
    std::ofstream(dir / "broken.json") << j.dump();
    std::ostringstream dout, derr;
    CHECK(cli::cmd_diagnose((dir / "broken.json").string(), cfg, dout, derr) == 2);
  }
  SUBCASE("grid-inconsistent config exits 2") {
    RunConfig dcfg = cfg;
    dcfg.problem.n = 64;
    std::ostringstream dout, derr;
    CHECK(cli::cmd_diagnose((dir / "solution.json").string(), dcfg, dout, derr) == 2);
  }
}

TEST_CASE("cli run: argument handling") {
  const fs::path dir = fresh_dir("cli_run");
  {
    std::ofstream f(dir / "config.json");
    f << run_config_json(quadratic_log_config(32, (dir / "out").string()));
  }
  std::ostringstream out, err;
  SUBCASE("unknown subcommand exits 2") {
    CHECK(cli::run({"frobnicate"}, out, err) == 2);
  }
  SUBCASE("missing config exits 2") {
    CHECK(cli::run({"solve", "--config", (dir / "nope.json").string()}, out, err) == 2);
  }
  SUBCASE("malformed config file exits 2") {
    std::ofstream(dir / "bad.json") << "{ nope";
    CHECK(cli::run({"check", "--config", (dir / "bad.json").string()}, out, err) == 2);
  }
  SUBCASE("solve via argv with --out override") {
    const int status = cli::run(
        {"solve", "--config", (dir / "config.json").string(), "--out", (dir / "ovr").string()},
        out, err);
    CHECK(status == 0);
    CHECK(fs::exists(dir / "ovr" / "solution.json"));
  }
  SUBCASE("--no-gates lets an A7-violating run proceed") {
    RunConfig bad = quadratic_log_config(8, (dir / "bad_out").string());
    bad.problem.dim = 2;
    bad.problem.gamma = 3.0;
    bad.problem.coupling = CouplingSpec::power(1.0);
    std::ofstream(dir / "bad_gate.json") << run_config_json(bad);
    CHECK(cli::run({"solve", "--config", (dir / "bad_gate.json").string()}, out, err) == 1);
    CHECK(cli::run({"solve", "--config", (dir / "bad_gate.json").string(), "--no-gates"}, out,
                   err) == 0);
  }
}
