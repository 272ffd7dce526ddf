#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mfg/run_config.hpp"

namespace mfg::cli {

/// Exit codes shared by all subcommands:
///   0 success, 1 gate failure, 2 usage/parse/IO error, 3 numerical failure.
int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, const std::string& axis,
              const std::vector<std::string>& values, std::ostream& out, std::ostream& err);
int cmd_diagnose(const std::string& solution_path, const RunConfig& cfg, std::ostream& out,
                 std::ostream& err);

/// Argument-level entry point (argv without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfg::cli
