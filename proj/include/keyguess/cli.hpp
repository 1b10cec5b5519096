#pragma once

// Batch front end: each command turns a RunConfig into one table, rendered
// as CSV or JSON.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "keyguess/io.hpp"

namespace keyguess {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitCap = 4,
};

using Cell = std::variant<std::monostate, double, long long, std::string, bool>;

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// 12 significant digits; infinities as inf / -inf; empty cells blank.
void write_csv(const Table& t, std::ostream& out);
/// Full round-trip doubles; infinities as the strings "inf" / "-inf".
void write_json(const Table& t, std::ostream& out);

Table cmd_exponent(const RunConfig& cfg);
Table cmd_bounds(const RunConfig& cfg);
Table cmd_simulate(const RunConfig& cfg);
Table cmd_sweep(const RunConfig& cfg);
/// Sets `all_pass` to whether every check passed.
Table cmd_verify(const RunConfig& cfg, bool& all_pass);

/// Parses arguments, runs the command, writes output; returns an ExitCode.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace keyguess
