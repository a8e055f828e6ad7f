#pragma once

#include "config.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace unipert::app {

/// Exit codes of the front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;

/// Result rows plus a summary object; cells are numbers or strings.
struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  nlohmann::json summary = nlohmann::json::object();
};

const std::vector<std::string>& command_names();

/// Runs one command against a resolved config and returns its table.
/// Throws DomainError / ParseError for bad input and NumericalError on
/// integrator failure.
Table run_command(const std::string& command, const ExperimentConfig& config);

/// CSV: '#' metadata lines echoing the resolved config, a header row, data
/// rows with 17 significant digits, then '#' summary lines.
void write_csv(std::ostream& out, const Table& table, const ExperimentConfig& config);
void write_json(std::ostream& out, const Table& table, const ExperimentConfig& config);

/// Validates, runs and writes to config.output; maps errors to exit codes
/// and reports them on `err`.
int execute(const std::string& command, const ExperimentConfig& config, std::ostream& err);

}  // namespace unipert::app
