#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "qhyper/cli/config.hpp"

namespace qhyper::cli {

/// One output row. Field order is the column order.
struct Record {
  nlohmann::ordered_json fields = nlohmann::ordered_json::object();
  bool pass = true;
};

struct CommandResult {
  std::vector<Record> records;
  bool pass() const;
};

CommandResult cmd_relations(const RunConfig& config);
CommandResult cmd_density(const RunConfig& config);
CommandResult cmd_lpnorm(const RunConfig& config);
CommandResult cmd_choi(const RunConfig& config);
CommandResult cmd_convexity(const RunConfig& config);
CommandResult cmd_hyperc_verify(const RunConfig& config);
CommandResult cmd_hyperc_search(const RunConfig& config);
CommandResult cmd_necessary_time(const RunConfig& config);
CommandResult cmd_perturb(const RunConfig& config);
CommandResult cmd_fock_moment(const RunConfig& config);
CommandResult cmd_clt(const RunConfig& config);

std::vector<std::string> command_names();
/// Dispatches on config.command.
CommandResult run_command(const RunConfig& config);

/// CSV with one header line and RFC-4180 quoting; provenance columns
/// (version, config) are appended to every row.
std::string to_csv(const RunConfig& config, const CommandResult& result);
/// {"config": ..., "version": ..., "records": [...], "pass": bool}.
std::string to_json(const RunConfig& config, const CommandResult& result);

enum ExitCode : int { kPass = 0, kUsage = 1, kAssertion = 2 };

/// Full command line entry point; returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qhyper::cli
