#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qhyper/babyfock.hpp"

namespace qhyper::cli {

/// "start:stop:step" (stop inclusive), "a,b,c", or a single number.
struct Grid {
  std::string text;
  std::vector<double> values;

  static Grid parse(const std::string& text);
  bool empty() const { return values.empty(); }
};

/// Every option of every command. Unset optionals fall back to the command
/// default, so a config echoes exactly what the user asked for.
struct RunConfig {
  std::string command;
  int n = 1;
  std::string mu;  ///< grid text; empty means all ones
  std::optional<std::uint64_t> sign_seed;
  std::string sign_file;
  std::string p;
  std::string t;
  std::string q;
  std::string m;
  std::optional<int> samples;
  std::optional<int> restarts;
  std::optional<int> iterations;
  std::uint64_t seed = 0;
  std::string emit = "csv";
  std::optional<double> tol;
  std::string word;
  std::string direction;

  /// Lossless round trip through JSON.
  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
  bool operator==(const RunConfig&) const = default;

  /// Range checks that do not depend on the command.
  void validate() const;

  std::vector<double> mu_values() const;
  /// n weights (a single value is broadcast) and the requested sign table.
  ModelParams model_params() const;
  double tol_or(double fallback) const { return tol.value_or(fallback); }
};

/// "qhyper <version>".
std::string version_string();

}  // namespace qhyper::cli
