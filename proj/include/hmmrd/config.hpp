// Run configuration: a flat `key = value` file plus command-line overrides.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hmmrd {

/// Names the offending key in what().
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : "config key '" + key + "': " + message),
        key_(std::move(key)),
        detail_(message) {}
  const std::string& key() const { return key_; }
  /// Message without the key prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::string key_;
  std::string detail_;
};

enum class Command { solve, convergence, diagnose, mesh_info };

Command parse_command(std::string_view name);
std::string_view command_name(Command command);

struct RunConfig {
  Command command = Command::solve;

  std::size_t level = 8;                  // structured mesh parameter n
  std::optional<std::string> mesh_file;   // overrides `level` for solve/diagnose/mesh-info
  double dt = 1e-3;
  double final_time = 1.0;

  std::string problem = "brusselator";    // or "affine"
  std::string kinetics = "brusselator";   // or "none"
  double a = 0.0;
  double b = 1.0;
  double mu1 = 0.25;
  double mu2 = 0.25;

  double newton_tol = 1e-10;
  int newton_max_iter = 20;
  double linear_tol = 1e-12;

  std::string out = "out";
  std::vector<std::size_t> levels;        // empty: command default
  std::vector<std::string> consistency_samples{"sinsin", "constant", "affine"};
  std::vector<std::string> conformity_samples{"x_axis", "constant"};
  std::string h_label = "leg";            // or "diameter"
  bool parallel = true;
  /// Long reference run: dt = 1e-4 on n = 8, 16, 32, 64.
  bool full_table = false;

  /// Levels after applying the command defaults and `full_table`.
  std::vector<std::size_t> effective_levels() const;
  double effective_dt() const;

  /// Canonical `key = value` listing of every setting, used for hashing.
  std::string canonical_text() const;
};

/// Parses `text` (the config file, may be empty), then applies `overrides`
/// in order. Unknown keys, malformed values and constraint violations throw
/// ConfigError naming the key.
RunConfig parse_config(Command command, std::string_view text,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Splits `key=value`; throws ConfigError on a missing '='.
std::pair<std::string, std::string> split_assignment(std::string_view assignment);

}  // namespace hmmrd
