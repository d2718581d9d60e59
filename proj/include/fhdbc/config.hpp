#pragma once

// Flat `key = value` configuration shared by the command-line tool.

#include <string>
#include <vector>

#include "fhdbc/harness.hpp"

namespace fhdbc {

struct CliConfig {
  RunConfig run;
  std::vector<int> grids{16, 32, 64, 128};
  double dt_factor = 1e-3;
  double study_t_final = 1e-3;
};

/// eps = 0.02, kappa = 0.02, theta0 = 3, N = 128, dt = 1e-5, bc = dynamic,
/// seed = 1, init = cosine, t_final = 0.01.
CliConfig default_cli_config();

/// Sets one key. Throws ConfigError naming the key and its expected domain.
void apply_setting(CliConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines; `#` starts a comment; blank lines skipped.
/// Later lines override earlier ones; unknown keys are rejected.
void apply_config_text(CliConfig& cfg, const std::string& text, const std::string& origin = "<text>");
void apply_config_file(CliConfig& cfg, const std::string& path);

/// Cross-field checks (positivity, grid size, step divisibility).
void validate(const CliConfig& cfg);

/// Every effective value, one `key = value` line each, in a form that
/// apply_config_text reads back to an identical configuration.
std::string echo_config(const CliConfig& cfg);

bool operator==(const CliConfig& a, const CliConfig& b);

}  // namespace fhdbc
