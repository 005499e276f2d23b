// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include <json.hpp>

#include "restcov/diagnostics.hpp"
#include "restcov/metrics.hpp"

namespace restcov {

enum class Stage { all, data_collection, statistics };

std::string_view to_string(Stage stage);

struct ToolConfig {
  Stage modules = Stage::all;
  std::filesystem::path specification;
  std::filesystem::path dumps_dir;    // empty when the stage does not need it
  std::filesystem::path reports_dir;  // idem
  std::filesystem::path db_path;
};

/// Validates keys for the selected stage and resolves relative paths against
/// `base_dir` (a warning is recorded for each). Throws ConfigParseError or
/// ConfigValidationError.
ToolConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir,
                        Diagnostics* diagnostics = nullptr);

/// Throws ConfigNotFound, ConfigParseError or ConfigValidationError.
ToolConfig load_config(const std::filesystem::path& file, Diagnostics* diagnostics = nullptr);

/// Runs the configured stages, printing a summary to `out` and diagnostics to
/// `err`. Returns 0 on success or the failing component's exit code.
int run(const ToolConfig& config, std::ostream& out, std::ostream& err);

/// load_config + run, with configuration errors mapped to exit code 1.
int run_config_file(const std::filesystem::path& file, std::ostream& out, std::ostream& err);

/// Per-metric rate table plus TCL and parse-failure tally.
void print_summary(std::ostream& out, const CoverageReport& report, const ParseTally& tally);

}  // namespace restcov
