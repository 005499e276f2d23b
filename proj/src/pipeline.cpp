// SPDX-License-Identifier: Apache-2.0
#include "restcov/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "restcov/dump_ingest.hpp"
#include "restcov/errors.hpp"
#include "restcov/interaction_store.hpp"
#include "restcov/inventory.hpp"
#include "restcov/report_writer.hpp"
#include "restcov/spec_model.hpp"

namespace restcov {

namespace fs = std::filesystem;

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::all: return "all";
    case Stage::data_collection: return "dataCollection";
    case Stage::statistics: return "statistics";
  }
  return "all";
}

namespace {

constexpr int kInternalErrorExit = 70;

fs::path path_value(const nlohmann::json& document, const char* key, bool required,
                    const fs::path& base_dir, Diagnostics* diagnostics) {
  const auto it = document.find(key);
  if (it == document.end() || it->is_null()) {
    if (required) throw ConfigValidationError(key, "missing");
    return {};
  }
  if (!it->is_string() || it->get<std::string>().empty()) {
    throw ConfigValidationError(key, "must be a non-empty path string");
  }
  fs::path value = it->get<std::string>();
  if (value.is_relative()) {
    warn(diagnostics, std::string("config key \"") + key + "\" is a relative path; resolved against " +
                          (base_dir.empty() ? std::string(".") : base_dir.string()) +
                          " (absolute paths are preferred)");
    value = base_dir / value;
  }
  return value.lexically_normal();
}

void flush_warnings(const Diagnostics& diagnostics, std::ostream& err) {
  for (const auto& warning : diagnostics.warnings()) err << "warning: " << warning << '\n';
}

bool has_data_collection(Stage stage) { return stage != Stage::statistics; }
bool has_statistics(Stage stage) { return stage != Stage::data_collection; }

std::string percent(double rate) {
  char buffer[16];
  std::snprintf(buffer, sizeof buffer, "%5.1f%%", rate * 100.0);
  return buffer;
}

}  // namespace

ToolConfig parse_config(const nlohmann::json& document, const fs::path& base_dir,
                        Diagnostics* diagnostics) {
  if (!document.is_object()) throw ConfigParseError("configuration must be a JSON object");
  ToolConfig config;
  const auto modules = document.find("modules");
  if (modules == document.end()) throw ConfigValidationError("modules", "missing");
  if (!modules->is_string()) throw ConfigValidationError("modules", "must be a string");
  const auto stage = modules->get<std::string>();
  if (stage == "all") {
    config.modules = Stage::all;
  } else if (stage == "dataCollection") {
    config.modules = Stage::data_collection;
  } else if (stage == "statistics") {
    config.modules = Stage::statistics;
  } else {
    throw ConfigValidationError("modules", "unknown value \"" + stage +
                                               "\" (expected all, dataCollection or statistics)");
  }
  const bool collect = has_data_collection(config.modules);
  const bool statistics = has_statistics(config.modules);
  config.specification = path_value(document, "specification", true, base_dir, diagnostics);
  config.dumps_dir = path_value(document, "dumpsDir", collect, base_dir, diagnostics);
  config.reports_dir = path_value(document, "reportsDir", statistics, base_dir, diagnostics);
  config.db_path = path_value(document, "dbPath", true, base_dir, diagnostics);
  return config;
}

ToolConfig load_config(const fs::path& file, Diagnostics* diagnostics) {
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) throw ConfigNotFound("configuration not found: " + file.string());
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigNotFound("cannot open configuration: " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto document = nlohmann::json::parse(buffer.str(), nullptr, false);
  if (document.is_discarded()) throw ConfigParseError("configuration is not valid JSON: " + file.string());
  return parse_config(document, fs::absolute(file, ec).parent_path(), diagnostics);
}

void print_summary(std::ostream& out, const CoverageReport& report, const ParseTally& tally) {
  char line[160];
  out << "REST API test coverage\n";
  std::snprintf(line, sizeof line, "  %-30s %10s %10s %10s %8s\n", "metric", "documented", "tested",
                "total", "rate");
  out << line;
  for (auto metric : kAllMetrics) {
    const auto& result = report.get(metric);
    std::snprintf(line, sizeof line, "  %-30s %10zu %10zu %10zu %8s\n",
                  std::string(metric_name(metric)).c_str(), result.documented,
                  result.documented_and_tested, result.total_tested, percent(result.rate).c_str());
    out << line;
  }
  out << "  TCL: " << report.tcl;
  if (report.tcl_capped) out << " (levels 6-7 not evaluated)";
  out << '\n';
  out << "  dumps: " << tally.requests_parsed << " requests parsed, " << tally.request_failures
      << " malformed requests, " << tally.response_failures << " malformed responses, "
      << tally.body_failures << " unparsable JSON bodies\n";
}

int run(const ToolConfig& config, std::ostream& out, std::ostream& err) {
  Diagnostics diagnostics;
  try {
    const auto spec = load_specification(config.specification, &diagnostics);

    if (has_data_collection(config.modules)) {
      auto ingested = ingest_dump_directory(config.dumps_dir, spec, &diagnostics);
      const auto count = ingested.interactions.size();
      persist_interactions(config.db_path, std::move(ingested.interactions),
                           std::move(ingested.fingerprint), ingested.tally);
      out << "collected " << count << " interactions into " << config.db_path.string() << '\n';
    }

    if (has_statistics(config.modules)) {
      const auto store = load_store(config.db_path);
      const auto inventory = build_inventory(spec);
      const auto report = compute_coverage(inventory, store.interactions);
      write_stats_report(report, config.reports_dir);
      write_detail_reports(report, config.reports_dir);
      print_summary(out, report, store.tally);
      out << "reports written to " << config.reports_dir.string() << '\n';
    }
  } catch (const Error& e) {
    flush_warnings(diagnostics, err);
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    flush_warnings(diagnostics, err);
    err << "internal error: " << e.what() << '\n';
    return kInternalErrorExit;
  }
  flush_warnings(diagnostics, err);
  return 0;
}

int run_config_file(const fs::path& file, std::ostream& out, std::ostream& err) {
  Diagnostics diagnostics;
  ToolConfig config;
  try {
    config = load_config(file, &diagnostics);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  }
  flush_warnings(diagnostics, err);
  return run(config, out, err);
}

}  // namespace restcov
