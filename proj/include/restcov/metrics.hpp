// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "restcov/interaction.hpp"
#include "restcov/inventory.hpp"

namespace restcov {

// Declaration order is the serialization order of stats.json.
enum class Metric {
  path,
  operation,
  parameter,
  parameter_value,
  request_content_type,
  status_code_class,
  status_code,
  response_content_type,
};

inline constexpr std::array<Metric, 8> kAllMetrics = {
    Metric::path,           Metric::operation,         Metric::parameter,
    Metric::parameter_value, Metric::request_content_type, Metric::status_code_class,
    Metric::status_code,    Metric::response_content_type,
};

/// "pathCoverage", "operationCoverage", ...
std::string_view metric_name(Metric metric);

/// Output metrics only look at interactions that have a response.
bool is_output_metric(Metric metric);

struct MetricResult {
  Metric metric = Metric::path;
  std::size_t documented = 0;
  std::size_t documented_and_tested = 0;
  std::size_t total_tested = 0;
  double rate = 1.0;

  std::set<ElementKey> documented_and_tested_detail;
  std::set<ElementKey> documented_and_not_tested_detail;
  std::set<ElementKey> not_documented_and_tested_detail;

  // Path metric only: methods per path for the detail report. Tested paths
  // list the methods they were requested with, untested paths their
  // documented methods.
  std::map<std::string, std::set<std::string>> path_methods;
};

/// documented_and_tested / documented, or 1.0 for an empty denominator.
double coverage_rate(std::size_t documented_and_tested, std::size_t documented);

MetricResult path_coverage(const TestableElementInventory& inventory,
                           std::span<const HttpInteraction> interactions);
MetricResult operation_coverage(const TestableElementInventory& inventory,
                                std::span<const HttpInteraction> interactions);
MetricResult parameter_coverage(const TestableElementInventory& inventory,
                                std::span<const HttpInteraction> interactions);
MetricResult parameter_value_coverage(const TestableElementInventory& inventory,
                                      std::span<const HttpInteraction> interactions);
MetricResult request_content_type_coverage(const TestableElementInventory& inventory,
                                           std::span<const HttpInteraction> interactions);
MetricResult status_code_class_coverage(const TestableElementInventory& inventory,
                                        std::span<const HttpInteraction> interactions);
MetricResult status_code_coverage(const TestableElementInventory& inventory,
                                  std::span<const HttpInteraction> interactions);
MetricResult response_content_type_coverage(const TestableElementInventory& inventory,
                                            std::span<const HttpInteraction> interactions);

MetricResult compute_metric(Metric metric, const TestableElementInventory& inventory,
                            std::span<const HttpInteraction> interactions);

/// Highest Test Coverage Level whose cumulative requirements hold. Levels 6
/// and 7 depend on metrics this tool does not compute, so 5 is the ceiling.
int compute_tcl(std::span<const MetricResult> results);

inline constexpr int kMaxComputableTcl = 5;

struct CoverageReport {
  std::array<MetricResult, 8> results;
  int tcl = 0;
  bool tcl_capped = false;  // TCL 5 reached; 6 and 7 were not evaluated

  const MetricResult& get(Metric metric) const { return results[static_cast<std::size_t>(metric)]; }
};

CoverageReport compute_coverage(const TestableElementInventory& inventory,
                                std::span<const HttpInteraction> interactions);

}  // namespace restcov
