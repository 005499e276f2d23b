// SPDX-License-Identifier: Apache-2.0
#include "restcov/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "restcov/media_type.hpp"

namespace restcov {

namespace {

using ElementSet = std::set<ElementKey>;

MetricResult finalize(Metric metric, const ElementSet& documented, const ElementSet& tested) {
  MetricResult result;
  result.metric = metric;
  for (const auto& element : documented) {
    if (tested.contains(element)) {
      result.documented_and_tested_detail.insert(element);
    } else {
      result.documented_and_not_tested_detail.insert(element);
    }
  }
  for (const auto& element : tested) {
    if (!documented.contains(element)) result.not_documented_and_tested_detail.insert(element);
  }
  result.documented = documented.size();
  result.documented_and_tested = result.documented_and_tested_detail.size();
  result.total_tested = tested.size();
  result.rate = coverage_rate(result.documented_and_tested, result.documented);
  return result;
}

const std::vector<ParameterDescriptor>* declared_parameters(const TestableElementInventory& inventory,
                                                           const OperationMatch& match) {
  const auto it = inventory.operation_parameters.find(match.key());
  return it == inventory.operation_parameters.end() ? nullptr : &it->second;
}

std::vector<std::string> cookie_values(const HeaderMap& headers, std::string_view name) {
  std::vector<std::string> values;
  for (auto header : headers.find_all("Cookie")) {
    for (auto& [cookie, value] : parse_cookie_header(header)) {
      if (cookie == name) values.push_back(std::move(value));
    }
  }
  return values;
}

/// Every value the request supplies for a declared parameter.
std::vector<std::string> supplied_values(const ParameterDescriptor& parameter,
                                         const HttpInteraction& interaction) {
  std::vector<std::string> raw;
  const auto& request = interaction.request;
  switch (parameter.location) {
    case ParameterLocation::path: {
      const auto& captured = interaction.match->path_parameters;
      if (const auto it = captured.find(parameter.name); it != captured.end()) raw.push_back(it->second);
      break;
    }
    case ParameterLocation::query: {
      const auto it = request.query_parameters.find(parameter.name);
      if (it != request.query_parameters.end()) raw = it->second;
      break;
    }
    case ParameterLocation::header:
      for (auto value : request.headers.find_all(parameter.name)) raw.emplace_back(value);
      break;
    case ParameterLocation::cookie: raw = cookie_values(request.headers, parameter.name); break;
  }
  if (!parameter.is_array) return raw;
  std::vector<std::string> items;
  for (const auto& value : raw) {
    std::size_t start = 0;
    while (true) {
      const auto comma = value.find(',', start);
      items.push_back(value.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return items;
}

bool is_supplied(const ParameterDescriptor& parameter, const HttpInteraction& interaction) {
  switch (parameter.location) {
    case ParameterLocation::path: return interaction.match->path_parameters.contains(parameter.name);
    case ParameterLocation::query: return interaction.request.query_parameters.contains(parameter.name);
    case ParameterLocation::header: return interaction.request.headers.contains(parameter.name);
    case ParameterLocation::cookie: return !cookie_values(interaction.request.headers, parameter.name).empty();
  }
  return false;
}

std::optional<std::string_view> status_class(int code) {
  if (code >= 200 && code < 300) return kCorrectClass;
  if (code >= 400 && code < 600) return kErroneousClass;
  return std::nullopt;
}

std::optional<std::string> content_type(const HeaderMap& headers) {
  const auto header = headers.find("Content-Type");
  if (!header) return std::nullopt;
  auto normalized = normalize_media_type(*header);
  if (normalized.empty()) return std::nullopt;
  return normalized;
}

}  // namespace

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::path: return "pathCoverage";
    case Metric::operation: return "operationCoverage";
    case Metric::parameter: return "parameterCoverage";
    case Metric::parameter_value: return "parameterValueCoverage";
    case Metric::request_content_type: return "requestContentTypeCoverage";
    case Metric::status_code_class: return "statusCodeClassCoverage";
    case Metric::status_code: return "statusCodeCoverage";
    case Metric::response_content_type: return "responseContentTypeCoverage";
  }
  return "";
}

bool is_output_metric(Metric metric) {
  return metric == Metric::status_code_class || metric == Metric::status_code ||
         metric == Metric::response_content_type;
}

double coverage_rate(std::size_t documented_and_tested, std::size_t documented) {
  if (documented == 0) return 1.0;
  return static_cast<double>(documented_and_tested) / static_cast<double>(documented);
}

MetricResult path_coverage(const TestableElementInventory& inventory,
                           std::span<const HttpInteraction> interactions) {
  ElementSet tested;
  std::map<std::string, std::set<std::string>> methods;
  for (const auto& interaction : interactions) {
    const auto& path = interaction.match ? interaction.match->template_path
                                         : interaction.request.raw_path;
    tested.insert({path, {}, {}, {}});
    methods[path].insert(interaction.request.method);
  }
  auto result = finalize(Metric::path, inventory.paths, tested);
  for (const auto& element : result.documented_and_not_tested_detail) {
    auto& documented = result.path_methods[element.path];
    for (const auto& operation : inventory.operations) {
      if (operation.path == element.path) documented.insert(operation.method);
    }
  }
  for (auto& [path, seen] : methods) result.path_methods[path] = std::move(seen);
  return result;
}

MetricResult operation_coverage(const TestableElementInventory& inventory,
                                std::span<const HttpInteraction> interactions) {
  ElementSet tested;
  for (const auto& interaction : interactions) {
    if (!interaction.match) continue;
    tested.insert({interaction.match->template_path, interaction.match->method, {}, {}});
  }
  return finalize(Metric::operation, inventory.operations, tested);
}

MetricResult parameter_coverage(const TestableElementInventory& inventory,
                                std::span<const HttpInteraction> interactions) {
  ElementSet tested;
  for (const auto& interaction : interactions) {
    if (!interaction.match) continue;
    const auto& match = *interaction.match;
    for (const auto& [name, value] : match.path_parameters) {
      tested.insert({match.template_path, match.method, name, {}});
    }
    for (const auto& [name, values] : interaction.request.query_parameters) {
      tested.insert({match.template_path, match.method, name, {}});
    }
    // Headers and cookies only count when declared; every request carries
    // plenty of incidental ones.
    if (const auto* declared = declared_parameters(inventory, match)) {
      for (const auto& parameter : *declared) {
        if ((parameter.location == ParameterLocation::header ||
             parameter.location == ParameterLocation::cookie) &&
            is_supplied(parameter, interaction)) {
          tested.insert({match.template_path, match.method, parameter.name, {}});
        }
      }
    }
  }
  return finalize(Metric::parameter, inventory.parameters, tested);
}

MetricResult parameter_value_coverage(const TestableElementInventory& inventory,
                                      std::span<const HttpInteraction> interactions) {
  ElementSet tested;
  for (const auto& interaction : interactions) {
    if (!interaction.match) continue;
    const auto& match = *interaction.match;
    const auto* declared = declared_parameters(inventory, match);
    if (declared == nullptr) continue;
    for (const auto& parameter : *declared) {
      if (!parameter.domain.is_finite()) continue;
      for (auto& value : supplied_values(parameter, interaction)) {
        auto admitted = parameter.domain.admit(value);
        tested.insert({match.template_path, match.method, parameter.name,
                       admitted ? std::move(*admitted) : std::move(value)});
      }
    }
  }
  return finalize(Metric::parameter_value, inventory.parameter_values, tested);
}

MetricResult request_content_type_coverage(const TestableElementInventory& inventory,
                                           std::span<const HttpInteraction> interactions) {
  ElementSet tested;
  for (const auto& interaction : interactions) {
    if (!interaction.match) continue;
    const auto& match = *interaction.match;
    if (inventory.request_content_type_exclusions.contains(match.key())) continue;
    if (auto type = content_type(interaction.request.headers)) {
      tested.insert({match.template_path, match.method, std::move(*type), {}});
    }
  }
  return finalize(Metric::request_content_type, inventory.request_content_types, tested);
}

MetricResult status_code_class_coverage(const TestableElementInventory& inventory,
                                        std::span<const HttpInteraction> interactions) {
  ElementSet tested;
  for (const auto& interaction : interactions) {
    if (!interaction.match || !interaction.response) continue;
    if (const auto cls = status_class(interaction.response->status_code)) {
      tested.insert({interaction.match->template_path, interaction.match->method, std::string(*cls), {}});
    }
  }
  return finalize(Metric::status_code_class, inventory.status_code_classes, tested);
}

MetricResult status_code_coverage(const TestableElementInventory& inventory,
                                  std::span<const HttpInteraction> interactions) {
  ElementSet tested;
  for (const auto& interaction : interactions) {
    if (!interaction.match || !interaction.response) continue;
    tested.insert({interaction.match->template_path, interaction.match->method,
                   std::to_string(interaction.response->status_code), {}});
  }
  return finalize(Metric::status_code, inventory.status_codes, tested);
}

MetricResult response_content_type_coverage(const TestableElementInventory& inventory,
                                            std::span<const HttpInteraction> interactions) {
  ElementSet tested;
  for (const auto& interaction : interactions) {
    if (!interaction.match || !interaction.response) continue;
    const auto& match = *interaction.match;
    if (inventory.response_content_type_exclusions.contains(match.key())) continue;
    if (auto type = content_type(interaction.response->headers)) {
      tested.insert({match.template_path, match.method, std::move(*type), {}});
    }
  }
  return finalize(Metric::response_content_type, inventory.response_content_types, tested);
}

MetricResult compute_metric(Metric metric, const TestableElementInventory& inventory,
                            std::span<const HttpInteraction> interactions) {
  switch (metric) {
    case Metric::path: return path_coverage(inventory, interactions);
    case Metric::operation: return operation_coverage(inventory, interactions);
    case Metric::parameter: return parameter_coverage(inventory, interactions);
    case Metric::parameter_value: return parameter_value_coverage(inventory, interactions);
    case Metric::request_content_type: return request_content_type_coverage(inventory, interactions);
    case Metric::status_code_class: return status_code_class_coverage(inventory, interactions);
    case Metric::status_code: return status_code_coverage(inventory, interactions);
    case Metric::response_content_type:
      return response_content_type_coverage(inventory, interactions);
  }
  throw std::invalid_argument("unknown metric");
}

int compute_tcl(std::span<const MetricResult> results) {
  auto full = [&](Metric metric) {
    const auto it = std::find_if(results.begin(), results.end(),
                                 [&](const MetricResult& r) { return r.metric == metric; });
    if (it == results.end()) throw std::invalid_argument("missing metric " + std::string(metric_name(metric)));
    return it->documented_and_tested == it->documented;
  };
  // Evaluate every requirement up front so a missing metric is always reported.
  const bool path = full(Metric::path);
  const bool operation = full(Metric::operation);
  const bool content_types = full(Metric::request_content_type) && full(Metric::response_content_type);
  const bool parameters_and_classes = full(Metric::parameter) && full(Metric::status_code_class);
  const bool status_codes = full(Metric::status_code);
  full(Metric::parameter_value);

  const bool ladder[] = {path, operation, content_types, parameters_and_classes, status_codes};
  int level = 0;
  for (bool requirement : ladder) {
    if (!requirement) break;
    ++level;
  }
  return level;
}

CoverageReport compute_coverage(const TestableElementInventory& inventory,
                                std::span<const HttpInteraction> interactions) {
  CoverageReport report;
  for (auto metric : kAllMetrics) {
    report.results[static_cast<std::size_t>(metric)] = compute_metric(metric, inventory, interactions);
  }
  report.tcl = compute_tcl(report.results);
  report.tcl_capped = report.tcl == kMaxComputableTcl;
  return report;
}

}  // namespace restcov
