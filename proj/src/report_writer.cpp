// SPDX-License-Identifier: Apache-2.0
#include "restcov/report_writer.hpp"

#include <unistd.h>

#include <array>
#include <fstream>
#include <map>

#include "restcov/errors.hpp"
#include "restcov/media_type.hpp"

namespace restcov {

namespace fs = std::filesystem;
using OrderedJson = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 7> kMethodOrder = {"get",   "post", "put",    "delete",
                                                          "patch", "head", "options"};

struct MethodOrder {
  bool operator()(const std::string& a, const std::string& b) const {
    const int ra = method_rank(a);
    const int rb = method_rank(b);
    return ra != rb ? ra < rb : a < b;
  }
};

template <class Leaf>
using ByMethod = std::map<std::string, Leaf, MethodOrder>;

enum class Shape { path_methods, methods, names, name_values, codes };

Shape shape_of(Metric metric) {
  switch (metric) {
    case Metric::path: return Shape::path_methods;
    case Metric::operation: return Shape::methods;
    case Metric::parameter_value: return Shape::name_values;
    case Metric::status_code: return Shape::codes;
    case Metric::parameter:
    case Metric::request_content_type:
    case Metric::status_code_class:
    case Metric::response_content_type: return Shape::names;
  }
  return Shape::names;
}

OrderedJson method_list(const std::set<std::string>& methods) {
  std::set<std::string, MethodOrder> ordered;
  for (const auto& method : methods) ordered.insert(report_method(method));
  OrderedJson list = OrderedJson::array();
  for (const auto& method : ordered) list.push_back(method);
  return list;
}

OrderedJson section(const MetricResult& result, const std::set<ElementKey>& elements) {
  OrderedJson out = OrderedJson::object();
  switch (shape_of(result.metric)) {
    case Shape::path_methods: {
      for (const auto& element : elements) {
        const auto it = result.path_methods.find(element.path);
        out[element.path] = method_list(it == result.path_methods.end() ? std::set<std::string>{}
                                                                        : it->second);
      }
      break;
    }
    case Shape::methods: {
      std::map<std::string, std::set<std::string>> grouped;
      for (const auto& element : elements) grouped[element.path].insert(element.method);
      for (const auto& [path, methods] : grouped) out[path] = method_list(methods);
      break;
    }
    case Shape::names: {
      std::map<std::string, ByMethod<std::set<std::string>>> grouped;
      for (const auto& element : elements) {
        grouped[element.path][report_method(element.method)].insert(element.name);
      }
      for (const auto& [path, methods] : grouped) {
        auto& node = out[path] = OrderedJson::object();
        for (const auto& [method, names] : methods) node[method] = names;
      }
      break;
    }
    case Shape::codes: {
      std::map<std::string, ByMethod<std::set<int>>> grouped;
      for (const auto& element : elements) {
        grouped[element.path][report_method(element.method)].insert(std::stoi(element.name));
      }
      for (const auto& [path, methods] : grouped) {
        auto& node = out[path] = OrderedJson::object();
        for (const auto& [method, codes] : methods) node[method] = codes;
      }
      break;
    }
    case Shape::name_values: {
      std::map<std::string, ByMethod<std::map<std::string, std::set<std::string>>>> grouped;
      for (const auto& element : elements) {
        grouped[element.path][report_method(element.method)][element.name].insert(element.value);
      }
      for (const auto& [path, methods] : grouped) {
        auto& node = out[path] = OrderedJson::object();
        for (const auto& [method, parameters] : methods) {
          auto& by_name = node[method] = OrderedJson::object();
          for (const auto& [name, values] : parameters) by_name[name] = values;
        }
      }
      break;
    }
  }
  return out;
}

void write_atomically(const fs::path& file, const std::string& content) {
  auto temporary = file;
  temporary += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) throw ReportWriteError("cannot write " + temporary.string());
    out << content;
    out.flush();
    if (!out) throw ReportWriteError("cannot write " + temporary.string());
  }
  std::error_code ec;
  fs::rename(temporary, file, ec);
  if (ec) {
    fs::remove(temporary, ec);
    throw ReportWriteError("cannot replace " + file.string() + ": " + ec.message());
  }
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ReportWriteError("cannot create report directory " + dir.string() +
                           (ec ? ": " + ec.message() : std::string()));
  }
}

}  // namespace

int method_rank(std::string_view method) {
  const auto lower = to_lower(method);
  for (std::size_t i = 0; i < kMethodOrder.size(); ++i) {
    if (kMethodOrder[i] == lower) return static_cast<int>(i);
  }
  return static_cast<int>(kMethodOrder.size());
}

std::string report_method(std::string_view method) { return to_lower(method); }

OrderedJson stats_document(const CoverageReport& report) {
  OrderedJson stats = OrderedJson::object();
  for (auto metric : kAllMetrics) {
    const auto& result = report.get(metric);
    OrderedJson entry = OrderedJson::object();
    entry["raw"] = OrderedJson::object();
    entry["raw"]["documented"] = result.documented;
    entry["raw"]["documentedAndTested"] = result.documented_and_tested;
    entry["raw"]["totalTested"] = result.total_tested;
    entry["rate"] = result.rate;
    stats[std::string(metric_name(metric))] = std::move(entry);
  }
  stats["TCL"] = report.tcl;
  stats["tclCapped"] = report.tcl_capped;
  return stats;
}

OrderedJson detail_document(const MetricResult& result) {
  OrderedJson document = OrderedJson::object();
  document["documentedAndTested"] = section(result, result.documented_and_tested_detail);
  document["documentedAndNotTested"] = section(result, result.documented_and_not_tested_detail);
  document["notDocumentedAndTested"] = section(result, result.not_documented_and_tested_detail);
  return document;
}

std::string render_json(const OrderedJson& document) {
  // Undocumented raw paths come from traffic and need not be valid UTF-8.
  return document.dump(4, ' ', false, OrderedJson::error_handler_t::replace) + "\n";
}

fs::path write_stats_report(const CoverageReport& report, const fs::path& out_dir) {
  ensure_directory(out_dir);
  const auto file = out_dir / "stats.json";
  write_atomically(file, render_json(stats_document(report)));
  return file;
}

std::vector<fs::path> write_detail_reports(const CoverageReport& report, const fs::path& out_dir) {
  ensure_directory(out_dir);
  std::vector<fs::path> files;
  for (auto metric : kAllMetrics) {
    auto file = out_dir / (std::string(metric_name(metric)) + ".json");
    write_atomically(file, render_json(detail_document(report.get(metric))));
    files.push_back(std::move(file));
  }
  return files;
}

}  // namespace restcov
