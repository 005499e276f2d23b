// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "restcov/dump_ingest.hpp"
#include "restcov/errors.hpp"
#include "restcov/interaction_store.hpp"
#include "restcov/path_matcher.hpp"
#include "restcov/pipeline.hpp"
#include "restcov/report_writer.hpp"

namespace py = pybind11;

namespace {

struct Specification {
  restcov::ApiSpecification spec;
  std::vector<std::string> warnings;
};

Specification load(const std::filesystem::path& file) {
  restcov::Diagnostics diagnostics;
  auto spec = restcov::load_specification(file, &diagnostics);
  return {std::move(spec), diagnostics.warnings()};
}

Specification parse(const std::string& text) {
  restcov::Diagnostics diagnostics;
  auto spec = restcov::parse_specification(text, &diagnostics);
  return {std::move(spec), diagnostics.warnings()};
}

std::vector<std::pair<std::string, std::string>> operations(const Specification& s) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& path : s.spec.paths()) {
    for (const auto& op : path.operations()) out.emplace_back(path.text(), op.method);
  }
  return out;
}

py::object match(const Specification& s, const std::string& path) {
  const auto stripped = restcov::strip_server_prefix(path, s.spec.server_prefixes());
  const auto result = restcov::match_path(stripped, s.spec);
  if (!result) return py::none();
  return py::make_tuple(result->path_template->text(), result->extracted_parameters);
}

py::dict request_dict(const restcov::HttpRequestRecord& request) {
  py::list headers;
  for (const auto& [name, value] : request.headers.entries()) headers.append(py::make_tuple(name, value));
  py::dict out;
  out["method"] = request.method;
  out["path"] = request.raw_path;
  out["query"] = request.query_parameters;
  out["headers"] = headers;
  out["body"] = py::bytes(request.body);
  return out;
}

py::object classify(const Specification& s, const std::string& request_text) {
  const auto request = restcov::parse_request(request_text);
  const auto result = restcov::classify_interaction(request, s.spec);
  if (!result) return py::none();
  py::dict out;
  out["template"] = result->template_path;
  out["method"] = result->method;
  out["method_supported"] = result->method_supported;
  out["path_parameters"] = result->path_parameters;
  return out;
}

std::string render_stats(const restcov::ApiSpecification& spec,
                         const std::vector<restcov::HttpInteraction>& interactions) {
  const auto report = restcov::compute_coverage(restcov::build_inventory(spec), interactions);
  return restcov::render_json(restcov::stats_document(report));
}

std::string coverage_from_dumps(const std::filesystem::path& spec_file, const std::filesystem::path& dumps_dir) {
  const auto spec = restcov::load_specification(spec_file);
  return render_stats(spec, restcov::ingest_dump_directory(dumps_dir, spec).interactions);
}

std::string coverage_from_store(const std::filesystem::path& spec_file, const std::filesystem::path& store) {
  return render_stats(restcov::load_specification(spec_file), restcov::load_interactions(store));
}

py::tuple run_config(const std::filesystem::path& file) {
  std::ostringstream out;
  std::ostringstream err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = restcov::run_config_file(file, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Black-box REST API test coverage";

  static py::exception<restcov::Error> error(m, "RestcovError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const restcov::Error& e) {
      py::object instance = py::handle(error.ptr())(e.what());
      instance.attr("exit_code") = e.exit_code();
      PyErr_SetObject(error.ptr(), instance.ptr());
    }
  });

  py::class_<Specification>(m, "Specification")
      .def_static("load", &load, py::arg("file"), "Load an OpenAPI 2 or 3 document from disk.")
      .def_static("parse", &parse, py::arg("text"), "Parse an OpenAPI 2 or 3 document given as JSON or YAML.")
      .def_property_readonly("title", [](const Specification& s) { return s.spec.title(); })
      .def_property_readonly("server_prefixes", [](const Specification& s) { return s.spec.server_prefixes(); })
      .def_readonly("warnings", &Specification::warnings)
      .def("operations", &operations, "(template, METHOD) pairs in declaration order.")
      .def("match", &match, py::arg("path"),
           "Template and decoded placeholder values for a concrete path, or None.")
      .def("classify", &classify, py::arg("request"),
           "Attribute a raw HTTP request to an operation, or None when no template matches.");

  m.def("parse_request", [](const std::string& text) { return request_dict(restcov::parse_request(text)); },
        py::arg("text"), "Parse a raw HTTP request.");
  m.def("coverage_from_dumps", &coverage_from_dumps, py::arg("specification"), py::arg("dumps_dir"),
        "stats.json content for a dump directory.");
  m.def("coverage_from_store", &coverage_from_store, py::arg("specification"), py::arg("db_path"),
        "stats.json content for a persisted interaction store.");
  m.def("run_config", &run_config, py::arg("config"),
        "Run the tool on a config file; returns (exit_code, stdout, stderr).");
}
