// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "restcov/interaction.hpp"
#include "restcov/spec_model.hpp"

namespace restcov::testing {

// A small API model that is rendered to a real OpenAPI document and, in
// parallel, interpreted directly by the brute-force oracle.

struct GenParam {
  std::string name;
  std::string in;  // path, query, header, cookie
  std::vector<std::string> enum_values;
  bool boolean = false;
  bool array = false;
  bool path_level = false;  // declared on the path item instead of the operation

  bool finite() const { return boolean || !enum_values.empty(); }
};

struct GenOp {
  std::string method;  // lower-case
  std::vector<GenParam> params;
  bool has_body = false;
  std::optional<std::vector<std::string>> consumes;  // nullopt falls back to the global list (v2)
  std::optional<std::vector<std::string>> produces;
  std::vector<std::string> status_keys;  // "200", "default", ...
};

struct GenPath {
  std::vector<std::string> segments;  // "users" or "{p0}"
  std::vector<GenOp> ops;

  std::string text() const;
};

struct GenSpec {
  int version = 2;
  std::string base;  // "" or "/api"
  std::vector<std::string> global_consumes;
  std::vector<std::string> global_produces;
  std::vector<GenPath> paths;
};

struct GenExchange {
  std::string method;  // upper-case as sent
  std::string path;    // concrete path as sent, percent-encoded
  std::vector<std::pair<std::string, std::string>> query;  // raw name=value text as sent
  std::vector<std::pair<std::string, std::string>> headers;
  std::vector<std::pair<std::string, std::string>> cookies;
  std::optional<std::string> content_type;
  std::string body;
  std::optional<int> status;  // nullopt: no response (orphan)
  std::optional<std::string> response_content_type;
  std::string response_body;
};

struct GenLimits {
  int max_paths = 5;
  int max_ops_per_path = 3;
  int max_params_per_op = 3;
  int max_interactions = 50;
};

using Rng = std::mt19937_64;

GenSpec random_spec(Rng& rng, const GenLimits& limits = {});
std::vector<GenExchange> random_traffic(const GenSpec& spec, Rng& rng, int count);

/// OpenAPI JSON text for the model (Swagger 2.0 or OpenAPI 3.0).
std::string render_openapi(const GenSpec& spec);

std::string render_request(const GenExchange& exchange);
std::optional<std::string> render_response(const GenExchange& exchange);

/// Loads the rendered model through the production loader.
ApiSpecification load_generated(const GenSpec& spec);

/// Parses and classifies the rendered traffic through the production code,
/// numbering interactions from 1.
std::vector<HttpInteraction> ingest_generated(const std::vector<GenExchange>& traffic,
                                              const ApiSpecification& spec);

std::string percent_encode(std::string_view text);

}  // namespace restcov::testing
