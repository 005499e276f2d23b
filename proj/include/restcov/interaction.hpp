// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "restcov/http_message.hpp"
#include "restcov/inventory.hpp"

namespace restcov {

/// The (template, method) an exchange was attributed to. `method_supported`
/// is false when the template matched but the spec has no such operation on
/// it (e.g. PATCH on a path that only documents GET/POST/PUT).
struct OperationMatch {
  std::string template_path;
  std::string method;
  bool method_supported = false;
  std::map<std::string, std::string> path_parameters;

  OperationKey key() const { return {template_path, method}; }
  bool operator==(const OperationMatch&) const = default;
};

struct HttpInteraction {
  std::uint64_t sequence_id = 0;
  HttpRequestRecord request;
  std::optional<HttpResponseRecord> response;  // absent for orphan requests
  std::optional<OperationMatch> match;

  bool operator==(const HttpInteraction&) const = default;
};

}  // namespace restcov
