// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "restcov/spec_model.hpp"

namespace restcov {

struct OperationKey {
  std::string path;    // template text
  std::string method;  // upper-case

  auto operator<=>(const OperationKey&) const = default;
};

/// A testable element. Unused trailing fields stay empty: a path is
/// {path}, an operation {path, method}, a parameter {path, method, name},
/// a parameter value {path, method, name, value}. Content types, status
/// codes and status classes occupy `name`.
struct ElementKey {
  std::string path;
  std::string method;
  std::string name;
  std::string value;

  auto operator<=>(const ElementKey&) const = default;
};

inline constexpr std::string_view kCorrectClass = "correct";
inline constexpr std::string_view kErroneousClass = "erroneous";

struct TestableElementInventory {
  std::set<ElementKey> paths;
  std::set<ElementKey> operations;
  std::set<ElementKey> parameters;
  std::set<ElementKey> parameter_values;
  std::set<ElementKey> request_content_types;
  std::set<ElementKey> status_codes;
  std::set<ElementKey> status_code_classes;
  std::set<ElementKey> response_content_types;

  // Operations whose consume/produce list contains a wildcard. They are left
  // out of the corresponding content-type metric entirely.
  std::set<OperationKey> request_content_type_exclusions;
  std::set<OperationKey> response_content_type_exclusions;

  // Parameter declarations per documented operation, needed to recognise
  // header, cookie and finite-domain parameters in traffic.
  std::map<OperationKey, std::vector<ParameterDescriptor>> operation_parameters;
};

TestableElementInventory build_inventory(const ApiSpecification& spec);

}  // namespace restcov
