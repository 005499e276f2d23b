// SPDX-License-Identifier: Apache-2.0
#include "restcov/inventory.hpp"

#include <algorithm>

#include "restcov/media_type.hpp"

namespace restcov {

namespace {

bool any_wildcard(const std::vector<std::string>& media_types) {
  return std::any_of(media_types.begin(), media_types.end(),
                     [](const std::string& type) { return is_wildcard_media_type(type); });
}

}  // namespace

TestableElementInventory build_inventory(const ApiSpecification& spec) {
  TestableElementInventory inventory;
  for (const auto& path : spec.paths()) {
    const auto& text = path.text();
    inventory.paths.insert({text, {}, {}, {}});

    for (const auto& operation : path.operations()) {
      const auto& method = operation.method;
      const OperationKey key{text, method};
      inventory.operations.insert({text, method, {}, {}});
      inventory.operation_parameters[key] = operation.parameters;

      for (const auto& parameter : operation.parameters) {
        inventory.parameters.insert({text, method, parameter.name, {}});
        if (!parameter.domain.is_finite()) continue;
        for (const auto& value : parameter.domain.values()) {
          inventory.parameter_values.insert({text, method, parameter.name, value});
        }
      }

      if (any_wildcard(operation.request_content_types)) {
        inventory.request_content_type_exclusions.insert(key);
      } else {
        for (const auto& type : operation.request_content_types) {
          inventory.request_content_types.insert({text, method, type, {}});
        }
      }

      if (any_wildcard(operation.response_content_types)) {
        inventory.response_content_type_exclusions.insert(key);
      } else {
        for (const auto& type : operation.response_content_types) {
          inventory.response_content_types.insert({text, method, type, {}});
        }
      }

      for (const auto& status : operation.documented_status_codes) {
        if (status.is_default()) continue;
        inventory.status_codes.insert({text, method, std::to_string(*status.code), {}});
      }

      inventory.status_code_classes.insert({text, method, std::string(kCorrectClass), {}});
      inventory.status_code_classes.insert({text, method, std::string(kErroneousClass), {}});
    }
  }
  return inventory;
}

}  // namespace restcov
