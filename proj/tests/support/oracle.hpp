// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "generators.hpp"
#include "restcov/inventory.hpp"
#include "restcov/metrics.hpp"

namespace restcov::testing {

/// Expected sets for one metric, elements spelled "path|METHOD|name|value".
struct OracleMetric {
  std::set<std::string> documented;
  std::set<std::string> tested;

  std::set<std::string> documented_and_tested() const;
  std::set<std::string> documented_and_not_tested() const;
  std::set<std::string> not_documented_and_tested() const;
};

struct OracleReport {
  std::array<OracleMetric, 8> metrics;  // indexed like restcov::Metric
  int tcl = 0;

  const OracleMetric& get(Metric metric) const { return metrics[static_cast<std::size_t>(metric)]; }
};

/// Brute-force enumeration straight from the generator model and the raw
/// traffic, sharing no code with the production pipeline.
OracleReport oracle_coverage(const GenSpec& spec, const std::vector<GenExchange>& traffic);

/// Template the oracle attributes `raw_path` to, or "" when none matches.
std::string oracle_match(const GenSpec& spec, const std::string& raw_path);

std::string element_string(const ElementKey& key);
std::set<std::string> element_strings(const std::set<ElementKey>& keys);

}  // namespace restcov::testing
