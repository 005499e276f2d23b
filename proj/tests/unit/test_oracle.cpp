// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracle.hpp"

namespace restcov::testing {
namespace {

GenSpec tiny_spec() {
  GenSpec spec;
  spec.version = 2;
  spec.base = "/api";
  spec.global_consumes = {"application/json"};
  spec.global_produces = {"application/json"};
  GenOp get{"get", {{"color", "query", {"red", "blue"}}}, false, std::nullopt, std::nullopt, {"200", "404"}};
  GenOp put{"put", {}, true, std::nullopt, std::nullopt, {"204", "default"}};
  GenOp show{"get", {{"id", "path"}}, false, std::nullopt, std::nullopt, {"200"}};
  spec.paths.push_back({{"items"}, {get, put}});
  spec.paths.push_back({{"items", "{id}"}, {show}});
  spec.paths.push_back({{"items", "special"}, {show}});
  spec.paths.back().ops[0].params.clear();
  return spec;
}

GenExchange exchange(std::string method, std::string path, std::optional<int> status) {
  GenExchange ex;
  ex.method = std::move(method);
  ex.path = std::move(path);
  ex.status = status;
  if (status) ex.response_content_type = "application/json";
  return ex;
}

TEST(OracleMatch, LiteralWinsAndBaseIsStripped) {
  const auto spec = tiny_spec();
  EXPECT_EQ(oracle_match(spec, "/api/items/special"), "/items/special");
  EXPECT_EQ(oracle_match(spec, "/api/items/7"), "/items/{id}");
  EXPECT_EQ(oracle_match(spec, "/api/items"), "/items");
  EXPECT_EQ(oracle_match(spec, "/api/other"), "");
  EXPECT_EQ(oracle_match(spec, "/api/items/7/x"), "");
}

TEST(OracleCoverage, HandCountedCase) {
  const auto spec = tiny_spec();
  auto first = exchange("GET", "/api/items", 200);
  first.query = {{"color", "red"}, {"extra", "1"}};
  auto second = exchange("PUT", "/api/items", 500);
  second.content_type = "Application/JSON; charset=utf-8";
  const auto orphan = exchange("GET", "/api/items/9", std::nullopt);
  const auto stray = exchange("GET", "/nowhere", 200);
  const auto report = oracle_coverage(spec, {first, second, orphan, stray});

  const auto& path = report.get(Metric::path);
  EXPECT_EQ(path.documented.size(), 3u);
  EXPECT_EQ(path.documented_and_tested().size(), 2u);
  EXPECT_EQ(path.not_documented_and_tested(), (std::set<std::string>{"/nowhere|||"}));

  const auto& op = report.get(Metric::operation);
  EXPECT_EQ(op.documented.size(), 4u);
  EXPECT_EQ(op.documented_and_tested().size(), 3u);

  const auto& param = report.get(Metric::parameter);
  EXPECT_EQ(param.documented_and_tested(),
            (std::set<std::string>{"/items|GET|color|", "/items/{id}|GET|id|"}));
  EXPECT_EQ(param.not_documented_and_tested(), (std::set<std::string>{"/items|GET|extra|"}));

  EXPECT_EQ(report.get(Metric::parameter_value).documented_and_tested(),
            (std::set<std::string>{"/items|GET|color|red"}));
  EXPECT_EQ(report.get(Metric::request_content_type).documented_and_tested(),
            (std::set<std::string>{"/items|PUT|application/json|"}));

  const auto& classes = report.get(Metric::status_code_class);
  EXPECT_EQ(classes.documented.size(), 8u);
  EXPECT_EQ(classes.documented_and_tested(),
            (std::set<std::string>{"/items|GET|correct|", "/items|PUT|erroneous|"}));

  const auto& codes = report.get(Metric::status_code);
  EXPECT_EQ(codes.documented.size(), 5u) << "default is not a code";
  EXPECT_EQ(codes.not_documented_and_tested(), (std::set<std::string>{"/items|PUT|500|"}));
  EXPECT_EQ(report.tcl, 0);
}

TEST(OracleCoverage, AgreesWithProductionOnASample) {
  Rng rng(42);
  for (int i = 0; i < 20; ++i) {
    const auto spec = random_spec(rng);
    const auto traffic = random_traffic(spec, rng, 30);
    const auto expected = oracle_coverage(spec, traffic);
    const auto loaded = load_generated(spec);
    const auto actual = compute_coverage(build_inventory(loaded), ingest_generated(traffic, loaded));
    for (Metric metric : kAllMetrics) {
      EXPECT_EQ(element_strings(actual.get(metric).documented_and_tested_detail),
                expected.get(metric).documented_and_tested());
    }
    EXPECT_EQ(actual.tcl, expected.tcl);
  }
}

TEST(OracleCoverage, DetectsAMutatedProductionResult) {
  Rng rng(7);
  const auto spec = random_spec(rng);
  const auto traffic = random_traffic(spec, rng, 30);
  const auto expected = oracle_coverage(spec, traffic);
  const auto loaded = load_generated(spec);
  auto actual = compute_coverage(build_inventory(loaded), ingest_generated(traffic, loaded));
  auto& operations = actual.results[static_cast<std::size_t>(Metric::operation)];
  operations.documented_and_tested_detail.insert({"/mutant", "GET", "", ""});
  EXPECT_NE(element_strings(operations.documented_and_tested_detail),
            expected.get(Metric::operation).documented_and_tested());
}

}  // namespace
}  // namespace restcov::testing
