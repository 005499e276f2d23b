// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "restcov/errors.hpp"
#include "restcov/pipeline.hpp"
#include "test_paths.hpp"

namespace restcov {
namespace {

using nlohmann::json;
using testing::TempDir;

json full_config(const std::filesystem::path& reports, const std::filesystem::path& db) {
  const auto petstore = testing::petstore_dir();
  return {{"modules", "all"},
          {"specification", (petstore / "petstore.json").string()},
          {"dumpsDir", (petstore / "dumps").string()},
          {"reportsDir", reports.string()},
          {"dbPath", db.string()}};
}

std::string validation_key(const json& document) {
  try {
    parse_config(document, "/");
  } catch (const ConfigValidationError& e) {
    return e.key();
  }
  return {};
}

TEST(ParseConfig, StageNames) {
  EXPECT_EQ(to_string(Stage::all), "all");
  EXPECT_EQ(to_string(Stage::data_collection), "dataCollection");
  EXPECT_EQ(to_string(Stage::statistics), "statistics");
  auto config = full_config("/r", "/d.sqlite");
  EXPECT_EQ(parse_config(config, "/").modules, Stage::all);
  config["modules"] = "dataCollection";
  EXPECT_EQ(parse_config(config, "/").modules, Stage::data_collection);
}

TEST(ParseConfig, ErrorsNameTheKey) {
  auto config = full_config("/r", "/d.sqlite");
  config.erase("modules");
  EXPECT_EQ(validation_key(config), "modules");
  config = full_config("/r", "/d.sqlite");
  config["modules"] = "everything";
  EXPECT_EQ(validation_key(config), "modules");
  config = full_config("/r", "/d.sqlite");
  config.erase("dbPath");
  EXPECT_EQ(validation_key(config), "dbPath");
  config = full_config("/r", "/d.sqlite");
  config["specification"] = 3;
  EXPECT_EQ(validation_key(config), "specification");
  EXPECT_THROW(parse_config(json::array(), "/"), ConfigError);
}

TEST(ParseConfig, StageSpecificKeys) {
  auto config = full_config("/r", "/d.sqlite");
  config["modules"] = "statistics";
  config.erase("dumpsDir");
  EXPECT_TRUE(parse_config(config, "/").dumps_dir.empty());
  config["modules"] = "all";
  EXPECT_EQ(validation_key(config), "dumpsDir");
  config = full_config("/r", "/d.sqlite");
  config["modules"] = "dataCollection";
  config.erase("reportsDir");
  EXPECT_TRUE(parse_config(config, "/").reports_dir.empty());
  config["modules"] = "statistics";
  EXPECT_EQ(validation_key(config), "reportsDir");
}

TEST(ParseConfig, RelativePathsResolveAgainstConfigDirWithWarning) {
  Diagnostics diagnostics;
  const auto config = parse_config(
      {{"modules", "all"}, {"specification", "s.json"}, {"dumpsDir", "d"}, {"reportsDir", "/abs"}, {"dbPath", "x.db"}},
      "/base", &diagnostics);
  EXPECT_EQ(config.specification, "/base/s.json");
  EXPECT_EQ(config.dumps_dir, "/base/d");
  EXPECT_EQ(config.reports_dir, "/abs");
  EXPECT_EQ(diagnostics.warnings().size(), 3u);
}

TEST(LoadConfig, FileErrors) {
  TempDir dir;
  EXPECT_THROW(load_config(dir / "missing.json"), ConfigNotFound);
  testing::write_file(dir / "bad.json", "{ nope");
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigParseError);
}

int run_with(const json& document, std::string* err_text = nullptr) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(parse_config(document, "/"), out, err);
  if (err_text != nullptr) *err_text = err.str();
  return code;
}

TEST(Run, SuccessPrintsSummaryAndWritesReports) {
  TempDir dir;
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run(parse_config(full_config(dir / "reports", dir / "db.sqlite"), "/"), out, err), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "reports" / "stats.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "db.sqlite"));
  EXPECT_NE(out.str().find("TCL: 0"), std::string::npos);
  EXPECT_NE(out.str().find("operationCoverage"), std::string::npos);
  EXPECT_NE(out.str().find("5 requests parsed"), std::string::npos);
}

TEST(Run, ExitCodesPerComponent) {
  TempDir dir;
  auto config = full_config(dir / "reports", dir / "db.sqlite");
  config["specification"] = (dir / "nope.json").string();
  std::string err;
  EXPECT_EQ(run_with(config, &err), 2);
  EXPECT_NE(err.find("error: "), std::string::npos);

  config = full_config(dir / "reports", dir / "db.sqlite");
  config["dumpsDir"] = (dir / "nodumps").string();
  EXPECT_EQ(run_with(config), 3);

  config = full_config(dir / "reports", dir / "db.sqlite");
  config["modules"] = "statistics";
  config["dbPath"] = (dir / "absent.sqlite").string();
  EXPECT_EQ(run_with(config), 4);

  testing::write_file(dir / "blocker", "x");
  config = full_config(dir / "blocker", dir / "db2.sqlite");
  EXPECT_EQ(run_with(config), 5);
}

TEST(Run, ConfigFileErrorsExitWithOne) {
  TempDir dir;
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run_config_file(dir / "none.json", out, err), 1);
  testing::write_file(dir / "c.json", R"({"modules": "all"})");
  EXPECT_EQ(run_config_file(dir / "c.json", out, err), 1);
  EXPECT_NE(err.str().find("specification"), std::string::npos);
}

TEST(Run, SplitStagesMatchSingleRun) {
  TempDir dir;
  EXPECT_EQ(run_with(full_config(dir / "a", dir / "a.sqlite")), 0);
  auto config = full_config(dir / "b", dir / "b.sqlite");
  config["modules"] = "dataCollection";
  EXPECT_EQ(run_with(config), 0);
  EXPECT_FALSE(std::filesystem::exists(dir / "b"));
  config["modules"] = "statistics";
  EXPECT_EQ(run_with(config), 0);
  for (const auto& entry : std::filesystem::directory_iterator(dir / "a")) {
    EXPECT_EQ(testing::read_file(entry.path()), testing::read_file(dir / "b" / entry.path().filename()));
  }
}

TEST(Cli, RunsConfigFileAndReportsBadArguments) {
  TempDir dir;
  const auto config = testing::write_petstore_config(dir.path(), "all", dir / "reports", dir / "db.sqlite");
  const auto command = testing::cli_path().string() + " " + config.string() + " > " + (dir / "out.txt").string() + " 2>&1";
  EXPECT_EQ(std::system(command.c_str()), 0);
  EXPECT_NE(testing::read_file(dir / "out.txt").find("TCL: 0"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "reports" / "pathCoverage.json"));

  const auto missing = testing::cli_path().string() + " " + (dir / "absent.json").string() + " > /dev/null 2>&1";
  const int status = std::system(missing.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 1);
}

}  // namespace
}  // namespace restcov
