// SPDX-License-Identifier: Apache-2.0
#include "test_paths.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace restcov::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("restcov-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path fixture_dir() { return RESTCOV_FIXTURE_DIR; }
fs::path petstore_dir() { return fixture_dir() / "petstore"; }
fs::path cli_path() { return RESTCOV_CLI_PATH; }

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + file.string());
}

nlohmann::json order_normalized(const nlohmann::json& document) {
  if (document.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, value] : document.items()) out[key] = order_normalized(value);
    return out;
  }
  if (document.is_array()) {
    std::vector<nlohmann::json> items;
    for (const auto& item : document) items.push_back(order_normalized(item));
    std::sort(items.begin(), items.end());
    return items;
  }
  return document;
}

fs::path write_petstore_config(const fs::path& dir, const std::string& modules, const fs::path& reports,
                               const fs::path& db) {
  nlohmann::json config = {{"modules", modules},
                           {"specification", (petstore_dir() / "petstore.json").string()},
                           {"dumpsDir", (petstore_dir() / "dumps").string()},
                           {"reportsDir", reports.string()},
                           {"dbPath", db.string()}};
  const auto file = dir / ("config-" + modules + ".json");
  write_file(file, config.dump(2));
  return file;
}

}  // namespace restcov::testing
