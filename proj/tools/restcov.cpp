// SPDX-License-Identifier: Apache-2.0
#include <csignal>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "restcov/capture_proxy.hpp"
#include "restcov/errors.hpp"
#include "restcov/pipeline.hpp"

namespace {

restcov::CaptureProxy* g_proxy = nullptr;

extern "C" void on_interrupt(int) {
  if (g_proxy != nullptr) g_proxy->stop();
}

int run_proxy(const restcov::ProxyConfig& config) {
  try {
    restcov::CaptureProxy proxy(config);
    g_proxy = &proxy;
    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);
    std::cerr << "recording on port " << proxy.port() << " -> " << config.upstream_base << ", dumps in "
              << config.output_dir.string() << '\n';
    proxy.serve();
    g_proxy = nullptr;
    std::cerr << "recorded " << proxy.exchanges_started() << " exchanges\n";
  } catch (const restcov::Error& e) {
    g_proxy = nullptr;
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Black-box REST API test coverage from recorded HTTP traffic"};
  app.require_subcommand(0, 1);

  std::string config_path = "config.json";
  app.add_option("config", config_path, "Configuration file (default ./config.json)");

  restcov::ProxyConfig proxy_config;
  std::string output_dir;
  long long timeout_ms = proxy_config.upstream_timeout.count();
  auto* proxy = app.add_subcommand("proxy", "Record traffic to dump files while forwarding it upstream");
  proxy->add_option("--listen", proxy_config.listen_address, "host:port to listen on")->required();
  proxy->add_option("--upstream", proxy_config.upstream_base, "http://host:port of the API under test")
      ->required();
  proxy->add_option("--out", output_dir, "Directory for <n>-request.txt / <n>-response.txt")->required();
  proxy->add_option("--start", proxy_config.starting_sequence, "First sequence number")
      ->check(CLI::PositiveNumber);
  proxy->add_option("--timeout-ms", timeout_ms, "Upstream timeout in milliseconds")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(restcov::ErrorCategory::config);
  }

  if (*proxy) {
    proxy_config.output_dir = output_dir;
    proxy_config.upstream_timeout = std::chrono::milliseconds(timeout_ms);
    return run_proxy(proxy_config);
  }
  return restcov::run_config_file(config_path, std::cout, std::cerr);
}
