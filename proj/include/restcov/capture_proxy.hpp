// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>

namespace restcov {

struct ProxyConfig {
  std::string listen_address = "127.0.0.1:8080";  // host:port, port 0 picks a free one
  std::string upstream_base;                      // http://host:port[/base]
  std::filesystem::path output_dir;
  std::uint64_t starting_sequence = 1;
  std::chrono::milliseconds upstream_timeout{10000};
  std::chrono::milliseconds client_idle_timeout{30000};
  /// Receives per-exchange failures. Defaults to stderr.
  std::function<void(const std::string&)> log;
};

struct UpstreamTarget {
  std::string host;
  std::string port;
  std::string base_path;  // no trailing slash, may be empty
};

/// Throws ProxyError for anything but plain http://host[:port][/base].
UpstreamTarget parse_upstream(std::string_view url);

/// Rewrites an absolute-form request target to origin form and prefixes the
/// upstream base path.
std::string upstream_request_target(std::string_view target, std::string_view base_path);

/// Dumped form of an upstream response: hop-by-hop headers dropped, chunked
/// bodies decoded and a Content-Length supplied when the body was not
/// length-delimited. `head` is the header block without the blank line.
std::string normalize_response(std::string_view head, std::string_view body, bool bodyless);

/// Recording forward proxy. Each exchange gets the next sequence number; the
/// request file is written on receipt and the response file once the upstream
/// answer is complete. Upstream failures leave the request file unpaired and
/// answer the client with 502.
class CaptureProxy {
 public:
  /// Binds the listening socket. Throws BindError or ProxyError.
  explicit CaptureProxy(ProxyConfig config);
  ~CaptureProxy();

  CaptureProxy(const CaptureProxy&) = delete;
  CaptureProxy& operator=(const CaptureProxy&) = delete;

  std::uint16_t port() const noexcept { return port_; }

  /// Accepts connections until stop() is called, then waits for open
  /// connections to finish.
  void serve();
  void stop() noexcept { stopping_ = true; }

  std::uint64_t exchanges_started() const;

 private:
  void handle_connection(int client);
  bool handle_exchange(int client, std::string& pending);
  std::uint64_t record_request(std::string_view raw);
  void record_response(std::uint64_t sequence, std::string_view normalized);
  void log(const std::string& message) const;

  ProxyConfig config_;
  UpstreamTarget upstream_;
  int listener_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  mutable std::mutex files_mutex_;
  std::uint64_t next_sequence_;
  std::mutex workers_mutex_;
  std::condition_variable workers_done_;
  std::size_t active_workers_ = 0;
};

}  // namespace restcov
