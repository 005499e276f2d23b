// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <httplib.h>

#include <mutex>
#include <thread>

#include "restcov/capture_proxy.hpp"
#include "restcov/errors.hpp"
#include "restcov/http_message.hpp"
#include "test_paths.hpp"

namespace restcov {
namespace {

using testing::TempDir;

TEST(ParseUpstream, AcceptsPlainHttpOnly) {
  const auto target = parse_upstream("http://example.org:9000/api/v1/");
  EXPECT_EQ(target.host, "example.org");
  EXPECT_EQ(target.port, "9000");
  EXPECT_EQ(target.base_path, "/api/v1");
  const auto defaults = parse_upstream("http://localhost");
  EXPECT_EQ(defaults.port, "80");
  EXPECT_EQ(defaults.base_path, "");
  EXPECT_THROW(parse_upstream("https://secure"), ProxyError);
  EXPECT_THROW(parse_upstream("localhost:80"), ProxyError);
  EXPECT_THROW(parse_upstream("http://"), ProxyError);
}

TEST(UpstreamRequestTarget, OriginFormWithBase) {
  EXPECT_EQ(upstream_request_target("/pet?x=1", ""), "/pet?x=1");
  EXPECT_EQ(upstream_request_target("/pet?x=1", "/v2"), "/v2/pet?x=1");
  EXPECT_EQ(upstream_request_target("http://proxy:8080/pet", "/v2"), "/v2/pet");
  EXPECT_EQ(upstream_request_target("http://proxy:8080", ""), "/");
}

TEST(NormalizeResponse, DropsHopByHopAndDechunks) {
  const auto normalized = normalize_response(
      "HTTP/1.1 200 OK\r\nConnection: keep-alive, X-Private\r\nX-Private: 1\r\nTransfer-Encoding: chunked\r\n"
      "Keep-Alive: timeout=5\r\nContent-Type: text/plain",
      "hello world", false);
  const auto response = parse_response(normalized);
  EXPECT_EQ(response.body, "hello world");
  EXPECT_EQ(response.headers.find("Content-Length"), "11");
  EXPECT_FALSE(response.headers.contains("Connection"));
  EXPECT_FALSE(response.headers.contains("X-Private"));
  EXPECT_FALSE(response.headers.contains("Transfer-Encoding"));
  EXPECT_FALSE(response.headers.contains("Keep-Alive"));
  EXPECT_EQ(response.headers.find("content-type"), "text/plain");
}

TEST(NormalizeResponse, BodylessResponsesGetNoLength) {
  const auto normalized = normalize_response("HTTP/1.1 204 No Content\r\nDate: x", "", true);
  EXPECT_EQ(normalized, "HTTP/1.1 204 No Content\r\nDate: x\r\n\r\n");
}

TEST(CaptureProxy, OccupiedPortIsABindError) {
  TempDir dir;
  ProxyConfig config;
  config.listen_address = "127.0.0.1:0";
  config.upstream_base = "http://127.0.0.1:9";
  config.output_dir = dir / "out";
  CaptureProxy first(config);
  config.listen_address = "127.0.0.1:" + std::to_string(first.port());
  EXPECT_THROW(CaptureProxy second(config), BindError);
  config.listen_address = "not-an-address";
  EXPECT_THROW(CaptureProxy third(config), ProxyError);
}

struct Upstream {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  Upstream() {
    server.Get(R"(/base/item/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
      res.set_content("{\"id\": " + req.matches[1].str() + "}", "application/json");
    });
    server.Post("/base/echo", [](const httplib::Request& req, httplib::Response& res) {
      res.status = 201;
      res.set_content(req.body, "application/octet-stream");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Upstream() {
    server.stop();
    thread.join();
  }
};

struct RunningProxy {
  std::mutex log_mutex;
  std::vector<std::string> logged;
  CaptureProxy proxy;
  std::thread thread;

  explicit RunningProxy(ProxyConfig config) : proxy(with_log(std::move(config), this)) {
    thread = std::thread([this] { proxy.serve(); });
  }
  ~RunningProxy() {
    proxy.stop();
    thread.join();
  }

  std::size_t log_size() {
    std::lock_guard lock(log_mutex);
    return logged.size();
  }

  static ProxyConfig with_log(ProxyConfig config, RunningProxy* self) {
    config.log = [self](const std::string& message) {
      std::lock_guard lock(self->log_mutex);
      self->logged.push_back(message);
    };
    return config;
  }
};

TEST(CaptureProxy, RecordsSequentialExchanges) {
  Upstream upstream;
  TempDir dir;
  ProxyConfig config;
  config.listen_address = "127.0.0.1:0";
  config.upstream_base = "http://127.0.0.1:" + std::to_string(upstream.port) + "/base";
  config.output_dir = dir / "dumps";
  config.starting_sequence = 1;
  {
    RunningProxy running(config);
    httplib::Client client("127.0.0.1", running.proxy.port());
    for (int i = 1; i <= 4; ++i) {
      const auto result = client.Get("/item/" + std::to_string(i));
      ASSERT_TRUE(result);
      EXPECT_EQ(result->status, 200);
      EXPECT_EQ(result->body, "{\"id\": " + std::to_string(i) + "}");
    }
    std::string binary(300, '\0');
    for (std::size_t i = 0; i < binary.size(); ++i) binary[i] = static_cast<char>(i * 7);
    const auto echoed = client.Post("/echo", binary, "application/octet-stream");
    ASSERT_TRUE(echoed);
    EXPECT_EQ(echoed->status, 201);
    EXPECT_EQ(echoed->body, binary);
    EXPECT_EQ(running.proxy.exchanges_started(), 5u);
  }
  for (int i = 1; i <= 5; ++i) {
    const auto request = parse_request(testing::read_file(dir / "dumps" / (std::to_string(i) + "-request.txt")));
    const auto response = parse_response(testing::read_file(dir / "dumps" / (std::to_string(i) + "-response.txt")));
    if (i < 5) {
      EXPECT_EQ(request.raw_path, "/item/" + std::to_string(i)) << "the client's target is recorded";
      EXPECT_EQ(response.status_code, 200);
    } else {
      EXPECT_EQ(request.method, "POST");
      EXPECT_EQ(request.body.size(), 300u);
      EXPECT_EQ(response.body, request.body);
    }
  }
}

TEST(CaptureProxy, UnreachableUpstreamLeavesOrphanAnd502) {
  // Reserve a port, then close it so nothing listens there.
  const int probe = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ASSERT_EQ(::bind(probe, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
  socklen_t length = sizeof(addr);
  ::getsockname(probe, reinterpret_cast<sockaddr*>(&addr), &length);
  const int dead_port = ntohs(addr.sin_port);
  ::close(probe);

  TempDir dir;
  ProxyConfig config;
  config.listen_address = "127.0.0.1:0";
  config.upstream_base = "http://127.0.0.1:" + std::to_string(dead_port);
  config.output_dir = dir.path();
  config.starting_sequence = 40;
  config.upstream_timeout = std::chrono::milliseconds(500);
  RunningProxy running(config);
  httplib::Client client("127.0.0.1", running.proxy.port());
  const auto result = client.Get("/anything");
  ASSERT_TRUE(result);
  EXPECT_EQ(result->status, 502);
  EXPECT_EQ(running.log_size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir / "40-request.txt"));
  EXPECT_FALSE(std::filesystem::exists(dir / "40-response.txt"));
}

TEST(CaptureProxy, MalformedRequestsAreRejectedUnrecorded) {
  Upstream upstream;
  TempDir dir;
  ProxyConfig config;
  config.listen_address = "127.0.0.1:0";
  config.upstream_base = "http://127.0.0.1:" + std::to_string(upstream.port);
  config.output_dir = dir.path();
  RunningProxy running(config);

  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(running.proxy.port());
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ASSERT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
  const std::string garbage = "NONSENSE\r\n\r\n";
  ASSERT_EQ(::send(fd, garbage.data(), garbage.size(), 0), static_cast<ssize_t>(garbage.size()));
  char buffer[256];
  const auto received = ::recv(fd, buffer, sizeof(buffer), 0);
  ::close(fd);
  ASSERT_GT(received, 0);
  EXPECT_EQ(std::string(buffer, static_cast<std::size_t>(received)).substr(0, 12), "HTTP/1.1 400");
  EXPECT_EQ(running.proxy.exchanges_started(), 0u);
  EXPECT_TRUE(std::filesystem::is_empty(dir.path()));
}

}  // namespace
}  // namespace restcov
