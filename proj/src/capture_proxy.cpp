// SPDX-License-Identifier: Apache-2.0
#include "restcov/capture_proxy.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <netinet/in.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <memory>
#include <set>
#include <thread>

#include "restcov/errors.hpp"
#include "restcov/http_message.hpp"
#include "restcov/media_type.hpp"

namespace restcov {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kPollTickMs = 100;
constexpr std::size_t kReadChunk = 16 * 1024;

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { reset(); }
  Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Socket& operator=(Socket&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }

  int get() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }
  int release() noexcept { return std::exchange(fd_, -1); }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct HostPort {
  std::string host;
  std::string port;
};

HostPort split_host_port(std::string_view text, std::string_view default_port) {
  HostPort out;
  if (!text.empty() && text.front() == '[') {
    const auto close = text.find(']');
    if (close == std::string_view::npos) throw ProxyError("malformed address: " + std::string(text));
    out.host = std::string(text.substr(1, close - 1));
    const auto rest = text.substr(close + 1);
    if (rest.empty()) {
      out.port = std::string(default_port);
    } else if (rest.front() == ':') {
      out.port = std::string(rest.substr(1));
    } else {
      throw ProxyError("malformed address: " + std::string(text));
    }
  } else {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos) {
      out.host = std::string(text);
      out.port = std::string(default_port);
    } else {
      out.host = std::string(text.substr(0, colon));
      out.port = std::string(text.substr(colon + 1));
    }
  }
  unsigned value = 0;
  const auto* end = out.port.data() + out.port.size();
  const auto [ptr, ec] = std::from_chars(out.port.data(), end, value);
  if (out.port.empty() || ec != std::errc{} || ptr != end || value > 65535) {
    throw ProxyError("invalid port in address: " + std::string(text));
  }
  return out;
}

enum class WaitResult { ready, timeout, stopped };

/// Waits for readability in short ticks so a stop request is noticed.
WaitResult wait_readable(int fd, Clock::time_point deadline, const std::atomic<bool>* stopping) {
  while (true) {
    if (stopping != nullptr && stopping->load()) return WaitResult::stopped;
    const auto now = Clock::now();
    if (now >= deadline) return WaitResult::timeout;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    pollfd entry{fd, POLLIN, 0};
    const int rc = ::poll(&entry, 1, static_cast<int>(std::min<long long>(left + 1, kPollTickMs)));
    if (rc > 0) return WaitResult::ready;
    if (rc < 0 && errno != EINTR) return WaitResult::ready;  // let recv report it
  }
}

enum class ReadResult { data, closed, timeout, stopped, failed };

ReadResult read_some(int fd, std::string& buffer, Clock::time_point deadline,
                     const std::atomic<bool>* stopping) {
  switch (wait_readable(fd, deadline, stopping)) {
    case WaitResult::timeout: return ReadResult::timeout;
    case WaitResult::stopped: return ReadResult::stopped;
    case WaitResult::ready: break;
  }
  char chunk[kReadChunk];
  while (true) {
    const auto n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n > 0) {
      buffer.append(chunk, static_cast<std::size_t>(n));
      return ReadResult::data;
    }
    if (n == 0) return ReadResult::closed;
    if (errno == EINTR) continue;
    return ReadResult::failed;
  }
}

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const auto n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

/// Non-blocking connect bounded by `deadline`; the socket is left blocking.
Socket connect_upstream(const UpstreamTarget& target, Clock::time_point deadline, std::string& error) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (const int rc = ::getaddrinfo(target.host.c_str(), target.port.c_str(), &hints, &found); rc != 0) {
    error = std::string("cannot resolve upstream: ") + ::gai_strerror(rc);
    return {};
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(found, ::freeaddrinfo);
  error = "cannot connect to upstream";
  for (auto* info = found; info != nullptr; info = info->ai_next) {
    Socket sock(::socket(info->ai_family, info->ai_socktype, info->ai_protocol));
    if (!sock) continue;
    const int flags = ::fcntl(sock.get(), F_GETFL, 0);
    ::fcntl(sock.get(), F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(sock.get(), info->ai_addr, info->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      pollfd entry{sock.get(), POLLOUT, 0};
      rc = ::poll(&entry, 1, static_cast<int>(std::max<long long>(left.count(), 0)));
      if (rc == 1) {
        int so_error = 0;
        socklen_t len = sizeof so_error;
        ::getsockopt(sock.get(), SOL_SOCKET, SO_ERROR, &so_error, &len);
        rc = so_error == 0 ? 0 : -1;
        if (so_error != 0) error = std::string("cannot connect to upstream: ") + std::strerror(so_error);
      } else {
        if (rc == 0) error = "upstream connect timed out";
        rc = -1;
      }
    } else if (rc != 0) {
      error = std::string("cannot connect to upstream: ") + std::strerror(errno);
    }
    if (rc == 0) {
      ::fcntl(sock.get(), F_SETFL, flags);
      return sock;
    }
  }
  return {};
}

struct HeaderLine {
  std::string_view raw;  // including any folded continuation lines, without the final CRLF
  std::string name;      // lower-case
  std::string value;     // trimmed
};

/// Splits a header block (after the start line) into fields, keeping raw text.
std::vector<HeaderLine> header_lines(std::string_view block) {
  std::vector<HeaderLine> lines;
  std::size_t pos = 0;
  while (pos < block.size()) {
    auto end = block.find('\n', pos);
    if (end == std::string_view::npos) end = block.size();
    auto line = block.substr(pos, end - pos);
    const auto next = end == block.size() ? end : end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && (line.front() == ' ' || line.front() == '\t') && !lines.empty()) {
      auto& last = lines.back();
      last.raw = std::string_view(last.raw.data(), static_cast<std::size_t>(line.data() + line.size() -
                                                                            last.raw.data()));
      last.value += ' ';
      last.value += trim(line);
    } else if (!line.empty()) {
      const auto colon = line.find(':');
      HeaderLine header;
      header.raw = line;
      header.name = to_lower(trim(line.substr(0, colon)));
      if (colon != std::string_view::npos) header.value = std::string(trim(line.substr(colon + 1)));
      lines.push_back(std::move(header));
    }
    pos = next;
  }
  return lines;
}

struct MessageHead {
  std::string_view start_line;
  std::vector<HeaderLine> headers;
  bool chunked = false;
  std::optional<std::size_t> content_length;
  bool bad_length = false;
};

MessageHead parse_head(std::string_view head) {
  MessageHead out;
  auto eol = head.find('\n');
  if (eol == std::string_view::npos) eol = head.size();
  out.start_line = head.substr(0, eol);
  if (!out.start_line.empty() && out.start_line.back() == '\r') out.start_line.remove_suffix(1);
  out.headers = header_lines(head.substr(std::min(eol + 1, head.size())));
  for (const auto& header : out.headers) {
    if (header.name == "transfer-encoding") {
      if (to_lower(header.value).find("chunked") != std::string::npos) out.chunked = true;
    } else if (header.name == "content-length") {
      std::size_t value = 0;
      const auto* begin = header.value.data();
      const auto* end = begin + header.value.size();
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc{} || ptr != end) {
        out.bad_length = true;
      } else {
        out.content_length = value;
      }
    }
  }
  return out;
}

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto start = line.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = line.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = line.size();
    words.emplace_back(line.substr(start, end - start));
    pos = end;
  }
  return words;
}

const std::set<std::string, std::less<>> kHopByHop = {
    "connection", "keep-alive", "proxy-connection", "transfer-encoding", "te", "trailer", "upgrade"};

std::string bad_gateway(const std::string& reason) {
  const std::string body = "upstream unavailable: " + reason + "\n";
  return "HTTP/1.1 502 Bad Gateway\r\nContent-Type: text/plain\r\nContent-Length: " +
         std::to_string(body.size()) + "\r\nConnection: close\r\n\r\n" + body;
}

std::string bad_request(const std::string& reason) {
  const std::string body = reason + "\n";
  return "HTTP/1.1 400 Bad Request\r\nContent-Type: text/plain\r\nContent-Length: " +
         std::to_string(body.size()) + "\r\nConnection: close\r\n\r\n" + body;
}

void write_file(const fs::path& file, std::string_view content) {
  auto temporary = file;
  temporary += ".partial";
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ProxyError("cannot write " + temporary.string());
  }
  std::error_code ec;
  fs::rename(temporary, file, ec);
  if (ec) throw ProxyError("cannot write " + file.string() + ": " + ec.message());
}

struct UpstreamResponse {
  std::string normalized;
  bool ok = false;
  std::string error;
};

UpstreamResponse exchange_upstream(const UpstreamTarget& target, std::string_view request,
                                   bool head_request, std::chrono::milliseconds timeout,
                                   const std::atomic<bool>& stopping) {
  UpstreamResponse out;
  const auto deadline = Clock::now() + timeout;
  auto sock = connect_upstream(target, deadline, out.error);
  if (!sock) return out;
  if (!send_all(sock.get(), request)) {
    out.error = "failed to send request upstream";
    return out;
  }
  std::string buffer;
  bool closed = false;
  auto fill = [&]() {
    switch (read_some(sock.get(), buffer, deadline, &stopping)) {
      case ReadResult::data: return true;
      case ReadResult::closed: closed = true; return false;
      case ReadResult::timeout: out.error = "upstream timed out"; return false;
      case ReadResult::stopped: out.error = "proxy stopping"; return false;
      case ReadResult::failed: out.error = "upstream read failed"; return false;
    }
    return false;
  };

  while (true) {
    std::optional<std::size_t> header_end;
    while (!(header_end = find_header_end(buffer))) {
      if (!fill()) {
        if (closed) out.error = "upstream closed the connection before responding";
        return out;
      }
    }
    const auto head_text = std::string_view(buffer).substr(0, *header_end);
    const auto head = parse_head(head_text);
    const auto words = split_words(head.start_line);
    int status = 0;
    if (words.size() < 2 || words[1].size() != 3 ||
        std::from_chars(words[1].data(), words[1].data() + 3, status).ec != std::errc{}) {
      out.error = "malformed upstream status line";
      return out;
    }
    if (status >= 100 && status < 200 && status != 101) {
      buffer.erase(0, *header_end);  // interim response, wait for the final one
      continue;
    }
    const bool bodyless = head_request || status == 204 || status == 304 || status < 200;
    std::string body;
    if (!bodyless && head.chunked) {
      std::optional<std::size_t> length;
      while (!(length = chunked_message_length(std::string_view(buffer).substr(*header_end)))) {
        if (!fill()) {
          if (closed) out.error = "upstream closed mid-body";
          return out;
        }
      }
      auto decoded = dechunk(std::string_view(buffer).substr(*header_end, *length));
      if (!decoded) {
        out.error = "malformed chunked upstream body";
        return out;
      }
      body = std::move(*decoded);
    } else if (!bodyless && head.content_length && !head.bad_length) {
      while (buffer.size() - *header_end < *head.content_length) {
        if (!fill()) {
          if (closed) out.error = "upstream closed mid-body";
          return out;
        }
      }
      body = buffer.substr(*header_end, *head.content_length);
    } else if (!bodyless) {
      while (fill()) {
      }
      if (!closed) return out;
      body = buffer.substr(*header_end);
    }
    out.normalized = normalize_response(std::string_view(buffer).substr(0, *header_end), body, bodyless);
    out.ok = true;
    return out;
  }
}

}  // namespace

UpstreamTarget parse_upstream(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.size() < kScheme.size() || to_lower(url.substr(0, kScheme.size())) != kScheme) {
    throw ProxyError("upstream must be a plain http:// URL: " + std::string(url));
  }
  auto rest = url.substr(kScheme.size());
  const auto slash = rest.find('/');
  const auto authority = rest.substr(0, slash);
  if (authority.empty()) throw ProxyError("upstream has no host: " + std::string(url));
  const auto host_port = split_host_port(authority, "80");
  UpstreamTarget target{host_port.host, host_port.port, {}};
  if (slash != std::string_view::npos) {
    auto base = rest.substr(slash);
    while (!base.empty() && base.back() == '/') base.remove_suffix(1);
    target.base_path = std::string(base);
  }
  return target;
}

std::string upstream_request_target(std::string_view target, std::string_view base_path) {
  const auto scheme = target.find("://");
  if (scheme != std::string_view::npos && target.front() != '/') {
    const auto path = target.find('/', scheme + 3);
    if (path == std::string_view::npos) {
      const auto query = target.find('?', scheme + 3);
      target = query == std::string_view::npos ? std::string_view("/") : target.substr(query);
    } else {
      target = target.substr(path);
    }
  }
  if (target == "*" || base_path.empty()) return std::string(target);
  return std::string(base_path) + std::string(target);
}

std::string normalize_response(std::string_view head, std::string_view body, bool bodyless) {
  const auto parsed = parse_head(head);
  std::set<std::string, std::less<>> dropped(kHopByHop.begin(), kHopByHop.end());
  for (const auto& header : parsed.headers) {
    if (header.name != "connection") continue;
    std::size_t pos = 0;
    while (pos <= header.value.size()) {
      auto comma = header.value.find(',', pos);
      if (comma == std::string::npos) comma = header.value.size();
      auto token = to_lower(trim(std::string_view(header.value).substr(pos, comma - pos)));
      if (!token.empty()) dropped.insert(std::move(token));
      pos = comma + 1;
    }
  }
  // A length header is only trustworthy when the body was length-delimited.
  const bool keep_length = bodyless || (!parsed.chunked && parsed.content_length && !parsed.bad_length);
  std::string out(parsed.start_line);
  out += "\r\n";
  for (const auto& header : parsed.headers) {
    if (dropped.contains(header.name)) continue;
    if (header.name == "content-length" && !keep_length) continue;
    out += header.raw;
    out += "\r\n";
  }
  if (!keep_length) out += "Content-Length: " + std::to_string(body.size()) + "\r\n";
  out += "\r\n";
  if (!bodyless) out += body;
  return out;
}

CaptureProxy::CaptureProxy(ProxyConfig config)
    : config_(std::move(config)), next_sequence_(config_.starting_sequence) {
  upstream_ = parse_upstream(config_.upstream_base);
  if (config_.output_dir.empty()) throw ProxyError("output directory not set");
  std::error_code ec;
  fs::create_directories(config_.output_dir, ec);
  if (!fs::is_directory(config_.output_dir)) {
    throw ProxyError("cannot create output directory " + config_.output_dir.string());
  }
  const auto probe = config_.output_dir / (".write-probe-" + std::to_string(::getpid()));
  {
    std::ofstream out(probe);
    if (!out) throw ProxyError("output directory is not writable: " + config_.output_dir.string());
  }
  fs::remove(probe, ec);

  const auto listen = split_host_port(config_.listen_address, "8080");
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* found = nullptr;
  const char* host = listen.host.empty() ? nullptr : listen.host.c_str();
  if (const int rc = ::getaddrinfo(host, listen.port.c_str(), &hints, &found); rc != 0) {
    throw BindError("cannot resolve listen address " + config_.listen_address + ": " + ::gai_strerror(rc));
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(found, ::freeaddrinfo);
  std::string error = "no usable address";
  for (auto* info = found; info != nullptr; info = info->ai_next) {
    Socket sock(::socket(info->ai_family, info->ai_socktype, info->ai_protocol));
    if (!sock) continue;
    const int one = 1;
    ::setsockopt(sock.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(sock.get(), info->ai_addr, info->ai_addrlen) != 0 || ::listen(sock.get(), 128) != 0) {
      error = std::strerror(errno);
      continue;
    }
    sockaddr_storage bound{};
    socklen_t len = sizeof bound;
    ::getsockname(sock.get(), reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = bound.ss_family == AF_INET6 ? ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port)
                                        : ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
    listener_ = sock.release();
    break;
  }
  if (listener_ < 0) throw BindError("cannot listen on " + config_.listen_address + ": " + error);
}

CaptureProxy::~CaptureProxy() {
  stop();
  {
    std::unique_lock lock(workers_mutex_);
    workers_done_.wait(lock, [&] { return active_workers_ == 0; });
  }
  if (listener_ >= 0) ::close(listener_);
}

std::uint64_t CaptureProxy::exchanges_started() const {
  std::lock_guard lock(files_mutex_);
  return next_sequence_ - config_.starting_sequence;
}

void CaptureProxy::log(const std::string& message) const {
  if (config_.log) {
    config_.log(message);
  } else {
    std::cerr << "proxy: " << message << '\n';
  }
}

void CaptureProxy::serve() {
  while (!stopping_) {
    pollfd entry{listener_, POLLIN, 0};
    const int rc = ::poll(&entry, 1, kPollTickMs);
    if (rc <= 0) continue;
    const int client = ::accept(listener_, nullptr, nullptr);
    if (client < 0) continue;
    {
      std::lock_guard lock(workers_mutex_);
      ++active_workers_;
    }
    std::thread([this, client] {
      try {
        handle_connection(client);
      } catch (const std::exception& e) {
        log(std::string("connection aborted: ") + e.what());
      }
      ::close(client);
      std::lock_guard lock(workers_mutex_);
      if (--active_workers_ == 0) workers_done_.notify_all();
    }).detach();
  }
  std::unique_lock lock(workers_mutex_);
  workers_done_.wait(lock, [&] { return active_workers_ == 0; });
}

void CaptureProxy::handle_connection(int client) {
  std::string pending;
  while (!stopping_ && handle_exchange(client, pending)) {
  }
}

std::uint64_t CaptureProxy::record_request(std::string_view raw) {
  std::lock_guard lock(files_mutex_);
  const auto sequence = next_sequence_++;
  write_file(config_.output_dir / (std::to_string(sequence) + "-request.txt"), raw);
  return sequence;
}

void CaptureProxy::record_response(std::uint64_t sequence, std::string_view normalized) {
  std::lock_guard lock(files_mutex_);
  write_file(config_.output_dir / (std::to_string(sequence) + "-response.txt"), normalized);
}

bool CaptureProxy::handle_exchange(int client, std::string& pending) {
  auto deadline = Clock::now() + config_.client_idle_timeout;
  auto fill = [&] {
    return read_some(client, pending, deadline, &stopping_) == ReadResult::data;
  };

  std::optional<std::size_t> header_end;
  while (!(header_end = find_header_end(pending))) {
    if (!fill()) return false;
  }
  const auto head = parse_head(std::string_view(pending).substr(0, *header_end));
  const auto words = split_words(head.start_line);
  if (words.size() != 3 || head.bad_length) {
    send_all(client, bad_request("malformed request"));
    return false;
  }
  std::size_t body_length = 0;
  if (head.chunked) {
    std::optional<std::size_t> length;
    while (!(length = chunked_message_length(std::string_view(pending).substr(*header_end)))) {
      if (!fill()) return false;
    }
    body_length = *length;
  } else if (head.content_length) {
    body_length = *head.content_length;
    while (pending.size() - *header_end < body_length) {
      if (!fill()) return false;
    }
  }
  const auto total = *header_end + body_length;
  const std::string raw = pending.substr(0, total);
  pending.erase(0, total);

  const auto sequence = record_request(raw);

  const auto& method = words[0];
  const auto& version = words[2];
  std::string forwarded = method + " " + upstream_request_target(words[1], upstream_.base_path) + " " +
                          version;
  // Everything after the request line goes upstream untouched.
  auto line_end = raw.find('\n');
  if (line_end > 0 && raw[line_end - 1] == '\r') --line_end;
  forwarded.append(raw, line_end);

  const auto response = exchange_upstream(upstream_, forwarded, to_upper(method) == "HEAD",
                                          config_.upstream_timeout, stopping_);
  if (!response.ok) {
    log("exchange " + std::to_string(sequence) + " " + method + " " + words[1] + ": " + response.error);
    send_all(client, bad_gateway(response.error));
    return false;
  }
  record_response(sequence, response.normalized);
  if (!send_all(client, response.normalized)) return false;

  bool keep_alive = to_upper(version) != "HTTP/1.0";
  for (const auto& header : head.headers) {
    if (header.name != "connection" && header.name != "proxy-connection") continue;
    const auto value = to_lower(header.value);
    if (value.find("close") != std::string::npos) keep_alive = false;
    if (value.find("keep-alive") != std::string::npos) keep_alive = true;
  }
  return keep_alive;
}

}  // namespace restcov
