// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace restcov {

/// Header fields in arrival order; name lookup is case-insensitive.
class HeaderMap {
 public:
  using Entry = std::pair<std::string, std::string>;

  HeaderMap() = default;
  HeaderMap(std::initializer_list<Entry> entries) : entries_(entries) {}

  void add(std::string name, std::string value);
  void remove(std::string_view name);
  void continue_last(std::string_view folded);

  std::optional<std::string_view> find(std::string_view name) const;
  std::vector<std::string_view> find_all(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name).has_value(); }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  bool operator==(const HeaderMap&) const = default;

 private:
  std::vector<Entry> entries_;
};

/// name -> decoded values, in order of appearance. Names are case-sensitive.
using QueryParameters = std::map<std::string, std::vector<std::string>>;

struct HttpRequestRecord {
  std::string method;    // upper-case
  std::string raw_path;  // without scheme, authority and query
  QueryParameters query_parameters;
  HeaderMap headers;
  std::string body;  // raw bytes
  std::optional<nlohmann::json> structured_body;

  bool operator==(const HttpRequestRecord&) const = default;
};

struct HttpResponseRecord {
  int status_code = 0;
  HeaderMap headers;
  std::string body;
  std::optional<nlohmann::json> structured_body;

  bool operator==(const HttpResponseRecord&) const = default;
};

/// Per-run counters of everything that could not be parsed.
struct ParseTally {
  std::size_t requests_parsed = 0;
  std::size_t request_failures = 0;
  std::size_t response_failures = 0;
  std::size_t body_failures = 0;

  bool operator==(const ParseTally&) const = default;
};

/// Throws MalformedRequest when there is no valid request line.
HttpRequestRecord parse_request(std::string_view text, ParseTally* tally = nullptr);

/// Throws MalformedResponse on a bad status line or a code outside 100..599.
HttpResponseRecord parse_response(std::string_view text, ParseTally* tally = nullptr);

/// Structured view of a payload. Only JSON is understood; anything else, and
/// any JSON that fails to parse, yields nullopt. Parse failures of declared
/// JSON bodies are counted in `tally`.
std::optional<nlohmann::json> parse_body(std::string_view body,
                                         std::optional<std::string_view> declared_content_type,
                                         ParseTally* tally = nullptr);

std::string percent_decode(std::string_view text, bool plus_as_space = false);
QueryParameters parse_query_string(std::string_view query);
std::vector<std::pair<std::string, std::string>> parse_cookie_header(std::string_view header);

/// Decodes a chunked transfer-coded body. nullopt when the framing is broken.
std::optional<std::string> dechunk(std::string_view body);

/// Byte length of a complete chunked body at the start of `data` (including
/// trailers), or nullopt while more input is needed.
std::optional<std::size_t> chunked_message_length(std::string_view data);

/// Offset just past the blank line ending the header block, or nullopt.
std::optional<std::size_t> find_header_end(std::string_view data);

}  // namespace restcov
