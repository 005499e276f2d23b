// SPDX-License-Identifier: Apache-2.0
#include "restcov/http_message.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "restcov/errors.hpp"
#include "restcov/media_type.hpp"

namespace restcov {

// HeaderMap

void HeaderMap::add(std::string name, std::string value) {
  entries_.emplace_back(std::move(name), std::move(value));
}

void HeaderMap::continue_last(std::string_view folded) {
  if (entries_.empty()) return;
  entries_.back().second += ' ';
  entries_.back().second += folded;
}

void HeaderMap::remove(std::string_view name) {
  std::erase_if(entries_, [&](const Entry& entry) { return iequals(entry.first, name); });
}

std::optional<std::string_view> HeaderMap::find(std::string_view name) const {
  for (const auto& [key, value] : entries_) {
    if (iequals(key, name)) return value;
  }
  return std::nullopt;
}

std::vector<std::string_view> HeaderMap::find_all(std::string_view name) const {
  std::vector<std::string_view> values;
  for (const auto& [key, value] : entries_) {
    if (iequals(key, name)) values.push_back(value);
  }
  return values;
}

// Decoding helpers

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

/// Reads one line ending in LF (optionally preceded by CR) starting at `pos`.
/// Returns the line without its terminator and advances `pos`.
std::optional<std::string_view> read_line(std::string_view data, std::size_t& pos) {
  const auto newline = data.find('\n', pos);
  if (newline == std::string_view::npos) return std::nullopt;
  auto line = data.substr(pos, newline - pos);
  if (line.ends_with('\r')) line.remove_suffix(1);
  pos = newline + 1;
  return line;
}

/// Shared framing walk. Appends decoded data to `out` when non-null.
std::optional<std::size_t> walk_chunks(std::string_view data, std::string* out) {
  std::size_t pos = 0;
  while (true) {
    const auto size_line = read_line(data, pos);
    if (!size_line) return std::nullopt;
    auto digits = trim(size_line->substr(0, size_line->find(';')));
    std::size_t size = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), size, 16);
    if (digits.empty() || ec != std::errc() || end != digits.data() + digits.size()) {
      throw MalformedMessage("bad chunk size line");
    }
    if (size == 0) break;
    if (data.size() < pos + size) return std::nullopt;
    if (out != nullptr) out->append(data.substr(pos, size));
    pos += size;
    const auto terminator = read_line(data, pos);
    if (!terminator) return std::nullopt;
    if (!terminator->empty()) throw MalformedMessage("chunk data overruns its size");
  }
  // Trailer section ends with an empty line.
  while (true) {
    const auto trailer = read_line(data, pos);
    if (!trailer) return std::nullopt;
    if (trailer->empty()) return pos;
  }
}

struct MessageHead {
  std::string_view start_line;
  HeaderMap headers;
  std::string body;
};

MessageHead split_message(std::string_view text) {
  // Tolerate stray blank lines before the start line.
  while (text.starts_with("\r\n") || text.starts_with('\n')) {
    text.remove_prefix(text.starts_with('\n') ? 1 : 2);
  }
  MessageHead head;
  const auto header_end = find_header_end(text);
  const auto head_block = text.substr(0, header_end.value_or(text.size()));
  std::size_t pos = 0;
  std::optional<std::string_view> line = read_line(head_block, pos);
  if (!line) {
    // Single line without terminator.
    head.start_line = head_block;
    while (head.start_line.ends_with('\r')) head.start_line.remove_suffix(1);
    pos = head_block.size();
  } else {
    head.start_line = *line;
  }
  while (pos < head_block.size()) {
    const auto header = read_line(head_block, pos);
    if (!header) break;
    if (header->empty()) break;
    if ((header->front() == ' ' || header->front() == '\t') && !head.headers.empty()) {
      head.headers.continue_last(trim(*header));  // obs-fold
      continue;
    }
    const auto colon = header->find(':');
    if (colon == std::string_view::npos || colon == 0) continue;
    head.headers.add(std::string(trim(header->substr(0, colon))),
                     std::string(trim(header->substr(colon + 1))));
  }
  if (header_end) head.body = std::string(text.substr(*header_end));

  const auto encoding = head.headers.find("Transfer-Encoding");
  if (encoding && to_lower(*encoding).find("chunked") != std::string::npos) {
    if (auto decoded = dechunk(head.body)) head.body = std::move(*decoded);
  }
  return head;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    const auto end = std::min(line.find(' ', pos), line.size());
    tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

bool is_token_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) ||
         std::string_view("!#$%&'*+-.^_`|~").find(c) != std::string_view::npos;
}

bool is_http_version(std::string_view token) { return token.starts_with("HTTP/"); }

std::optional<std::string_view> content_type_of(const HeaderMap& headers) {
  return headers.find("Content-Type");
}

}  // namespace

std::optional<std::size_t> find_header_end(std::string_view data) {
  const auto crlf = data.find("\r\n\r\n");
  const auto lf = data.find("\n\n");
  if (crlf == std::string_view::npos && lf == std::string_view::npos) return std::nullopt;
  if (lf == std::string_view::npos || (crlf != std::string_view::npos && crlf < lf)) {
    return crlf + 4;
  }
  return lf + 2;
}

std::string percent_decode(std::string_view text, bool plus_as_space) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '%' && i + 2 < text.size()) {
      const int high = hex_value(text[i + 1]);
      const int low = hex_value(text[i + 2]);
      if (high >= 0 && low >= 0) {
        out.push_back(static_cast<char>(high * 16 + low));
        i += 2;
        continue;
      }
    }
    out.push_back(plus_as_space && c == '+' ? ' ' : c);
  }
  return out;
}

QueryParameters parse_query_string(std::string_view query) {
  QueryParameters parameters;
  std::size_t pos = 0;
  while (pos <= query.size()) {
    const auto end = std::min(query.find('&', pos), query.size());
    const auto pair = query.substr(pos, end - pos);
    pos = end + 1;
    if (pair.empty()) continue;
    const auto equals = pair.find('=');
    auto name = percent_decode(pair.substr(0, equals), true);
    if (name.empty()) continue;
    auto value = equals == std::string_view::npos ? std::string()
                                                  : percent_decode(pair.substr(equals + 1), true);
    parameters[std::move(name)].push_back(std::move(value));
  }
  return parameters;
}

std::vector<std::pair<std::string, std::string>> parse_cookie_header(std::string_view header) {
  std::vector<std::pair<std::string, std::string>> cookies;
  std::size_t pos = 0;
  while (pos <= header.size()) {
    const auto end = std::min(header.find(';', pos), header.size());
    const auto pair = trim(header.substr(pos, end - pos));
    pos = end + 1;
    const auto equals = pair.find('=');
    if (pair.empty() || equals == 0) continue;
    cookies.emplace_back(std::string(trim(pair.substr(0, equals))),
                         equals == std::string_view::npos
                             ? std::string()
                             : std::string(trim(pair.substr(equals + 1))));
  }
  return cookies;
}

std::optional<std::string> dechunk(std::string_view body) {
  std::string out;
  try {
    if (!walk_chunks(body, &out)) return std::nullopt;
  } catch (const MalformedMessage&) {
    return std::nullopt;
  }
  return out;
}

std::optional<std::size_t> chunked_message_length(std::string_view data) {
  return walk_chunks(data, nullptr);
}

std::optional<nlohmann::json> parse_body(std::string_view body,
                                         std::optional<std::string_view> declared_content_type,
                                         ParseTally* tally) {
  if (!declared_content_type || !is_json_media_type(*declared_content_type)) return std::nullopt;
  if (trim(body).empty()) return std::nullopt;
  auto tree = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (tree.is_discarded()) {
    if (tally != nullptr) ++tally->body_failures;
    return std::nullopt;
  }
  return tree;
}

HttpRequestRecord parse_request(std::string_view text, ParseTally* tally) {
  auto head = split_message(text);
  const auto tokens = split_tokens(head.start_line);
  if (tokens.size() != 3 || !is_http_version(tokens[2]) ||
      !std::all_of(tokens[0].begin(), tokens[0].end(), is_token_char)) {
    throw MalformedRequest("invalid request line \"" + std::string(head.start_line) + "\"");
  }

  std::string_view target = tokens[1];
  if (const auto scheme = target.find("://");
      scheme != std::string_view::npos && target.substr(0, scheme).find('/') == std::string_view::npos) {
    target.remove_prefix(scheme + 3);
    const auto slash = target.find_first_of("/?");
    target = slash == std::string_view::npos ? std::string_view("/") : target.substr(slash);
  }
  target = target.substr(0, target.find('#'));
  if (target.starts_with('?')) {
    // "http://host?x=1" leaves an empty path.
  } else if (!target.starts_with('/')) {
    throw MalformedRequest("request target \"" + std::string(tokens[1]) + "\" is not a path");
  }

  HttpRequestRecord request;
  request.method = to_upper(tokens[0]);
  const auto question = target.find('?');
  request.raw_path = std::string(target.substr(0, question));
  if (request.raw_path.empty()) request.raw_path = "/";
  if (question != std::string_view::npos) {
    request.query_parameters = parse_query_string(target.substr(question + 1));
  }
  request.headers = std::move(head.headers);
  request.body = std::move(head.body);
  request.structured_body = parse_body(request.body, content_type_of(request.headers), tally);
  if (tally != nullptr) ++tally->requests_parsed;
  return request;
}

HttpResponseRecord parse_response(std::string_view text, ParseTally* tally) {
  auto head = split_message(text);
  const auto tokens = split_tokens(head.start_line);
  if (tokens.size() < 2 || !is_http_version(tokens[0]) || tokens[1].size() != 3) {
    throw MalformedResponse("invalid status line \"" + std::string(head.start_line) + "\"");
  }
  int code = 0;
  auto [end, ec] = std::from_chars(tokens[1].data(), tokens[1].data() + tokens[1].size(), code);
  if (ec != std::errc() || end != tokens[1].data() + tokens[1].size() || code < 100 || code > 599) {
    throw MalformedResponse("status code \"" + std::string(tokens[1]) + "\" out of range");
  }

  HttpResponseRecord response;
  response.status_code = code;
  response.headers = std::move(head.headers);
  response.body = std::move(head.body);
  response.structured_body = parse_body(response.body, content_type_of(response.headers), tally);
  return response;
}

}  // namespace restcov
