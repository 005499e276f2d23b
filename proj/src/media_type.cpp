// SPDX-License-Identifier: Apache-2.0
#include "restcov/media_type.hpp"

#include <algorithm>
#include <cctype>

namespace restcov {

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string to_upper(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view kSpace = " \t\r\n";
  const auto first = text.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(kSpace);
  return text.substr(first, last - first + 1);
}

std::string normalize_media_type(std::string_view raw) {
  const auto semicolon = raw.find(';');
  auto base = trim(raw.substr(0, semicolon));
  std::string out;
  out.reserve(base.size());
  for (char c : base) {
    if (c != ' ' && c != '\t') out.push_back(c);
  }
  return to_lower(out);
}

bool is_wildcard_media_type(std::string_view media_type) {
  return media_type.find('*') != std::string_view::npos;
}

bool is_json_media_type(std::string_view media_type) {
  const auto normalized = normalize_media_type(media_type);
  if (normalized == "application/json") return true;
  const auto slash = normalized.find('/');
  if (slash == std::string::npos) return false;
  return std::string_view(normalized).substr(slash).ends_with("+json");
}

}  // namespace restcov
