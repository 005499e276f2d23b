// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace restcov {

/// "Application/JSON; charset=utf-8" -> "application/json".
std::string normalize_media_type(std::string_view raw);

/// True when the type or subtype contains '*' ("*/*", "application/*").
bool is_wildcard_media_type(std::string_view media_type);

/// application/json and structured-syntax suffixes such as application/problem+json.
bool is_json_media_type(std::string_view media_type);

/// ASCII-only helpers shared by the HTTP and spec parsers.
std::string to_lower(std::string_view text);
std::string to_upper(std::string_view text);
bool iequals(std::string_view a, std::string_view b);
std::string_view trim(std::string_view text);

}  // namespace restcov
