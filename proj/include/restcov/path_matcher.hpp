// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "restcov/diagnostics.hpp"
#include "restcov/interaction.hpp"
#include "restcov/spec_model.hpp"

namespace restcov {

struct MatchResult {
  const PathTemplate* path_template = nullptr;
  std::map<std::string, std::string> extracted_parameters;  // percent-decoded
};

/// Removes the longest segment-aligned server prefix; returns the path
/// unchanged when none applies.
std::string strip_server_prefix(std::string_view raw_path, std::span<const std::string> prefixes);

/// Matches a prefix-free path against every template. Among several
/// candidates the one with a literal segment where the others have a
/// placeholder wins, scanning left to right; exact ties fall back to the
/// lexicographically smallest template and emit a warning.
std::optional<MatchResult> match_path(std::string_view path, const ApiSpecification& spec,
                                      Diagnostics* diagnostics = nullptr);

/// strip_server_prefix + match_path + method lookup.
std::optional<OperationMatch> classify_interaction(const HttpRequestRecord& request,
                                                   const ApiSpecification& spec,
                                                   Diagnostics* diagnostics = nullptr);

}  // namespace restcov
