// SPDX-License-Identifier: Apache-2.0
#include "restcov/path_matcher.hpp"

#include <algorithm>
#include <vector>

#include "restcov/http_message.hpp"

namespace restcov {

std::string strip_server_prefix(std::string_view raw_path, std::span<const std::string> prefixes) {
  std::string_view best;
  for (const auto& prefix : prefixes) {
    if (prefix.size() <= best.size() || prefix.empty() || prefix == "/") continue;
    const bool aligned =
        raw_path.starts_with(prefix) &&
        (raw_path.size() == prefix.size() || raw_path[prefix.size()] == '/');
    if (aligned) best = prefix;
  }
  if (best.empty()) return std::string(raw_path);
  auto rest = raw_path.substr(best.size());
  return rest.empty() ? std::string("/") : std::string(rest);
}

namespace {

bool segment_matches(const PathSegment& segment, std::string_view concrete,
                     std::map<std::string, std::string>& captured) {
  switch (segment.kind) {
    case PathSegment::Kind::literal: return segment.text == concrete;
    case PathSegment::Kind::parameter:
      if (concrete.empty()) return false;
      captured[segment.text] = percent_decode(concrete);
      return true;
    case PathSegment::Kind::pattern: {
      if (concrete.size() <= segment.prefix.size() + segment.suffix.size()) return false;
      if (!concrete.starts_with(segment.prefix) || !concrete.ends_with(segment.suffix)) return false;
      captured[segment.text] = percent_decode(concrete.substr(
          segment.prefix.size(), concrete.size() - segment.prefix.size() - segment.suffix.size()));
      return true;
    }
  }
  return false;
}

struct Candidate {
  const PathTemplate* path_template;
  std::vector<PathSegment::Kind> specificity;
  std::map<std::string, std::string> captured;
};

bool more_specific(const Candidate& a, const Candidate& b) {
  if (a.specificity != b.specificity) return a.specificity < b.specificity;
  return a.path_template->text() < b.path_template->text();
}

}  // namespace

std::optional<MatchResult> match_path(std::string_view path, const ApiSpecification& spec,
                                      Diagnostics* diagnostics) {
  const auto normalized = normalize_path(path);
  const auto concrete = split_path(normalized);

  std::vector<Candidate> candidates;
  for (const auto& path_template : spec.paths()) {
    const auto& segments = path_template.segments();
    if (segments.size() != concrete.size()) continue;
    Candidate candidate{&path_template, {}, {}};
    bool matched = true;
    for (std::size_t i = 0; i < segments.size() && matched; ++i) {
      matched = segment_matches(segments[i], concrete[i], candidate.captured);
      candidate.specificity.push_back(segments[i].kind);
    }
    if (matched) candidates.push_back(std::move(candidate));
  }
  if (candidates.empty()) return std::nullopt;

  std::sort(candidates.begin(), candidates.end(), more_specific);
  if (candidates.size() > 1 && candidates[0].specificity == candidates[1].specificity) {
    warn(diagnostics, "path \"" + normalized + "\" matches equally specific templates \"" +
                          candidates[0].path_template->text() + "\" and \"" +
                          candidates[1].path_template->text() + "\"; using the first");
  }
  return MatchResult{candidates.front().path_template, std::move(candidates.front().captured)};
}

std::optional<OperationMatch> classify_interaction(const HttpRequestRecord& request,
                                                   const ApiSpecification& spec,
                                                   Diagnostics* diagnostics) {
  const auto path = strip_server_prefix(request.raw_path, spec.server_prefixes());
  auto matched = match_path(path, spec, diagnostics);
  if (!matched) return std::nullopt;
  OperationMatch match;
  match.template_path = matched->path_template->text();
  match.method = request.method;
  match.method_supported = matched->path_template->find_operation(request.method) != nullptr;
  match.path_parameters = std::move(matched->extracted_parameters);
  return match;
}

}  // namespace restcov
