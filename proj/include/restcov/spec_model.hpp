// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "restcov/diagnostics.hpp"

namespace restcov {

enum class ParameterLocation { path, query, header, cookie };

std::string_view to_string(ParameterLocation location);

/// Admissible values of a parameter. Only boolean and enum-typed parameters
/// have a finite domain; everything else is unbounded and excluded from
/// value coverage.
class ValueDomain {
 public:
  static ValueDomain unbounded() { return {}; }
  static ValueDomain boolean();
  /// Throws SpecSemanticError on an empty value list.
  static ValueDomain enumeration(std::vector<std::string> values);

  bool is_finite() const noexcept { return finite_; }
  bool is_boolean() const noexcept { return boolean_; }
  const std::vector<std::string>& values() const noexcept { return values_; }

  /// The admissible value equal to `supplied`, if any. Boolean literals are
  /// compared case-insensitively, enum values exactly.
  std::optional<std::string> admit(std::string_view supplied) const;

  bool operator==(const ValueDomain&) const = default;

 private:
  bool finite_ = false;
  bool boolean_ = false;
  std::vector<std::string> values_;
};

struct ParameterDescriptor {
  std::string name;
  ParameterLocation location = ParameterLocation::query;
  ValueDomain domain;
  bool required = false;
  // Array-typed query/header values may carry several comma-separated items.
  bool is_array = false;

  bool operator==(const ParameterDescriptor&) const = default;
};

/// One entry of an operation's "responses" map.
struct DocumentedStatus {
  std::optional<int> code;  // nullopt for "default"

  bool is_default() const noexcept { return !code.has_value(); }
  bool operator==(const DocumentedStatus&) const = default;
};

struct OperationDescriptor {
  std::string method;  // upper-case, e.g. "GET"
  std::vector<ParameterDescriptor> parameters;
  std::vector<std::string> request_content_types;
  std::vector<DocumentedStatus> documented_status_codes;
  std::vector<std::string> response_content_types;

  const ParameterDescriptor* find_parameter(std::string_view name,
                                            ParameterLocation location) const;
};

struct PathSegment {
  // Ordered from most to least specific.
  enum class Kind { literal, pattern, parameter };

  Kind kind = Kind::literal;
  std::string text;       // literal text, or parameter name
  std::string prefix;     // pattern only: literal text around the placeholder
  std::string suffix;

  bool operator==(const PathSegment&) const = default;
};

class PathTemplate {
 public:
  /// Throws SpecSemanticError unless `text` starts with "/" and its
  /// parameter names are unique.
  explicit PathTemplate(std::string text, std::vector<OperationDescriptor> operations = {});

  const std::string& text() const noexcept { return text_; }
  const std::vector<PathSegment>& segments() const noexcept { return segments_; }
  const std::vector<OperationDescriptor>& operations() const noexcept { return operations_; }
  std::vector<std::string> parameter_names() const;

  /// `method` is upper-case, as stored.
  const OperationDescriptor* find_operation(std::string_view method) const;

 private:
  std::string text_;
  std::vector<PathSegment> segments_;
  std::vector<OperationDescriptor> operations_;
};

/// Splits a concrete or templated path into its "/"-separated segments.
/// The root path "/" has no segments.
std::vector<std::string_view> split_path(std::string_view path);

/// Removes trailing slashes, keeping the root "/".
std::string normalize_path(std::string_view path);

class ApiSpecification {
 public:
  ApiSpecification() = default;
  /// Throws SpecSemanticError on duplicate template strings, duplicate
  /// (template, method) pairs or a template without operations.
  ApiSpecification(std::string title, std::vector<std::string> server_prefixes,
                   std::vector<PathTemplate> paths);

  const std::string& title() const noexcept { return title_; }
  const std::vector<std::string>& server_prefixes() const noexcept { return server_prefixes_; }
  const std::vector<PathTemplate>& paths() const noexcept { return paths_; }

  const PathTemplate* find_path(std::string_view text) const;
  std::size_t operation_count() const;

 private:
  std::string title_;
  std::vector<std::string> server_prefixes_;
  std::vector<PathTemplate> paths_;
};

/// Parses an OpenAPI 2 or 3 document given as JSON or YAML text.
ApiSpecification parse_specification(std::string_view text, Diagnostics* diagnostics = nullptr);

/// Throws FileNotFound, SpecParseError or SpecSemanticError.
ApiSpecification load_specification(const std::filesystem::path& file,
                                    Diagnostics* diagnostics = nullptr);

}  // namespace restcov
