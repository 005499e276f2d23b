// SPDX-License-Identifier: Apache-2.0
#include "restcov/spec_model.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "restcov/errors.hpp"
#include "restcov/media_type.hpp"

namespace restcov {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kOperationKeys[] = {"get",  "post", "put",    "delete",
                                               "patch", "head", "options"};

}  // namespace

std::string_view to_string(ParameterLocation location) {
  switch (location) {
    case ParameterLocation::path: return "path";
    case ParameterLocation::query: return "query";
    case ParameterLocation::header: return "header";
    case ParameterLocation::cookie: return "cookie";
  }
  return "query";
}

// ValueDomain

ValueDomain ValueDomain::boolean() {
  ValueDomain domain;
  domain.finite_ = true;
  domain.boolean_ = true;
  domain.values_ = {"true", "false"};
  return domain;
}

ValueDomain ValueDomain::enumeration(std::vector<std::string> values) {
  if (values.empty()) throw SpecSemanticError("enumerated parameter domain is empty");
  ValueDomain domain;
  domain.finite_ = true;
  std::set<std::string> seen;
  for (auto& value : values) {
    if (seen.insert(value).second) domain.values_.push_back(std::move(value));
  }
  return domain;
}

std::optional<std::string> ValueDomain::admit(std::string_view supplied) const {
  if (!finite_) return std::nullopt;
  for (const auto& value : values_) {
    if (boolean_ ? iequals(value, supplied) : value == supplied) return value;
  }
  return std::nullopt;
}

const ParameterDescriptor* OperationDescriptor::find_parameter(std::string_view name,
                                                               ParameterLocation location) const {
  for (const auto& parameter : parameters) {
    if (parameter.location == location && parameter.name == name) return &parameter;
  }
  return nullptr;
}

// Paths

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> segments;
  if (path.starts_with('/')) path.remove_prefix(1);
  if (path.empty()) return segments;
  std::size_t start = 0;
  while (true) {
    const auto slash = path.find('/', start);
    segments.push_back(path.substr(start, slash - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return segments;
}

std::string normalize_path(std::string_view path) {
  while (path.size() > 1 && path.ends_with('/')) path.remove_suffix(1);
  return std::string(path);
}

namespace {

PathSegment parse_segment(std::string_view segment, std::string_view template_text) {
  const auto open = segment.find('{');
  const auto close = segment.find('}');
  if (open == std::string_view::npos && close == std::string_view::npos) {
    return {PathSegment::Kind::literal, std::string(segment), {}, {}};
  }
  if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
      close == open + 1) {
    throw SpecSemanticError("malformed placeholder in path template \"" +
                            std::string(template_text) + "\"");
  }
  if (segment.find('{', open + 1) != std::string_view::npos) {
    throw SpecSemanticError("more than one placeholder in a segment of \"" +
                            std::string(template_text) + "\"");
  }
  std::string name(segment.substr(open + 1, close - open - 1));
  if (open == 0 && close == segment.size() - 1) {
    return {PathSegment::Kind::parameter, std::move(name), {}, {}};
  }
  return {PathSegment::Kind::pattern, std::move(name), std::string(segment.substr(0, open)),
          std::string(segment.substr(close + 1))};
}

}  // namespace

PathTemplate::PathTemplate(std::string text, std::vector<OperationDescriptor> operations)
    : text_(std::move(text)), operations_(std::move(operations)) {
  if (!text_.starts_with('/')) {
    throw SpecSemanticError("path template \"" + text_ + "\" does not start with \"/\"");
  }
  const auto normalized = normalize_path(text_);
  std::set<std::string> names;
  for (auto segment : split_path(normalized)) {
    auto parsed = parse_segment(segment, text_);
    if (parsed.kind != PathSegment::Kind::literal && !names.insert(parsed.text).second) {
      throw SpecSemanticError("duplicate parameter \"" + parsed.text + "\" in path template \"" +
                              text_ + "\"");
    }
    segments_.push_back(std::move(parsed));
  }
}

std::vector<std::string> PathTemplate::parameter_names() const {
  std::vector<std::string> names;
  for (const auto& segment : segments_) {
    if (segment.kind != PathSegment::Kind::literal) names.push_back(segment.text);
  }
  return names;
}

const OperationDescriptor* PathTemplate::find_operation(std::string_view method) const {
  for (const auto& operation : operations_) {
    if (operation.method == method) return &operation;
  }
  return nullptr;
}

ApiSpecification::ApiSpecification(std::string title, std::vector<std::string> server_prefixes,
                                   std::vector<PathTemplate> paths)
    : title_(std::move(title)),
      server_prefixes_(std::move(server_prefixes)),
      paths_(std::move(paths)) {
  std::set<std::string> templates;
  for (const auto& path : paths_) {
    if (!templates.insert(normalize_path(path.text())).second) {
      throw SpecSemanticError("duplicate path template \"" + path.text() + "\"");
    }
    if (path.operations().empty()) {
      throw SpecSemanticError("path template \"" + path.text() + "\" has no operations");
    }
    std::set<std::string> methods;
    for (const auto& operation : path.operations()) {
      if (!methods.insert(operation.method).second) {
        throw SpecSemanticError("duplicate operation " + operation.method + " " + path.text());
      }
    }
  }
}

const PathTemplate* ApiSpecification::find_path(std::string_view text) const {
  for (const auto& path : paths_) {
    if (path.text() == text) return &path;
  }
  return nullptr;
}

std::size_t ApiSpecification::operation_count() const {
  std::size_t count = 0;
  for (const auto& path : paths_) count += path.operations().size();
  return count;
}

// Document loading

namespace {

Json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined: return nullptr;
    case YAML::NodeType::Sequence: {
      Json array = Json::array();
      for (const auto& item : node) array.push_back(yaml_to_json(item));
      return array;
    }
    case YAML::NodeType::Map: {
      Json object = Json::object();
      for (const auto& entry : node) {
        object[entry.first.as<std::string>()] = yaml_to_json(entry.second);
      }
      return object;
    }
    case YAML::NodeType::Scalar: break;
  }
  const auto& scalar = node.Scalar();
  if (node.Tag() == "!") return scalar;  // quoted
  if (scalar == "~" || scalar == "null" || scalar == "Null" || scalar == "NULL") return nullptr;
  if (scalar == "true" || scalar == "True" || scalar == "TRUE") return true;
  if (scalar == "false" || scalar == "False" || scalar == "FALSE") return false;
  std::int64_t integer = 0;
  auto [end, ec] = std::from_chars(scalar.data(), scalar.data() + scalar.size(), integer);
  if (ec == std::errc() && end == scalar.data() + scalar.size()) return integer;
  double real = 0;
  auto [rend, rec] = std::from_chars(scalar.data(), scalar.data() + scalar.size(), real);
  if (rec == std::errc() && rend == scalar.data() + scalar.size()) return real;
  return scalar;
}

Json parse_document(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && (text[first] == '{' || text[first] == '[')) {
    try {
      return Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw SpecParseError(std::string("malformed JSON specification: ") + e.what());
    }
  }
  try {
    return yaml_to_json(YAML::Load(std::string(text)));
  } catch (const YAML::Exception& e) {
    throw SpecParseError(std::string("malformed YAML specification: ") + e.what());
  }
}

std::string scalar_text(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

/// Resolves local "$ref" pointers against the document root.
class Resolver {
 public:
  Resolver(const Json& root, Diagnostics* diagnostics) : root_(root), diagnostics_(diagnostics) {}

  const Json& operator()(const Json& node) const {
    const Json* current = &node;
    for (int depth = 0; depth < 64; ++depth) {
      if (!current->is_object()) return *current;
      const auto ref = current->find("$ref");
      if (ref == current->end() || !ref->is_string()) return *current;
      const auto target = ref->get<std::string>();
      if (!target.starts_with('#')) {
        warn(diagnostics_, "ignoring non-local reference \"" + target + "\"");
        return empty_;
      }
      try {
        current = &root_.at(Json::json_pointer(target.substr(1)));
      } catch (const Json::exception&) {
        throw SpecParseError("unresolvable reference \"" + target + "\"");
      }
    }
    throw SpecParseError("reference chain too deep (cyclic $ref?)");
  }

  const Json* member(const Json& node, std::string_view key) const {
    const auto& resolved = (*this)(node);
    if (!resolved.is_object()) return nullptr;
    const auto it = resolved.find(std::string(key));
    if (it == resolved.end()) return nullptr;
    return &(*this)(*it);
  }

 private:
  const Json& root_;
  Diagnostics* diagnostics_;
  const Json empty_ = Json::object();
};

std::string string_member(const Json& node, std::string_view key) {
  if (!node.is_object()) return {};
  const auto it = node.find(std::string(key));
  if (it == node.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

void append_unique(std::vector<std::string>& list, std::string value) {
  if (std::find(list.begin(), list.end(), value) == list.end()) list.push_back(std::move(value));
}

std::vector<std::string> media_type_list(const Json* list) {
  std::vector<std::string> out;
  if (list == nullptr || !list->is_array()) return out;
  for (const auto& item : *list) {
    if (item.is_string()) append_unique(out, normalize_media_type(item.get<std::string>()));
  }
  return out;
}

std::vector<std::string> content_keys(const Json* content) {
  std::vector<std::string> out;
  if (content == nullptr || !content->is_object()) return out;
  for (const auto& [key, value] : content->items()) {
    append_unique(out, normalize_media_type(key));
  }
  return out;
}

std::string prefix_from_base_path(std::string_view base_path) {
  base_path = trim(base_path);
  if (base_path.empty()) return {};
  std::string prefix = base_path.starts_with('/') ? std::string(base_path)
                                                  : "/" + std::string(base_path);
  prefix = normalize_path(prefix);
  return prefix == "/" ? std::string() : prefix;
}

std::string prefix_from_server_url(std::string url, const Json& server) {
  if (const auto variables = server.find("variables");
      variables != server.end() && variables->is_object()) {
    for (const auto& [name, variable] : variables->items()) {
      const auto placeholder = "{" + name + "}";
      const auto value = string_member(variable, "default");
      for (auto pos = url.find(placeholder); pos != std::string::npos;
           pos = url.find(placeholder, pos + value.size())) {
        url.replace(pos, placeholder.size(), value);
      }
    }
  }
  std::string_view view = url;
  if (const auto scheme = view.find("://"); scheme != std::string_view::npos) {
    view.remove_prefix(scheme + 3);
    const auto slash = view.find('/');
    if (slash == std::string_view::npos) return {};
    view.remove_prefix(slash);
  } else if (view.starts_with("//")) {
    view.remove_prefix(2);
    const auto slash = view.find('/');
    if (slash == std::string_view::npos) return {};
    view.remove_prefix(slash);
  } else if (!view.starts_with('/')) {
    return {};
  }
  view = view.substr(0, view.find_first_of("?#"));
  return prefix_from_base_path(view);
}

std::optional<ParameterLocation> location_from(std::string_view in) {
  if (in == "path") return ParameterLocation::path;
  if (in == "query") return ParameterLocation::query;
  if (in == "header") return ParameterLocation::header;
  if (in == "cookie") return ParameterLocation::cookie;
  return std::nullopt;
}

class DocumentReader {
 public:
  DocumentReader(const Json& root, Diagnostics* diagnostics)
      : root_(root), resolve_(root, diagnostics), diagnostics_(diagnostics) {
    if (root_.contains("swagger")) {
      openapi3_ = false;
    } else if (root_.contains("openapi")) {
      openapi3_ = true;
    } else {
      throw SpecParseError("document declares neither \"swagger\" nor \"openapi\" version");
    }
  }

  ApiSpecification read() const {
    std::string title;
    if (const auto* info = resolve_.member(root_, "info")) title = string_member(*info, "title");

    std::vector<PathTemplate> paths;
    if (const auto* items = resolve_.member(root_, "paths"); items && items->is_object()) {
      for (const auto& [text, item] : items->items()) {
        if (text.starts_with("x-")) continue;
        auto operations = read_path_item(resolve_(item), text);
        if (operations.empty()) {
          warn(diagnostics_, "path \"" + text + "\" declares no operations; skipped");
          continue;
        }
        paths.emplace_back(text, std::move(operations));
      }
    }
    return ApiSpecification(std::move(title), server_prefixes(), std::move(paths));
  }

 private:
  std::vector<std::string> server_prefixes() const {
    std::vector<std::string> prefixes;
    if (!openapi3_) {
      if (auto prefix = prefix_from_base_path(string_member(root_, "basePath")); !prefix.empty()) {
        prefixes.push_back(std::move(prefix));
      }
      return prefixes;
    }
    const auto* servers = resolve_.member(root_, "servers");
    if (servers == nullptr || !servers->is_array()) return prefixes;
    for (const auto& server : *servers) {
      const auto& resolved = resolve_(server);
      auto prefix = prefix_from_server_url(string_member(resolved, "url"), resolved);
      if (!prefix.empty()) append_unique(prefixes, std::move(prefix));
    }
    return prefixes;
  }

  std::vector<OperationDescriptor> read_path_item(const Json& item, const std::string& text) const {
    std::vector<OperationDescriptor> operations;
    if (!item.is_object()) return operations;
    const auto* shared = resolve_.member(item, "parameters");
    for (auto key : kOperationKeys) {
      const auto it = item.find(std::string(key));
      if (it == item.end()) continue;
      operations.push_back(read_operation(resolve_(*it), to_upper(key), shared, text));
    }
    return operations;
  }

  OperationDescriptor read_operation(const Json& operation, std::string method,
                                     const Json* shared_parameters,
                                     const std::string& path_text) const {
    OperationDescriptor descriptor;
    descriptor.method = std::move(method);

    bool has_body = false;
    std::vector<const Json*> declared;
    auto collect = [&](const Json* list) {
      if (list == nullptr || !list->is_array()) return;
      for (const auto& entry : *list) {
        const auto& parameter = resolve_(entry);
        const auto name = string_member(parameter, "name");
        const auto in = string_member(parameter, "in");
        // Operation-level declarations override path-level ones.
        auto same = std::find_if(declared.begin(), declared.end(), [&](const Json* other) {
          return string_member(*other, "name") == name && string_member(*other, "in") == in;
        });
        if (same != declared.end()) {
          *same = &parameter;
        } else {
          declared.push_back(&parameter);
        }
      }
    };
    collect(shared_parameters);
    collect(resolve_.member(operation, "parameters"));

    for (const auto* parameter : declared) {
      const auto in = string_member(*parameter, "in");
      if (in == "body" || in == "formData") {
        has_body = true;
        continue;
      }
      const auto location = location_from(in);
      if (!location) {
        warn(diagnostics_, "parameter with unsupported location \"" + in + "\" in " +
                               descriptor.method + " " + path_text + "; skipped");
        continue;
      }
      auto name = string_member(*parameter, "name");
      if (name.empty()) throw SpecSemanticError("parameter without a name in " + path_text);
      if (openapi3_ && *location == ParameterLocation::header &&
          (iequals(name, "Accept") || iequals(name, "Content-Type") ||
           iequals(name, "Authorization"))) {
        continue;
      }
      descriptor.parameters.push_back(read_parameter(*parameter, std::move(name), *location));
    }

    if (openapi3_) {
      if (const auto* body = resolve_.member(operation, "requestBody")) {
        descriptor.request_content_types = content_keys(resolve_.member(*body, "content"));
      }
    } else if (has_body) {
      const auto* consumes = resolve_.member(operation, "consumes");
      if (consumes == nullptr) consumes = resolve_.member(root_, "consumes");
      descriptor.request_content_types = media_type_list(consumes);
    }

    if (const auto* responses = resolve_.member(operation, "responses");
        responses && responses->is_object()) {
      for (const auto& [key, response] : responses->items()) {
        if (key.starts_with("x-")) continue;
        if (auto status = read_status_key(key, descriptor.method, path_text)) {
          descriptor.documented_status_codes.push_back(*status);
        }
        if (openapi3_) {
          for (auto& type : content_keys(resolve_.member(resolve_(response), "content"))) {
            append_unique(descriptor.response_content_types, std::move(type));
          }
        }
      }
    }
    if (!openapi3_) {
      const auto* produces = resolve_.member(operation, "produces");
      if (produces == nullptr) produces = resolve_.member(root_, "produces");
      descriptor.response_content_types = media_type_list(produces);
    }
    return descriptor;
  }

  std::optional<DocumentedStatus> read_status_key(const std::string& key, const std::string& method,
                                                  const std::string& path_text) const {
    if (key == "default") return DocumentedStatus{};
    int code = 0;
    auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), code);
    if (ec == std::errc() && end == key.data() + key.size()) {
      if (code < 100 || code > 599) {
        throw SpecSemanticError("status code " + key + " out of range in " + method + " " +
                                path_text);
      }
      return DocumentedStatus{code};
    }
    if (key.size() == 3 && key[0] >= '1' && key[0] <= '5' && (key[1] == 'X' || key[1] == 'x') &&
        (key[2] == 'X' || key[2] == 'x')) {
      warn(diagnostics_, "status range \"" + key + "\" in " + method + " " + path_text +
                             " is not counted as a documented status code");
      return std::nullopt;
    }
    throw SpecSemanticError("invalid response key \"" + key + "\" in " + method + " " + path_text);
  }

  ParameterDescriptor read_parameter(const Json& parameter, std::string name,
                                     ParameterLocation location) const {
    ParameterDescriptor descriptor;
    descriptor.name = std::move(name);
    descriptor.location = location;
    descriptor.required = location == ParameterLocation::path;
    if (const auto required = parameter.find("required");
        required != parameter.end() && required->is_boolean()) {
      descriptor.required = descriptor.required || required->get<bool>();
    }

    // OpenAPI 3 keeps type information under "schema"; OpenAPI 2 inlines it.
    const Json* schema = &parameter;
    if (openapi3_) schema = resolve_.member(parameter, "schema");
    if (schema == nullptr || !schema->is_object()) return descriptor;

    const Json* typed = schema;
    if (string_member(*schema, "type") == "array") {
      descriptor.is_array = true;
      typed = resolve_.member(*schema, "items");
      if (typed == nullptr || !typed->is_object()) return descriptor;
    }
    descriptor.domain = domain_of(*typed, descriptor.name);
    return descriptor;
  }

  ValueDomain domain_of(const Json& schema, const std::string& name) const {
    if (const auto values = schema.find("enum"); values != schema.end() && values->is_array()) {
      std::vector<std::string> admissible;
      for (const auto& value : *values) {
        if (!value.is_null()) admissible.push_back(scalar_text(value));
      }
      if (!admissible.empty()) return ValueDomain::enumeration(std::move(admissible));
      warn(diagnostics_, "parameter \"" + name + "\" has an empty enum; treated as unbounded");
      return ValueDomain::unbounded();
    }
    if (string_member(schema, "type") == "boolean") return ValueDomain::boolean();
    return ValueDomain::unbounded();
  }

  const Json& root_;
  Resolver resolve_;
  Diagnostics* diagnostics_;
  bool openapi3_ = false;
};

}  // namespace

ApiSpecification parse_specification(std::string_view text, Diagnostics* diagnostics) {
  const auto document = parse_document(text);
  if (!document.is_object()) throw SpecParseError("specification root is not an object");
  return DocumentReader(document, diagnostics).read();
}

ApiSpecification load_specification(const std::filesystem::path& file, Diagnostics* diagnostics) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(file, ec)) {
    throw FileNotFound("specification not found: " + file.string());
  }
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FileNotFound("cannot open specification: " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_specification(buffer.str(), diagnostics);
}

}  // namespace restcov
