// SPDX-License-Identifier: Apache-2.0
#include "restcov/dump_ingest.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "restcov/errors.hpp"
#include "restcov/path_matcher.hpp"

namespace restcov {

namespace fs = std::filesystem;

namespace {

enum class Role { request, response };

struct DumpName {
  std::uint64_t sequence_id;
  Role role;
};

std::optional<DumpName> parse_dump_name(const std::string& name) {
  constexpr std::string_view kRequest = "-request.txt";
  constexpr std::string_view kResponse = "-response.txt";
  std::string_view view = name;
  Role role;
  if (view.ends_with(kRequest)) {
    role = Role::request;
    view.remove_suffix(kRequest.size());
  } else if (view.ends_with(kResponse)) {
    role = Role::response;
    view.remove_suffix(kResponse.size());
  } else {
    return std::nullopt;
  }
  if (view.empty()) return std::nullopt;
  std::uint64_t n = 0;
  auto [end, ec] = std::from_chars(view.data(), view.data() + view.size(), n);
  if (ec != std::errc() || end != view.data() + view.size()) return std::nullopt;
  return DumpName{n, role};
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IngestError("cannot read dump file " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct Pair {
  std::optional<fs::path> request;
  std::optional<fs::path> response;
};

}  // namespace

std::vector<DumpEntry> scan_dump_directory(const fs::path& dir, Diagnostics* diagnostics) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw DirectoryNotFound("dump directory not found: " + dir.string());

  std::map<std::uint64_t, Pair> pairs;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    const auto parsed = parse_dump_name(name);
    if (!parsed) continue;
    auto& slot = parsed->role == Role::request ? pairs[parsed->sequence_id].request
                                               : pairs[parsed->sequence_id].response;
    if (slot) {
      throw DuplicateSequenceId("files \"" + slot->filename().string() + "\" and \"" + name +
                                "\" claim the same sequence id " +
                                std::to_string(parsed->sequence_id));
    }
    slot = entry.path();
  }
  if (ec) throw IngestError("cannot list dump directory " + dir.string() + ": " + ec.message());

  std::vector<DumpEntry> entries;
  for (const auto& [n, pair] : pairs) {
    if (!pair.request) {
      warn(diagnostics, "response " + pair.response->filename().string() +
                            " has no matching request file; skipped");
      continue;
    }
    DumpEntry dump{n, read_file(*pair.request), std::nullopt};
    if (pair.response) dump.response_text = read_file(*pair.response);
    entries.push_back(std::move(dump));
  }
  return entries;
}

std::optional<HttpInteraction> build_interaction(const DumpEntry& entry,
                                                 const ApiSpecification& spec, ParseTally& tally,
                                                 Diagnostics* diagnostics) {
  HttpInteraction interaction;
  interaction.sequence_id = entry.sequence_id;
  try {
    interaction.request = parse_request(entry.request_text, &tally);
  } catch (const MalformedMessage& e) {
    ++tally.request_failures;
    warn(diagnostics, "request " + std::to_string(entry.sequence_id) + ": " + e.what());
    return std::nullopt;
  }
  if (entry.response_text) {
    try {
      interaction.response = parse_response(*entry.response_text, &tally);
    } catch (const MalformedMessage& e) {
      ++tally.response_failures;
      warn(diagnostics, "response " + std::to_string(entry.sequence_id) + ": " + e.what() +
                            "; kept as orphan request");
    }
  }
  interaction.match = classify_interaction(interaction.request, spec, diagnostics);
  return interaction;
}

std::string fingerprint_dumps(const std::vector<DumpEntry>& entries) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash ^= c;
      hash *= 0x100000001b3ULL;
    }
    hash ^= 0xff;  // field separator
    hash *= 0x100000001b3ULL;
  };
  for (const auto& entry : entries) {
    mix(std::to_string(entry.sequence_id));
    mix(entry.request_text);
    mix(entry.response_text ? *entry.response_text : std::string_view("\x01<none>"));
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

IngestResult ingest_dump_directory(const fs::path& dir, const ApiSpecification& spec,
                                   Diagnostics* diagnostics) {
  const auto entries = scan_dump_directory(dir, diagnostics);
  IngestResult result;
  result.fingerprint = fingerprint_dumps(entries);
  for (const auto& entry : entries) {
    if (auto interaction = build_interaction(entry, spec, result.tally, diagnostics)) {
      result.interactions.push_back(std::move(*interaction));
    }
  }
  return result;
}

}  // namespace restcov
