// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "restcov/diagnostics.hpp"
#include "restcov/http_message.hpp"
#include "restcov/interaction.hpp"
#include "restcov/spec_model.hpp"

namespace restcov {

struct DumpEntry {
  std::uint64_t sequence_id = 0;
  std::string request_text;
  std::optional<std::string> response_text;
};

/// Pairs "<n>-request.txt" with "<n>-response.txt", ascending by n.
/// Response files without a request are skipped with a warning.
/// Throws DirectoryNotFound or DuplicateSequenceId.
std::vector<DumpEntry> scan_dump_directory(const std::filesystem::path& dir,
                                           Diagnostics* diagnostics = nullptr);

/// Parses and classifies one pair. Returns nullopt (and counts a request
/// failure) when the request is malformed; a malformed response turns the
/// interaction into an orphan.
std::optional<HttpInteraction> build_interaction(const DumpEntry& entry,
                                                 const ApiSpecification& spec, ParseTally& tally,
                                                 Diagnostics* diagnostics = nullptr);

struct IngestResult {
  std::vector<HttpInteraction> interactions;
  ParseTally tally;
  std::string fingerprint;
};

/// Scan, parse and classify a whole dump directory. Individual parse
/// failures never abort the run.
IngestResult ingest_dump_directory(const std::filesystem::path& dir, const ApiSpecification& spec,
                                   Diagnostics* diagnostics = nullptr);

/// Content fingerprint of the dump files (names and bytes), FNV-1a 64 in hex.
std::string fingerprint_dumps(const std::vector<DumpEntry>& entries);

}  // namespace restcov
