// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "restcov/http_message.hpp"
#include "restcov/interaction.hpp"

namespace restcov {

/// Bumped whenever the on-disk schema changes. Stores with any other
/// version are rejected rather than migrated.
inline constexpr int kStoreFormatVersion = 1;

/// Everything the data-collection stage hands to the statistics stage.
struct InteractionStore {
  int format_version = kStoreFormatVersion;
  std::string source_fingerprint;
  ParseTally tally;
  std::vector<HttpInteraction> interactions;  // ascending sequence_id
};

/// Writes a SQLite file at `store_path`, replacing any previous file
/// atomically. Throws DuplicateSequenceId before touching the disk, and
/// StoreWriteError on I/O failure.
InteractionStore persist_interactions(const std::filesystem::path& store_path,
                                      std::vector<HttpInteraction> interactions,
                                      std::string source_fingerprint = {}, ParseTally tally = {});

/// Throws StoreReadError or StoreVersionMismatch.
InteractionStore load_store(const std::filesystem::path& store_path);

inline std::vector<HttpInteraction> load_interactions(const std::filesystem::path& store_path) {
  return load_store(store_path).interactions;
}

}  // namespace restcov
