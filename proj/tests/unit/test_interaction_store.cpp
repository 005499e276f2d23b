// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sqlite3.h>

#include "restcov/errors.hpp"
#include "restcov/interaction_store.hpp"
#include "test_paths.hpp"

namespace restcov {
namespace {

using testing::TempDir;

std::vector<HttpInteraction> sample() {
  std::string binary;
  for (int i = 0; i < 256; ++i) binary += static_cast<char>(i);

  HttpInteraction first;
  first.sequence_id = 7;
  first.request = parse_request("POST /v2/pet?a=1&a=2&b=%00z HTTP/1.1\r\nHost: h\r\nX-Dup: 1\r\nx-dup: 2\r\n"
                                "Content-Type: application/json\r\n\r\n{\"k\": [1, 2]}");
  first.response = parse_response("HTTP/1.1 200 OK\r\nContent-Type: application/octet-stream\r\n\r\n" + binary);
  first.match = OperationMatch{"/pet", "POST", true, {}};

  HttpInteraction second;
  second.sequence_id = 3;
  second.request = parse_request("GET /v2/pet/%F0%9F%90%95 HTTP/1.1\r\n\r\n");
  second.match = OperationMatch{"/pet/{petId}", "GET", true, {{"petId", "\xF0\x9F\x90\x95"}}};

  HttpInteraction third;
  third.sequence_id = 0xFFFFFFFFFFFFFFF0ULL;
  third.request = parse_request("DELETE /elsewhere HTTP/1.1\r\n\r\n");
  return {first, second, third};
}

TEST(InteractionStore, RoundTripIsLossless) {
  TempDir dir;
  const auto interactions = sample();
  const ParseTally tally{5, 1, 2, 3};
  const auto written = persist_interactions(dir / "s.sqlite", interactions, "abc123", tally);
  ASSERT_EQ(written.interactions.size(), 3u);
  EXPECT_EQ(written.interactions[0].sequence_id, 3u) << "stored in ascending sequence order";
  const auto loaded = load_store(dir / "s.sqlite");
  EXPECT_EQ(loaded.format_version, kStoreFormatVersion);
  EXPECT_EQ(loaded.source_fingerprint, "abc123");
  EXPECT_EQ(loaded.tally, tally);
  EXPECT_EQ(loaded.interactions, written.interactions);
  EXPECT_EQ(loaded.interactions[2].sequence_id, 0xFFFFFFFFFFFFFFF0ULL);
  EXPECT_EQ(loaded.interactions[1].request.headers.find_all("x-dup").size(), 2u);
  EXPECT_FALSE(loaded.interactions[2].response);
  EXPECT_FALSE(loaded.interactions[2].match);
}

TEST(InteractionStore, OverwriteReplacesContent) {
  TempDir dir;
  persist_interactions(dir / "s.sqlite", sample());
  persist_interactions(dir / "s.sqlite", {});
  EXPECT_TRUE(load_interactions(dir / "s.sqlite").empty());
}

TEST(InteractionStore, Errors) {
  TempDir dir;
  auto duplicated = sample();
  duplicated[1].sequence_id = duplicated[0].sequence_id;
  EXPECT_THROW(persist_interactions(dir / "d.sqlite", duplicated), DuplicateSequenceId);
  EXPECT_FALSE(std::filesystem::exists(dir / "d.sqlite"));
  EXPECT_THROW(persist_interactions(dir / "no" / "such" / "s.sqlite", sample()), StoreWriteError);
  EXPECT_THROW(load_store(dir / "absent.sqlite"), StoreReadError);
  testing::write_file(dir / "text.sqlite", "this is not a database");
  EXPECT_THROW(load_store(dir / "text.sqlite"), StoreReadError);
}

TEST(InteractionStore, RejectsOtherFormatVersions) {
  TempDir dir;
  const auto file = dir / "s.sqlite";
  persist_interactions(file, sample());
  sqlite3* db = nullptr;
  ASSERT_EQ(sqlite3_open(file.c_str(), &db), SQLITE_OK);
  ASSERT_EQ(sqlite3_exec(db, "UPDATE meta SET value = '99' WHERE key = 'format_version'", nullptr, nullptr, nullptr),
            SQLITE_OK);
  ASSERT_EQ(sqlite3_changes(db), 1);
  sqlite3_close(db);
  EXPECT_THROW(load_store(file), StoreVersionMismatch);
}

}  // namespace
}  // namespace restcov
