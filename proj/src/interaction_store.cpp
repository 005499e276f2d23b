// SPDX-License-Identifier: Apache-2.0
#include "restcov/interaction_store.hpp"

#include <sqlite3.h>
#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <string_view>

#include "restcov/errors.hpp"

namespace restcov {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kSchema = R"sql(
CREATE TABLE meta (
  key   TEXT PRIMARY KEY,
  value TEXT NOT NULL
);
CREATE TABLE interactions (
  sequence_id         INTEGER PRIMARY KEY,
  method              BLOB NOT NULL,
  raw_path            BLOB NOT NULL,
  request_body        BLOB NOT NULL,
  request_structured  TEXT,
  status_code         INTEGER,
  response_body       BLOB,
  response_structured TEXT,
  match_template      BLOB,
  match_method        BLOB,
  method_supported    INTEGER
);
CREATE TABLE headers (
  sequence_id INTEGER NOT NULL,
  role        INTEGER NOT NULL,
  position    INTEGER NOT NULL,
  name        BLOB NOT NULL,
  value       BLOB NOT NULL,
  PRIMARY KEY (sequence_id, role, position)
);
CREATE TABLE query_parameters (
  sequence_id INTEGER NOT NULL,
  position    INTEGER NOT NULL,
  name        BLOB NOT NULL,
  value       BLOB NOT NULL,
  PRIMARY KEY (sequence_id, position)
);
CREATE TABLE path_parameters (
  sequence_id INTEGER NOT NULL,
  name        BLOB NOT NULL,
  value       BLOB NOT NULL,
  PRIMARY KEY (sequence_id, name)
);
)sql";

enum HeaderRole : int { kRequestHeaders = 0, kResponseHeaders = 1 };

template <class E>
class Database {
 public:
  Database(const fs::path& file, int flags) {
    if (sqlite3_open_v2(file.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
      std::string message = db_ ? sqlite3_errmsg(db_) : "out of memory";
      sqlite3_close(db_);
      throw E("cannot open store " + file.string() + ": " + message);
    }
  }
  ~Database() { sqlite3_close(db_); }
  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;

  void exec(std::string_view sql) {
    char* error = nullptr;
    if (sqlite3_exec(db_, std::string(sql).c_str(), nullptr, nullptr, &error) != SQLITE_OK) {
      std::string message = error ? error : "unknown error";
      sqlite3_free(error);
      throw E("store: " + message);
    }
  }

  sqlite3* get() const noexcept { return db_; }
  std::string error() const { return sqlite3_errmsg(db_); }

 private:
  sqlite3* db_ = nullptr;
};

template <class E>
class Statement {
 public:
  Statement(Database<E>& db, std::string_view sql) : db_(db) {
    if (sqlite3_prepare_v2(db.get(), sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) !=
        SQLITE_OK) {
      throw E("store: " + db.error());
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int index, std::string_view bytes) {
    check(sqlite3_bind_blob64(stmt_, index, bytes.empty() ? "" : bytes.data(), bytes.size(),
                              SQLITE_TRANSIENT));
    return *this;
  }
  Statement& bind_text(int index, std::string_view text) {
    check(sqlite3_bind_text64(stmt_, index, text.empty() ? "" : text.data(), text.size(), SQLITE_TRANSIENT,
                              SQLITE_UTF8));
    return *this;
  }
  Statement& bind(int index, std::int64_t value) {
    check(sqlite3_bind_int64(stmt_, index, value));
    return *this;
  }
  Statement& bind_null(int index) {
    check(sqlite3_bind_null(stmt_, index));
    return *this;
  }

  /// True while rows remain.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw E("store: " + db_.error());
  }

  void run() {
    step();
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
  }

  bool is_null(int column) const { return sqlite3_column_type(stmt_, column) == SQLITE_NULL; }
  std::int64_t integer(int column) const { return sqlite3_column_int64(stmt_, column); }
  std::string bytes(int column) const {
    const auto* data = static_cast<const char*>(sqlite3_column_blob(stmt_, column));
    const auto size = static_cast<std::size_t>(sqlite3_column_bytes(stmt_, column));
    return data ? std::string(data, size) : std::string();
  }

 private:
  void check(int rc) {
    if (rc != SQLITE_OK) throw E("store: " + db_.error());
  }

  Database<E>& db_;
  sqlite3_stmt* stmt_ = nullptr;
};

std::int64_t to_column(std::uint64_t id) { return static_cast<std::int64_t>(id); }
std::uint64_t from_column(std::int64_t id) { return static_cast<std::uint64_t>(id); }

std::string encode_tally(const ParseTally& tally) {
  return std::to_string(tally.requests_parsed) + " " + std::to_string(tally.request_failures) +
         " " + std::to_string(tally.response_failures) + " " + std::to_string(tally.body_failures);
}

ParseTally decode_tally(const std::string& text) {
  ParseTally tally;
  if (std::sscanf(text.c_str(), "%zu %zu %zu %zu", &tally.requests_parsed,
                  &tally.request_failures, &tally.response_failures, &tally.body_failures) != 4) {
    throw StoreReadError("store: corrupt parse tally \"" + text + "\"");
  }
  return tally;
}

void write_store(const fs::path& file, const InteractionStore& store) {
  using Db = Database<StoreWriteError>;
  using Stmt = Statement<StoreWriteError>;
  Db db(file, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
  db.exec("PRAGMA journal_mode = OFF; PRAGMA synchronous = OFF;");
  db.exec("BEGIN");
  db.exec(kSchema);

  Stmt meta(db, "INSERT INTO meta (key, value) VALUES (?, ?)");
  meta.bind_text(1, "format_version").bind_text(2, std::to_string(store.format_version)).run();
  meta.bind_text(1, "source_fingerprint").bind_text(2, store.source_fingerprint).run();
  meta.bind_text(1, "parse_tally").bind_text(2, encode_tally(store.tally)).run();

  Stmt row(db,
           "INSERT INTO interactions (sequence_id, method, raw_path, request_body, "
           "request_structured, status_code, response_body, response_structured, match_template, "
           "match_method, method_supported) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)");
  Stmt header(db,
              "INSERT INTO headers (sequence_id, role, position, name, value) "
              "VALUES (?, ?, ?, ?, ?)");
  Stmt query(db,
             "INSERT INTO query_parameters (sequence_id, position, name, value) "
             "VALUES (?, ?, ?, ?)");
  Stmt path_parameter(db, "INSERT INTO path_parameters (sequence_id, name, value) VALUES (?, ?, ?)");

  auto write_headers = [&](std::int64_t id, HeaderRole role, const HeaderMap& headers) {
    std::int64_t position = 0;
    for (const auto& [name, value] : headers.entries()) {
      header.bind(1, id).bind(2, std::int64_t{role}).bind(3, position++).bind(4, name).bind(5, value);
      header.run();
    }
  };

  for (const auto& interaction : store.interactions) {
    const auto id = to_column(interaction.sequence_id);
    const auto& request = interaction.request;
    row.bind(1, id).bind(2, request.method).bind(3, request.raw_path).bind(4, request.body);
    if (request.structured_body) {
      row.bind_text(5, request.structured_body->dump());
    } else {
      row.bind_null(5);
    }
    if (const auto& response = interaction.response) {
      row.bind(6, std::int64_t{response->status_code}).bind(7, response->body);
      if (response->structured_body) {
        row.bind_text(8, response->structured_body->dump());
      } else {
        row.bind_null(8);
      }
    } else {
      row.bind_null(6).bind_null(7).bind_null(8);
    }
    if (const auto& match = interaction.match) {
      row.bind(9, match->template_path)
          .bind(10, match->method)
          .bind(11, std::int64_t{match->method_supported ? 1 : 0});
      for (const auto& [name, value] : match->path_parameters) {
        path_parameter.bind(1, id).bind(2, name).bind(3, value);
        path_parameter.run();
      }
    } else {
      row.bind_null(9).bind_null(10).bind_null(11);
    }
    row.run();

    write_headers(id, kRequestHeaders, request.headers);
    if (interaction.response) write_headers(id, kResponseHeaders, interaction.response->headers);

    std::int64_t position = 0;
    for (const auto& [name, values] : request.query_parameters) {
      for (const auto& value : values) {
        query.bind(1, id).bind(2, position++).bind(3, name).bind(4, value);
        query.run();
      }
    }
  }
  db.exec("COMMIT");
}

nlohmann::json parse_stored_json(const std::string& text) {
  auto tree = nlohmann::json::parse(text, nullptr, false);
  if (tree.is_discarded()) throw StoreReadError("store: corrupt structured body");
  return tree;
}

}  // namespace

InteractionStore persist_interactions(const fs::path& store_path,
                                      std::vector<HttpInteraction> interactions,
                                      std::string source_fingerprint, ParseTally tally) {
  std::set<std::uint64_t> ids;
  for (const auto& interaction : interactions) {
    if (!ids.insert(interaction.sequence_id).second) {
      throw DuplicateSequenceId("duplicate sequence id " + std::to_string(interaction.sequence_id) +
                                " in interactions to persist");
    }
  }
  std::sort(interactions.begin(), interactions.end(),
            [](const auto& a, const auto& b) { return a.sequence_id < b.sequence_id; });

  InteractionStore store;
  store.source_fingerprint = std::move(source_fingerprint);
  store.tally = tally;
  store.interactions = std::move(interactions);

  const auto parent = store_path.parent_path();
  std::error_code ec;
  if (!parent.empty() && !fs::is_directory(parent, ec)) {
    throw StoreWriteError("store directory does not exist: " + parent.string());
  }
  auto temporary = store_path;
  temporary += ".tmp-" + std::to_string(::getpid());
  fs::remove(temporary, ec);
  try {
    write_store(temporary, store);
  } catch (...) {
    fs::remove(temporary, ec);
    throw;
  }
  fs::rename(temporary, store_path, ec);
  if (ec) {
    fs::remove(temporary, ec);
    throw StoreWriteError("cannot replace store " + store_path.string() + ": " + ec.message());
  }
  return store;
}

InteractionStore load_store(const fs::path& store_path) {
  using Db = Database<StoreReadError>;
  using Stmt = Statement<StoreReadError>;
  std::error_code ec;
  if (!fs::is_regular_file(store_path, ec)) {
    throw StoreReadError("store not found: " + store_path.string());
  }
  Db db(store_path, SQLITE_OPEN_READONLY);

  std::map<std::string, std::string> meta;
  {
    Stmt select(db, "SELECT key, value FROM meta");
    while (select.step()) meta[select.bytes(0)] = select.bytes(1);
  }
  const auto version = meta.find("format_version");
  if (version == meta.end()) throw StoreReadError("not an interaction store: " + store_path.string());
  if (version->second != std::to_string(kStoreFormatVersion)) {
    throw StoreVersionMismatch("store " + store_path.string() + " has format version " +
                               version->second + ", expected " +
                               std::to_string(kStoreFormatVersion));
  }

  InteractionStore store;
  store.source_fingerprint = meta["source_fingerprint"];
  if (const auto tally = meta.find("parse_tally"); tally != meta.end()) {
    store.tally = decode_tally(tally->second);
  }

  std::map<std::uint64_t, std::size_t> index;
  {
    Stmt select(db,
                "SELECT sequence_id, method, raw_path, request_body, request_structured, "
                "status_code, response_body, response_structured, match_template, match_method, "
                "method_supported FROM interactions ORDER BY sequence_id");
    while (select.step()) {
      HttpInteraction interaction;
      interaction.sequence_id = from_column(select.integer(0));
      interaction.request.method = select.bytes(1);
      interaction.request.raw_path = select.bytes(2);
      interaction.request.body = select.bytes(3);
      if (!select.is_null(4)) interaction.request.structured_body = parse_stored_json(select.bytes(4));
      if (!select.is_null(5)) {
        HttpResponseRecord response;
        response.status_code = static_cast<int>(select.integer(5));
        response.body = select.bytes(6);
        if (!select.is_null(7)) response.structured_body = parse_stored_json(select.bytes(7));
        interaction.response = std::move(response);
      }
      if (!select.is_null(8)) {
        interaction.match = OperationMatch{select.bytes(8), select.bytes(9), select.integer(10) != 0, {}};
      }
      index[interaction.sequence_id] = store.interactions.size();
      store.interactions.push_back(std::move(interaction));
    }
  }
  auto find = [&](std::int64_t id) -> HttpInteraction& {
    const auto it = index.find(from_column(id));
    if (it == index.end()) throw StoreReadError("store: dangling reference to interaction " + std::to_string(id));
    return store.interactions[it->second];
  };
  {
    Stmt select(db, "SELECT sequence_id, role, name, value FROM headers ORDER BY sequence_id, role, position");
    while (select.step()) {
      auto& interaction = find(select.integer(0));
      if (select.integer(1) == kRequestHeaders) {
        interaction.request.headers.add(select.bytes(2), select.bytes(3));
      } else if (interaction.response) {
        interaction.response->headers.add(select.bytes(2), select.bytes(3));
      } else {
        throw StoreReadError("store: response headers for orphan request");
      }
    }
  }
  {
    Stmt select(db, "SELECT sequence_id, name, value FROM query_parameters ORDER BY sequence_id, position");
    while (select.step()) {
      find(select.integer(0)).request.query_parameters[select.bytes(1)].push_back(select.bytes(2));
    }
  }
  {
    Stmt select(db, "SELECT sequence_id, name, value FROM path_parameters");
    while (select.step()) {
      auto& interaction = find(select.integer(0));
      if (!interaction.match) throw StoreReadError("store: path parameters without a match");
      interaction.match->path_parameters[select.bytes(1)] = select.bytes(2);
    }
  }
  // Ids above INT64_MAX come back negative from SQLite's ordering.
  std::sort(store.interactions.begin(), store.interactions.end(),
            [](const auto& a, const auto& b) { return a.sequence_id < b.sequence_id; });
  return store;
}

}  // namespace restcov
