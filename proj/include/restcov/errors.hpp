// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace restcov {

// Values double as process exit codes for the CLI.
enum class ErrorCategory {
  config = 1,
  specification = 2,
  ingestion = 3,
  store = 4,
  report = 5,
  proxy = 6,
  parse = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

// Configuration

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class ConfigNotFound : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ConfigParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ConfigValidationError : public ConfigError {
 public:
  ConfigValidationError(std::string key, const std::string& what)
      : ConfigError("config key \"" + key + "\": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Specification loading

class SpecError : public Error {
 public:
  explicit SpecError(const std::string& what) : Error(ErrorCategory::specification, what) {}
};

class FileNotFound : public SpecError {
 public:
  using SpecError::SpecError;
};

class SpecParseError : public SpecError {
 public:
  using SpecError::SpecError;
};

class SpecSemanticError : public SpecError {
 public:
  using SpecError::SpecError;
};

// Dump ingestion

class IngestError : public Error {
 public:
  explicit IngestError(const std::string& what) : Error(ErrorCategory::ingestion, what) {}
};

class DirectoryNotFound : public IngestError {
 public:
  using IngestError::IngestError;
};

class DuplicateSequenceId : public IngestError {
 public:
  using IngestError::IngestError;
};

// HTTP message parsing. Never escapes ingestion; failures are tallied.

class MalformedMessage : public Error {
 public:
  explicit MalformedMessage(const std::string& what) : Error(ErrorCategory::parse, what) {}
};

class MalformedRequest : public MalformedMessage {
 public:
  using MalformedMessage::MalformedMessage;
};

class MalformedResponse : public MalformedMessage {
 public:
  using MalformedMessage::MalformedMessage;
};

// Interaction store

class StoreError : public Error {
 public:
  explicit StoreError(const std::string& what) : Error(ErrorCategory::store, what) {}
};

class StoreWriteError : public StoreError {
 public:
  using StoreError::StoreError;
};

class StoreReadError : public StoreError {
 public:
  using StoreError::StoreError;
};

class StoreVersionMismatch : public StoreError {
 public:
  using StoreError::StoreError;
};

// Reports

class ReportWriteError : public Error {
 public:
  explicit ReportWriteError(const std::string& what) : Error(ErrorCategory::report, what) {}
};

// Capture proxy

class ProxyError : public Error {
 public:
  explicit ProxyError(const std::string& what) : Error(ErrorCategory::proxy, what) {}
};

class BindError : public ProxyError {
 public:
  using ProxyError::ProxyError;
};

}  // namespace restcov
