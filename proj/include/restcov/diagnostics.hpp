// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mutex>
#include <string>
#include <vector>

namespace restcov {

/// Collects non-fatal warnings produced while loading and matching.
/// Thread-safe; components take a nullable pointer and stay silent without one.
class Diagnostics {
 public:
  void warn(std::string message) {
    std::lock_guard lock(mutex_);
    warnings_.push_back(std::move(message));
  }

  std::vector<std::string> warnings() const {
    std::lock_guard lock(mutex_);
    return warnings_;
  }

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> warnings_;
};

inline void warn(Diagnostics* diagnostics, std::string message) {
  if (diagnostics != nullptr) diagnostics->warn(std::move(message));
}

}  // namespace restcov
