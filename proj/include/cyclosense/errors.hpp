// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cyclosense {

// Invalid user-facing configuration (bad spec fields, bad config file, bad
// CLI arguments). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A linear system whose matrix is singular or too ill-conditioned to trust.
// Detectors surface this as an undecidable frame; the harness re-draws.
class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cyclosense
