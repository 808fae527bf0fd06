#pragma once

#include <stdexcept>

namespace stochlr {

// File-system and file-format failures (missing files, bad magic numbers,
// truncated payloads, unwritable outputs).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration rejections: syntax errors, unknown keys, semantic violations.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace stochlr
