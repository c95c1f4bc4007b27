#pragma once

#include <stdexcept>
#include <string>

namespace ghzsim {

// User-supplied configuration is invalid (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An engine guard tripped or a safety cap consumed the run (CLI exit code 3).
class GuardError : public std::runtime_error {
 public:
  explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ghzsim
