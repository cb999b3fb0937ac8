#pragma once

#include <stdexcept>
#include <string>

namespace opm {

// Raised when an integration blows up or an iterative solver fails. The CLI
// maps it to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for malformed or incomplete experiment configuration (exit code 2).
// The message always starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace opm
