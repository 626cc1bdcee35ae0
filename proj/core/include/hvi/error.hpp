#pragma once

#include <stdexcept>
#include <string>

namespace hvi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejected input: bad geometry, index out of range, malformed parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A numerical stage did not reach its contract (non-convergence, audit
// failure, unbounded descent). `stage()` names the pipeline step.
class SolverError : public Error {
 public:
  SolverError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key = {}, int line = 0)
      : Error(what), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace hvi
