#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace explore {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised while reading a dataset; line is 1-based, 0 when not tied to a row.
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UndefinedDistance : public Error {
 public:
  UndefinedDistance() : Error("jaccard distance undefined: both vectors are all-zero") {}
};

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace explore
