#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cdengine {

// Base for every error raised on bad input data (exit code 2 at the CLI).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IntegrityError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyCorpusError : public DataError {
 public:
  using DataError::DataError;
};

// Invalid or inconsistent configuration (lexicon missing, bad window, ...).
class ConfigError : public DataError {
 public:
  using DataError::DataError;
};

class RewireError : public DataError {
 public:
  using DataError::DataError;
};

class RegressionError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace cdengine
