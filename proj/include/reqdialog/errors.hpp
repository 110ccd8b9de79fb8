#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reqdialog {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed tagged-token stream. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A lemma was encoded against a vocabulary that does not contain it.
class EncodingError : public Error {
 public:
  explicit EncodingError(std::string lemma)
      : Error("lemma not in vocabulary: " + lemma), lemma_(std::move(lemma)) {}
  const std::string& lemma() const noexcept { return lemma_; }

 private:
  std::string lemma_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its mathematical domain (e.g. cooperation factor > 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace reqdialog
