#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mtaudit {

// Bad input data or configuration. The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem / network failures. The CLI maps these to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LineCountMismatch : public ValidationError {
 public:
  LineCountMismatch(std::size_t source_lines, std::size_t reference_lines)
      : ValidationError("line count mismatch: " + std::to_string(source_lines) +
                        " vs " + std::to_string(reference_lines)),
        source_lines_(source_lines),
        reference_lines_(reference_lines) {}

  std::size_t source_lines() const { return source_lines_; }
  std::size_t reference_lines() const { return reference_lines_; }

 private:
  std::size_t source_lines_;
  std::size_t reference_lines_;
};

class EncodingError : public ValidationError {
 public:
  explicit EncodingError(std::size_t line)
      : ValidationError("invalid UTF-8 on line " + std::to_string(line + 1)), line_(line) {}
  // 0-based line index
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyLine : public ValidationError {
 public:
  explicit EmptyLine(std::size_t line)
      : ValidationError("empty line " + std::to_string(line + 1)), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyReference : public ValidationError {
 public:
  EmptyReference() : ValidationError("reference is empty") {}
};

class UnknownPlugin : public ValidationError {
 public:
  explicit UnknownPlugin(const std::string& name)
      : ValidationError("unknown tokenizer plugin: " + name) {}
};

class AlignmentError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DuplicateRecord : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnknownPairId : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class LlmUnavailable : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace mtaudit
