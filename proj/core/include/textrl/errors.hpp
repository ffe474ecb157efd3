#pragma once

#include <stdexcept>
#include <string>

namespace textrl {

// Base for all library errors so the CLI can catch one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed game DSL or other structured text.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("parse error at line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Structurally well formed input with dangling references.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error("validation error: " + message) {}
};

// Corpus/transcript line that does not follow the expected record format.
class FormatError : public Error {
 public:
  FormatError(int line, const std::string& message)
      : Error("format error at line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class SteppedAfterDone : public Error {
 public:
  SteppedAfterDone() : Error("step called on a finished episode") {}
};

class NoMaskableError : public Error {
 public:
  NoMaskableError() : Error("sequence contains only special tokens") {}
};

class DimMismatch : public Error {
 public:
  explicit DimMismatch(const std::string& message)
      : Error("dimension mismatch: " + message) {}
};

class SeqTooLong : public Error {
 public:
  SeqTooLong(int length, int max_len)
      : Error("sequence of length " + std::to_string(length) +
              " exceeds max length " + std::to_string(max_len)) {}
};

class EmptyCandidates : public Error {
 public:
  EmptyCandidates() : Error("candidate action list is empty") {}
};

class BufferEmpty : public Error {
 public:
  BufferEmpty() : Error("replay buffer is empty") {}
};

class IndexOutOfRange : public Error {
 public:
  explicit IndexOutOfRange(const std::string& message)
      : Error("index out of range: " + message) {}
};

class StateSpaceTooLarge : public Error {
 public:
  explicit StateSpaceTooLarge(std::size_t limit)
      : Error("reachable state space exceeds " + std::to_string(limit) +
              " states") {}
};

class IncompatibleActionSpace : public Error {
 public:
  explicit IncompatibleActionSpace(const std::string& message)
      : Error("incompatible action space: " + message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io error: " + message) {}
};

}  // namespace textrl
