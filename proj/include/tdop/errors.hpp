#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tdop {

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number of the offending row.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A submission that parses but violates the submission contract.
class ValidationError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Environment misuse: stepping a finished episode.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Environment misuse: revisiting a node or stepping to an unknown node.
class InvalidAction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tdop
