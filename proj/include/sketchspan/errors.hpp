#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sketchspan {

// Bad numeric arguments: probabilities outside (0,1), empty universes, etc.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Two sketches that do not share parameters and randomness were combined.
class IncompatibleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Index or vertex id outside the declared universe.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A serialized byte string could not be decoded.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Insert of a present edge or delete of an absent one.
class MultiplicityError : public std::runtime_error {
 public:
  MultiplicityError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedOpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SelfLoopError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// UR parameters outside the regime where the size schedule is defined (alpha >= 1, m > U).
class RegimeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The r_i schedule is not strictly increasing.
class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Graph-family size constraints (n not a fifth power, groups too small).
class SizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sketchspan
