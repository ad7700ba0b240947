#pragma once

#include <stdexcept>
#include <string>

namespace unargmax {

// Root of every error raised by the library. Callers that only care about
// "input was bad" vs "solver gave up" can catch the intermediate classes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input problems: malformed files, wrong shapes, bad values.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class ShapeError : public InputError {
 public:
  using InputError::InputError;
};

class LengthMismatch : public InputError {
 public:
  using InputError::InputError;
};

class ValueError : public InputError {
 public:
  using InputError::InputError;
};

class MissingVocab : public InputError {
 public:
  using InputError::InputError;
};

class DomainError : public InputError {
 public:
  using InputError::InputError;
};

class UnsupportedConfig : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateInstance : public InputError {
 public:
  using InputError::InputError;
};

class IOError : public Error {
 public:
  using Error::Error;
};

// Reflection across a hyperplane whose normal is exactly zero.
class DegenerateHyperplane : public Error {
 public:
  using Error::Error;
};

// The LP did not reach a certified optimum within its iteration budget.
class SolverStalled : public Error {
 public:
  using Error::Error;
};

}  // namespace unargmax
