#pragma once

#include <stdexcept>
#include <string>

namespace taxeval {

// Problems with user-supplied inputs (files, ids, parameters). The CLI maps
// these to exit code 1; anything else escaping a command is exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class InvalidNode : public InputError {
 public:
  using InputError::InputError;
};

class TaxonomyError : public InputError {
 public:
  using InputError::InputError;
};

class CycleError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class LookupError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyInputError : public InputError {
 public:
  using InputError::InputError;
};

// A measure whose value is mathematically undefined for the given input
// (empty ROUGE reference, Kendall tau over all-tied data).
class UndefinedMeasure : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace taxeval
