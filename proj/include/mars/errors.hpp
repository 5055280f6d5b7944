#pragma once

#include <stdexcept>
#include <string>

namespace mars {

/// Base class for every error raised by the library. `exit_code()` is the
/// process status the CLI reports for it.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, int exit_code = 1)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Malformed input table: bad CSV, missing label column, unusable column.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what, 2) {}
};

/// Training labels contain a single class.
class DegenerateLabelsError : public Error {
 public:
  explicit DegenerateLabelsError(const std::string& what) : Error(what, 3) {}
};

/// Prediction table does not carry the columns the model was trained on.
class FeatureMismatchError : public Error {
 public:
  explicit FeatureMismatchError(const std::string& what) : Error(what, 4) {}
};

/// Model file unreadable, corrupt, or from an unsupported format version.
class ModelFormatError : public Error {
 public:
  explicit ModelFormatError(const std::string& what) : Error(what, 5) {}
};

}  // namespace mars
