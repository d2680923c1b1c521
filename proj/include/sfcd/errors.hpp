#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace sfcd {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: unreadable or malformed files, shape mismatches, invalid
/// parameters or configuration. The CLI maps this to exit status 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The numerics could not proceed (degenerate data, collapsed or duplicate
/// cluster centers). The CLI maps this to exit status 3.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
  NumericalError(const std::string& what, int iteration)
      : Error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}

  std::optional<int> iteration() const { return iteration_; }

 private:
  std::optional<int> iteration_;
};

}  // namespace sfcd
