#pragma once

#include <stdexcept>
#include <string>

namespace sol {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument: value outside the documented domain of an operation.
class InputError : public Error {
public:
  explicit InputError(const std::string& what) : Error(what) {}
};

/// A computation would leave the representable range (e.g. exp(z) with
/// |z| > 700). Reported instead of silently producing inf.
class RangeError : public Error {
public:
  explicit RangeError(const std::string& what) : Error(what) {}
};

/// An iterative solver exhausted its budget. Carries the best residual seen.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what), residual(best_residual) {}
  double residual;
};

}  // namespace sol
