#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace topeig {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (odd N, non-positive exponent, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two state vectors (or a vector and an operator) live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A sampled symbol, weight or profile value was NaN or infinite.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// Syntax error in a profile expression string.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// An iterative eigensolver exhausted its iteration budget.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& message, int iterations,
                std::vector<double> best_residuals)
      : Error(message),
        iterations_(iterations),
        best_residuals_(std::move(best_residuals)) {}

  int iterations() const noexcept { return iterations_; }
  const std::vector<double>& best_residuals() const noexcept {
    return best_residuals_;
  }

 private:
  int iterations_;
  std::vector<double> best_residuals_;
};

/// The inner conjugate-gradient solve of shift-invert hit its iteration cap.
class InnerSolveStall : public Error {
 public:
  InnerSolveStall(const std::string& message, int iterations,
                  double achieved_residual)
      : Error(message),
        iterations_(iterations),
        achieved_residual_(achieved_residual) {}

  int iterations() const noexcept { return iterations_; }
  double achieved_residual() const noexcept { return achieved_residual_; }

 private:
  int iterations_;
  double achieved_residual_;
};

/// A convergence fit could not be performed on the supplied data.
class DegenerateFit : public Error {
 public:
  using Error::Error;
};

}  // namespace topeig
