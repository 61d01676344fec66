#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rivet {

/// Failure categories. The C API maps each onto a stable status code.
enum class ErrorKind {
  InvalidArgument,
  Config,
  Mesh,
  NonConvergence,
  ConstraintViolation,
  Solver,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Iterative solve that hit its iteration cap. Carries the residual history so
/// callers can report how far off the last iterate was.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> history)
      : Error(ErrorKind::NonConvergence, what), history_(std::move(history)) {}

  const std::vector<double>& residual_history() const noexcept { return history_; }
  double last_residual() const noexcept { return history_.empty() ? 0.0 : history_.back(); }

 private:
  std::vector<double> history_;
};

}  // namespace rivet
