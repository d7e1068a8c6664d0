#pragma once

#include <stdexcept>
#include <string>

namespace releq {

/// Base class for all library errors. `category()` is a stable machine-readable
/// tag and `exit_code()` is the process exit status the CLI reports for it.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual const char *category() const noexcept = 0;
  virtual int exit_code() const noexcept = 0;
};

/// Bad input or configuration: non-positive masses, violated separation
/// constraints, non-critical configurations passed where a critical one is
/// required.
class ValidationError : public Error {
public:
  using Error::Error;
  const char *category() const noexcept override { return "validation"; }
  int exit_code() const noexcept override { return 1; }
};

/// Evaluation outside the mathematical domain (coincident points, exponent out
/// of range, zero pivot).
class DomainError : public Error {
public:
  using Error::Error;
  const char *category() const noexcept override { return "domain"; }
  int exit_code() const noexcept override { return 1; }
};

class ConvergenceError : public Error {
public:
  using Error::Error;
  const char *category() const noexcept override { return "convergence"; }
  int exit_code() const noexcept override { return 2; }
};

/// Raised when two refinement levels of a quadrature disagree by more than the
/// requested tolerance. Both values are kept for diagnostics.
class AccuracyError : public Error {
public:
  AccuracyError(const std::string &what, double coarse, double fine)
      : Error(what + " (coarse=" + std::to_string(coarse) +
              ", fine=" + std::to_string(fine) + ")"),
        coarse_(coarse), fine_(fine) {}
  const char *category() const noexcept override { return "accuracy"; }
  int exit_code() const noexcept override { return 2; }
  double coarse() const noexcept { return coarse_; }
  double fine() const noexcept { return fine_; }

private:
  double coarse_;
  double fine_;
};

/// Near-collision during N-body integration.
class SingularityError : public Error {
public:
  using Error::Error;
  const char *category() const noexcept override { return "singularity"; }
  int exit_code() const noexcept override { return 2; }
};

} // namespace releq
