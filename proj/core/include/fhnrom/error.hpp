#pragma once

#include <stdexcept>
#include <string>

namespace fhnrom {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix that had to be factorized or inverted is singular or not SPD.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Input dimensions do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration failed to reach the residual tolerance.
class NewtonFailure : public Error {
 public:
  NewtonFailure(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// A time step failed; carries the time at which the step was attempted.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double time, double residual)
      : Error(what), time_(time), residual_(residual) {}

  double time() const { return time_; }
  double residual() const { return residual_; }

 private:
  double time_;
  double residual_;
};

/// Requested more modes than the data supports.
class RankError : public Error {
 public:
  RankError(const std::string& what, long achievable_rank)
      : Error(what), achievable_rank_(achievable_rank) {}

  long achievable_rank() const { return achievable_rank_; }

 private:
  long achievable_rank_;
};

/// File read/write failure; the message names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fhnrom
