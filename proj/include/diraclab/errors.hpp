#pragma once

#include <stdexcept>
#include <string>

namespace diraclab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DIRACLAB_DEFINE_ERROR(Name)       \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

DIRACLAB_DEFINE_ERROR(DimensionError);
DIRACLAB_DEFINE_ERROR(DomainError);
DIRACLAB_DEFINE_ERROR(QuantizationError);
DIRACLAB_DEFINE_ERROR(TruncationError);
DIRACLAB_DEFINE_ERROR(FluxError);
DIRACLAB_DEFINE_ERROR(EmptySpectrumError);
DIRACLAB_DEFINE_ERROR(ChiralityAmbiguityError);
DIRACLAB_DEFINE_ERROR(DegreeMismatchError);
DIRACLAB_DEFINE_ERROR(ApplicabilityError);
DIRACLAB_DEFINE_ERROR(DimensionMismatchError);
DIRACLAB_DEFINE_ERROR(ConfigError);
DIRACLAB_DEFINE_ERROR(IoError);

#undef DIRACLAB_DEFINE_ERROR

/// Raised by the iterative eigensolver; carries the diagnostics of the
/// failed solve so callers can report them.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double max_residual)
      : Error(what), iterations_(iterations), max_residual_(max_residual) {}

  int iterations() const noexcept { return iterations_; }
  double max_residual() const noexcept { return max_residual_; }

 private:
  int iterations_;
  double max_residual_;
};

}  // namespace diraclab
