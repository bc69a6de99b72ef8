#pragma once

#include <stdexcept>
#include <string>

namespace ringctl {

/// Bad scalar argument (non-finite input, unsupported value).
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Fields or kernels sampled on incompatible grids.
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Time step violates the stability restriction; carries the largest step
/// the stepper would have accepted.
struct StepRejected : std::runtime_error {
  StepRejected(const std::string& what, double admissible)
      : std::runtime_error(what), admissible_dt(admissible) {}
  double admissible_dt;
};

/// The velocity-form control has no periodic solution (source not zero-mean).
struct NoPeriodicSolution : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested analysis outside the regime it is defined for (e.g. a <= 0).
struct UnsupportedRegime : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A theorem hypothesis does not hold for the given constants; the
/// corresponding claim is not checkable rather than violated.
struct HypothesisNotMet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A run left the regime where its results are meaningful (e.g. excessive
/// negative-density clipping).
struct SimulationAborted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Experiment spec file parsing / validation failure.
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem failure with path context.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ringctl
