#pragma once

#include <stdexcept>

namespace xvar {

// Error taxonomy mirrors the CLI exit codes: invalid input (2), defective
// data (3), inconsistent or infeasible problems (4), numerical failure (5).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimensions out of range, xi outside the admissible
// interval, missing required entries, unparsable files.
struct InvalidInput : Error {
  using Error::Error;
};

// Structurally valid data the methods cannot work with: empty panels,
// no exceedances above the threshold, degenerate samples.
struct DataError : Error {
  using Error::Error;
};

// Inputs that contradict the model: extremal coefficients outside the
// valid cone, infeasible constraint systems.
struct InconsistentInput : Error {
  using Error::Error;
};

// Solver breakdowns: pivot failure, iteration caps, non-convergence.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace xvar
