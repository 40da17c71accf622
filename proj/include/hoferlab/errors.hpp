#pragma once

#include <stdexcept>
#include <string>

namespace hoferlab {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedBackend : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateMesh : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Velocity one-form failed the loop-period test; cannot integrate a primitive.
struct NotExact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Lift and Hamiltonian disagree; a Hofer length computed from them would be
// the length of some other path.
struct ConsistencyFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepRejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hoferlab
