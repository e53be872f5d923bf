#pragma once

#include <stdexcept>
#include <string>

namespace gaussfock {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad shapes, indices, parameters, asymmetric or non-symplectic inputs.
struct invalid_input_error : error {
  using error::error;
};

struct not_positive_definite_error : error {
  using error::error;
};

// Eigenvalue pairing or clustering failed beyond the requested tolerance.
struct degeneracy_error : error {
  using error::error;
};

// Requested truncated-basis dimension exceeds the configured cap.
struct capacity_error : error {
  using error::error;
};

// Tensor-style composition that the tail data model cannot represent.
struct composition_error : error {
  using error::error;
};

// Displacement support extends past the finite block.
struct displacement_error : error {
  using error::error;
};

// The state has no trace-class density operator (divergent tail).
struct no_density_matrix_error : error {
  using error::error;
};

// A per-mode parameter is infinite (temperature parameter at d = 1).
struct infinite_parameter_error : error {
  using error::error;
};

// The state fails its own admissibility conditions where a valid one is required.
struct validation_error : error {
  using error::error;
};

}  // namespace gaussfock
