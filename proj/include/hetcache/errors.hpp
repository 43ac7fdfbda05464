// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hetcache {

// Base class for all domain errors raised by the toolkit.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Placement requires K_i * gamma_i to be an integer.
struct NonIntegerRedundancy : Error {
  using Error::Error;
};

// A scheduler was invoked outside the parameter regime it covers.
struct RegimeMismatch : Error {
  using Error::Error;
};

// Stream split (L1, L2) violates L1 + L2 = L, L1 >= 1 or a feasibility bound.
struct InvalidStreamSplit : Error {
  using Error::Error;
};

// Not enough users outside tau to form the requested beta window.
struct InsufficientGround : Error {
  using Error::Error;
};

// No construction in the toolkit produces an exact schedule for this config.
struct UnsupportedRegime : Error {
  using Error::Error;
};

// The same subfile copy was scheduled twice; indicates a scheduler bug.
struct DuplicatePhi : Error {
  using Error::Error;
};

// Channel submatrix for a precoded set is not invertible.
struct SingularSubmatrix : Error {
  using Error::Error;
};

// Could not draw a generic channel within the resampling budget.
struct GenericityFailure : Error {
  using Error::Error;
};

// Brute-force counting oracle refused an instance above its size cap.
struct InstanceTooLarge : Error {
  using Error::Error;
};

// Placement profile violates the file-size or cache-size constraint.
struct InfeasibleProfile : Error {
  using Error::Error;
};

}  // namespace hetcache
