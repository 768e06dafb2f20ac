#pragma once

#include <stdexcept>
#include <string>

namespace enatp {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// -- linear algebra kernel ---------------------------------------------------

/// A spectrum expected to be real and nonnegative came out complex/negative
/// beyond the caller's tolerance.
struct NonRealSpectrum : Error {
  using Error::Error;
};

/// An iterative solver failed to reach its stopping criterion.
struct ConvergenceFailure : Error {
  using Error::Error;
};

// -- states -------------------------------------------------------------------

struct NotNormalized : Error {
  using Error::Error;
};

struct InvalidState : Error {
  using Error::Error;
};

/// A Bloch-form reconstruction produced a matrix that is not a density matrix.
struct NonPhysical : Error {
  using Error::Error;
};

// -- measurements --------------------------------------------------------------

struct BadAxis : Error {
  using Error::Error;
};

struct BadEpsilon : Error {
  using Error::Error;
};

struct EpsOutOfRange : Error {
  using Error::Error;
};

struct NotProjectors : Error {
  using Error::Error;
};

/// An outcome operator is singular, so no weak-form decomposition q(I + e)
/// with finite e exists.
struct NonDecomposable : Error {
  using Error::Error;
};

// -- sequences ------------------------------------------------------------------

/// A measurement branch has vanishing probability and cannot be normalized.
struct ZeroProbability : Error {
  using Error::Error;
};

/// The Bloch-update normalization factor eta = 1 + eps n.a vanished.
struct DegenerateNormalization : Error {
  using Error::Error;
};

struct InputNotCorrelated : Error {
  using Error::Error;
};

/// A known-outcome schedule would exceed the branch-count cap.
struct BranchLimitExceeded : Error {
  using Error::Error;
};

// -- cli --------------------------------------------------------------------------

/// Config file rejected; message carries a line-numbered diagnostic.
struct ConfigParse : Error {
  using Error::Error;
};

/// Sweep grid bounds are out of range.
struct BadRange : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

/// A computed quantity violated one of the output invariants (probability or
/// concurrence outside [0, 1], broken probability conservation, ...).
struct InvariantViolation : Error {
  using Error::Error;
};

}  // namespace enatp
