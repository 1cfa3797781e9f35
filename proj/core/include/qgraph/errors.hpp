#pragma once

#include <stdexcept>
#include <string>

namespace qgraph {

// Numerical failure: the requested value sits too close to a pole of the
// operator being evaluated (an eigenvalue of the clamped interior problem,
// or a Dirichlet edge resonance).
class PoleProximityError : public std::runtime_error {
public:
  explicit PoleProximityError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: the interior linear system is too ill-conditioned to
// solve reliably (reciprocal condition estimate below the configured floor).
class SingularSolveError : public std::runtime_error {
public:
  explicit SingularSolveError(const std::string& what) : std::runtime_error(what) {}
};

// Structural precondition failure on a certification request (decoration does
// not satisfy the resonator conditions, the target sits on a Dirichlet edge
// resonance, and so on). Derives from invalid_argument so generic callers can
// treat it as a validation error.
class ConditionViolatedError : public std::invalid_argument {
public:
  explicit ConditionViolatedError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace qgraph
