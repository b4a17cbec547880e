#pragma once

#include <stdexcept>
#include <string>

namespace bohm {

/// Invalid argument to a library entry point (bad quantum number, empty spec, ...).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// |psi| fell below the configured floor: the evaluation point is at or too
/// near a node and the velocity ratio grad(psi)/psi is unreliable.
struct NodeSingularity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The nodal equations degenerate into identities at this instant (both sine
/// factors vanish); node positions are not defined by the analytic path.
struct DegenerateTime : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A closed-form reconstruction hit a vanishing denominator.
struct DegenerateState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No seed of the X-point ring search converged to a stationary point.
struct NoXPointFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The adaptive step controller underflowed; typically the trajectory ran
/// exactly into a node.
struct StepFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bohm
