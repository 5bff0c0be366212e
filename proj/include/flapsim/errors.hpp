#pragma once

#include <stdexcept>
#include <string>

namespace flapsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// vee() received a matrix that is not antisymmetric within tolerance.
class NonAntisymmetric : public Error {
 public:
  using Error::Error;
};

/// Euler extraction attempted at |cos(roll)| below the singularity guard.
class GimbalLock : public Error {
 public:
  using Error::Error;
};

/// Allocation matrix determinant below threshold (arm angle near 0 or pi).
class SingularAllocation : public Error {
 public:
  using Error::Error;
};

/// Requested flap frequency exceeds the throttle fit's achievable maximum.
class OutOfEnvelope : public Error {
 public:
  using Error::Error;
};

/// Battery charge reached zero.
class BatteryEmpty : public Error {
 public:
  using Error::Error;
};

/// Integrator produced a non-finite state entry.
class NonFiniteState : public Error {
 public:
  using Error::Error;
};

/// Desired force vector vanished; thrust direction undefined.
class DegenerateForce : public Error {
 public:
  using Error::Error;
};

/// Desired thrust axis nearly parallel to the yaw-frame X axis.
class AttitudeSingular : public Error {
 public:
  using Error::Error;
};

/// Collective thrust too small to divide by in the flatness feedforward.
class ThrustTooLow : public Error {
 public:
  using Error::Error;
};

/// Crawl target coincides with the current position; heading undefined.
class CoincidentTarget : public Error {
 public:
  using Error::Error;
};

/// Plan requested a mode change outside the transition graph.
class InvalidTransition : public Error {
 public:
  using Error::Error;
};

/// Self-righting maneuver failed to reach upright in time.
class SelfRightTimeout : public Error {
 public:
  using Error::Error;
};

/// Trajectory sampled outside its time domain.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

/// Scenario configuration violates an invariant or contains unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Metrics requested on an empty telemetry log.
class EmptyLog : public Error {
 public:
  using Error::Error;
};

}  // namespace flapsim
