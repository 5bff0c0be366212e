#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "flapsim/actuation.hpp"
#include "flapsim/errors.hpp"
#include "flapsim/geometry.hpp"
#include "flapsim/trajectory.hpp"

namespace flapsim {

/// Diagonal gains of the geometric tracking controller: position, velocity,
/// orientation and angular-velocity terms.
struct GainSet {
  Vec3 kp = Vec3::Constant(2.0);
  Vec3 kv = Vec3::Constant(1.2);
  Vec3 kr = Vec3::Constant(0.02);
  Vec3 komega = Vec3::Constant(0.004);

  void validate() const {
    if (kp.minCoeff() <= 0.0 || kv.minCoeff() <= 0.0 ||
        kr.minCoeff() <= 0.0 || komega.minCoeff() <= 0.0) {
      throw ConfigError("controller.se3 gains must be positive");
    }
  }
};

struct Se3Options {
  /// Feed the flatness body-rate references forward; with false the
  /// controller tracks zero rates (pure feedback).
  bool rate_feedforward = true;
  /// Use the observed yaw rate for the (discarded) yaw channel reference
  /// instead of zero, keeping e_omega clean of the passive yaw motion.
  bool use_observed_yaw_rate = true;
};

/// Thrust command produced by the translational loop.
struct ForceCommand {
  Vec3 force = Vec3::Zero();        // desired force vector, world (N)
  double thrust = 0.0;              // u1 = force . Z_B (current body Z), N
  Vec3 thrust_axis = Vec3::UnitZ(); // desired body Z = force / |force|
};

inline constexpr double kMinThrust = 1e-6;  // N

/// Translational loop:
///
///   e_p = p - p_T,  e_v = v - v_T
///   F   = -Kp e_p - Kv e_v + m g Z_W + m a_T
///
/// u1 projects F onto the *current* body Z axis. Throws DegenerateForce when
/// F vanishes (free-fall command, thrust direction undefined).
inline ForceCommand desired_force(const VehicleState& state,
                                  const FlatTarget& target,
                                  const GainSet& gains,
                                  const VehicleParams& params,
                                  double gravity = 9.81) {
  const Vec3 e_p = state.position - target.position;
  const Vec3 e_v = state.velocity - target.velocity;
  ForceCommand cmd;
  cmd.force = -gains.kp.cwiseProduct(e_p) - gains.kv.cwiseProduct(e_v) +
              params.mass * gravity * Vec3::UnitZ() +
              params.mass * target.acceleration;
  const double norm = cmd.force.norm();
  if (norm < 1e-9) {
    throw DegenerateForce("desired_force: |F| < 1e-9");
  }
  cmd.thrust = cmd.force.dot(state.rotation.col(2));
  cmd.thrust_axis = cmd.force / norm;
  return cmd;
}

/// Builds the desired attitude from the desired thrust axis and the observed
/// yaw sample psi_s:
///
///   X_C = (cos psi_s, sin psi_s, 0)
///   Y_B = (Z_B x X_C) / |Z_B x X_C|,   X_B = Y_B x Z_B
///
/// Throws AttitudeSingular when the thrust axis is within 1e-6 of parallel
/// to X_C (tilt approaching 90 deg toward the heading direction).
inline Mat3 desired_attitude(const Vec3& thrust_axis_des, double yaw_sample) {
  const Vec3 x_c = yaw_frame_x(yaw_sample);
  const Vec3 cross = thrust_axis_des.cross(x_c);
  const double cross_norm = cross.norm();
  if (cross_norm <= 1e-6) {
    throw AttitudeSingular("desired_attitude: thrust axis parallel to X_C");
  }
  const Vec3 y_b = cross / cross_norm;
  const Vec3 x_b = y_b.cross(thrust_axis_des);
  Mat3 r;
  r.col(0) = x_b;
  r.col(1) = y_b;
  r.col(2) = thrust_axis_des;
  return r;
}

/// Differential-flatness body-rate feedforward. With Z, X, Y the columns of
/// `frame` and j the reference jerk:
///
///   h_w = (m / u1) (j - (Z . j) Z)
///   p   = -h_w . Y,   q = h_w . X,   r = psi_dot_s (Z_W . Z)
///
/// Throws ThrustTooLow when u1 is too small to divide by.
inline Vec3 flatness_rates(const FlatTarget& target, double thrust,
                           const Mat3& frame, const VehicleParams& params) {
  if (thrust <= kMinThrust) {
    throw ThrustTooLow("flatness_rates: u1 below minimum");
  }
  const Vec3 x = frame.col(0), y = frame.col(1), z = frame.col(2);
  const Vec3 h_w =
      (params.mass / thrust) * (target.jerk - z.dot(target.jerk) * z);
  return Vec3(-h_w.dot(y), h_w.dot(x),
              target.yaw_rate_sample * z.z());
}

/// Geometric attitude error e_R = 1/2 vee(R_des^T R - R^T R_des) and rate
/// error e_omega = omega - omega_des.
inline std::pair<Vec3, Vec3> attitude_errors(const Mat3& rotation,
                                             const Mat3& rotation_des,
                                             const Vec3& omega,
                                             const Vec3& omega_des) {
  const Mat3 skew = rotation_des.transpose() * rotation -
                    rotation.transpose() * rotation_des;
  return {0.5 * vee_symmetrized(skew), omega - omega_des};
}

/// Proportional attitude law (u2, u3, M_Z) = -K_R e_R - K_omega e_omega.
/// The Z component is the yaw torque the vehicle cannot produce; callers log
/// it and drop it before allocation.
inline Vec3 control_torques(const Vec3& e_rotation, const Vec3& e_omega,
                            const GainSet& gains) {
  return -gains.kr.cwiseProduct(e_rotation) -
         gains.komega.cwiseProduct(e_omega);
}

/// One full controller evaluation: force loop, attitude construction,
/// flatness feedforward, attitude errors, torque law. Pure function of its
/// inputs; propagates DegenerateForce / AttitudeSingular / ThrustTooLow.
inline ControlWrench se3_step(const VehicleState& state,
                              const FlatTarget& target, const GainSet& gains,
                              const VehicleParams& params,
                              double gravity = 9.81,
                              const Se3Options& options = {}) {
  const ForceCommand fc =
      desired_force(state, target, gains, params, gravity);
  const Mat3 r_des = desired_attitude(fc.thrust_axis, target.yaw_sample);

  Vec3 omega_des = Vec3::Zero();
  if (options.rate_feedforward) {
    // The feedforward frame is the desired one, so the thrust used here is
    // the magnitude |F| rather than the projection onto the current Z_B.
    omega_des = flatness_rates(target, fc.force.norm(), r_des, params);
  }
  if (!options.use_observed_yaw_rate) omega_des.z() = 0.0;

  const auto [e_r, e_w] =
      attitude_errors(state.rotation, r_des, state.body_rates, omega_des);
  const Vec3 torque = control_torques(e_r, e_w, gains);

  ControlWrench w;
  w.thrust = fc.thrust;
  w.torque_x = torque.x();
  w.torque_y = torque.y();
  w.torque_z_residual = torque.z();
  return w;
}

/// Stateful wrapper that survives the attitude singularity by holding the
/// last valid desired attitude for the current control period.
class Se3Controller {
 public:
  Se3Controller() = default;
  Se3Controller(const GainSet& gains, const Se3Options& options)
      : gains_(gains), options_(options) {}

  ControlWrench step(const VehicleState& state, const FlatTarget& target,
                     const VehicleParams& params, double gravity) {
    const ForceCommand fc =
        desired_force(state, target, gains_, params, gravity);
    Mat3 r_des;
    try {
      r_des = desired_attitude(fc.thrust_axis, target.yaw_sample);
      last_attitude_des_ = r_des;
    } catch (const AttitudeSingular&) {
      if (!last_attitude_des_) throw;
      ++singularity_holds_;
      r_des = *last_attitude_des_;
    }
    Vec3 omega_des = Vec3::Zero();
    if (options_.rate_feedforward) {
      omega_des = flatness_rates(target, fc.force.norm(), r_des, params);
    }
    if (!options_.use_observed_yaw_rate) omega_des.z() = 0.0;
    const auto [e_r, e_w] =
        attitude_errors(state.rotation, r_des, state.body_rates, omega_des);
    const Vec3 torque = control_torques(e_r, e_w, gains_);
    ControlWrench w;
    w.thrust = fc.thrust;
    w.torque_x = torque.x();
    w.torque_y = torque.y();
    w.torque_z_residual = torque.z();
    return w;
  }

  void reset() {
    last_attitude_des_.reset();
    singularity_holds_ = 0;
  }

  long singularity_holds() const { return singularity_holds_; }
  const GainSet& gains() const { return gains_; }

 private:
  GainSet gains_;
  Se3Options options_;
  std::optional<Mat3> last_attitude_des_;
  long singularity_holds_ = 0;
};

}  // namespace flapsim
