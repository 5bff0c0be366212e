#pragma once

#include <cmath>
#include <cstdint>

#include "flapsim/actuation.hpp"
#include "flapsim/errors.hpp"
#include "flapsim/geometry.hpp"

namespace flapsim {

/// Unmodeled yaw torque from assembly imbalance: a constant plus a random
/// walk with intensity walk_std_nm (N*m per sqrt(s)), integrated by the
/// simulation loop and applied about Z_B.
struct YawDisturbance {
  double constant_nm = 0.0;
  double walk_std_nm = 0.0;
};

/// Per-sensor noise levels. All default to zero so the observation model
/// degenerates to ground truth unless a scenario enables noise.
struct NoiseConfig {
  double position_std_m = 0.0;       // external tracking stand-in
  double velocity_std_m_s = 0.0;
  double roll_pitch_std_rad = 0.0;
  double yaw_std_rad = 0.0;
  double yaw_bias_rate_rad_s = 0.0;  // constant heading drift rate
  double yaw_walk_std_rad = 0.0;     // rad per sqrt(s) random walk
  double omega_std_rad_s = 0.0;
  double flow_std_m_s = 0.0;
  double baro_std_m = 0.0;
  double flow_max_altitude_m = 3.0;  // optical flow validity ceiling
};

struct SimConfig {
  double dt_physics = 1e-3;       // s
  double control_rate_hz = 100.0;
  double sensor_rate_hz = 200.0;
  double gravity = 9.81;          // m/s^2
  double ground_friction = 25.0;  // 1/s planar velocity decay in contact
  double linear_drag = 0.0;       // N per (m/s), default off
  YawDisturbance yaw_disturbance;
  NoiseConfig noise;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(dt_physics > 0.0)) throw ConfigError("sim.dt_physics must be > 0");
    if (!(control_rate_hz > 0.0)) {
      throw ConfigError("sim.control_rate_hz must be > 0");
    }
    if (!(control_rate_hz <= sensor_rate_hz &&
          sensor_rate_hz <= 1.0 / dt_physics + 1e-9)) {
      throw ConfigError(
          "sim rates must satisfy control_rate <= sensor_rate <= 1/dt_physics");
    }
    if (!(gravity > 0.0)) throw ConfigError("sim.gravity must be > 0");
    if (ground_friction < 0.0) {
      throw ConfigError("sim.ground_friction must be >= 0");
    }
    if (linear_drag < 0.0) throw ConfigError("sim.linear_drag must be >= 0");
  }
};

namespace detail {

struct StateDerivative {
  Vec3 dp, dv;
  Mat3 dr;
  Vec3 domega;
};

inline StateDerivative state_derivative(const VehicleState& s,
                                        const ControlWrench& u,
                                        const VehicleParams& params,
                                        const SimConfig& cfg) {
  StateDerivative d;
  d.dp = s.velocity;
  d.dv = Vec3(0.0, 0.0, -cfg.gravity) +
         (u.thrust / params.mass) * s.rotation.col(2) -
         (cfg.linear_drag / params.mass) * s.velocity;
  d.dr = s.rotation * hat(s.body_rates);
  const Vec3 torque(u.torque_x, u.torque_y, u.torque_z_residual);
  const Vec3 momentum = params.inertia * s.body_rates;
  d.domega = params.inertia.ldlt().solve(torque - s.body_rates.cross(momentum));
  return d;
}

}  // namespace detail

/// One fixed step of the rigid-body dynamics
///
///   m p''     = -m g Z_W + u1 Z_B
///   I omega'  = (u2, u3, M_Z) - omega x (I omega)
///
/// integrated with the classical 4th-order scheme; the rotation is
/// re-orthonormalized after each step. `u.torque_z_residual` is the yaw
/// torque physically applied (disturbance), not the controller's discarded
/// command. Throws NonFiniteState on blow-up.
inline VehicleState step_dynamics(const VehicleState& state,
                                  const ControlWrench& u,
                                  const VehicleParams& params,
                                  const SimConfig& cfg, double dt) {
  using detail::state_derivative;
  auto advance = [&](const VehicleState& s, const detail::StateDerivative& d,
                     double h) {
    VehicleState n = s;
    n.position = s.position + h * d.dp;
    n.velocity = s.velocity + h * d.dv;
    n.rotation = s.rotation + h * d.dr;
    n.body_rates = s.body_rates + h * d.domega;
    return n;
  };

  const auto k1 = state_derivative(state, u, params, cfg);
  const auto k2 = state_derivative(advance(state, k1, dt / 2), u, params, cfg);
  const auto k3 = state_derivative(advance(state, k2, dt / 2), u, params, cfg);
  const auto k4 = state_derivative(advance(state, k3, dt), u, params, cfg);

  VehicleState next = state;
  next.position =
      state.position + dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  next.velocity =
      state.velocity + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  next.rotation = orthonormalize(
      state.rotation + dt / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr));
  next.body_rates =
      state.body_rates +
      dt / 6.0 * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);

  if (!next.position.allFinite() || !next.velocity.allFinite() ||
      !next.rotation.allFinite() || !next.body_rates.allFinite()) {
    throw NonFiniteState("step_dynamics: state diverged");
  }
  return next;
}

/// Kinematic ground plane at z = 0: a descending vehicle is clamped, its
/// vertical velocity zeroed and planar velocity damped. A net upward thrust
/// raises z on the following step, which clears the flag again.
inline VehicleState ground_contact(VehicleState state, const SimConfig& cfg,
                                   double dt) {
  if (state.position.z() <= 0.0 && state.velocity.z() <= 0.0) {
    state.position.z() = 0.0;
    state.velocity.z() = 0.0;
    const double decay = std::max(0.0, 1.0 - cfg.ground_friction * dt);
    state.velocity.x() *= decay;
    state.velocity.y() *= decay;
    state.grounded = true;
  } else if (state.position.z() > 1e-9) {
    state.grounded = false;
  }
  return state;
}

}  // namespace flapsim
