#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "flapsim/actuation.hpp"
#include "flapsim/errors.hpp"
#include "flapsim/geometry.hpp"
#include "flapsim/trajectory.hpp"

namespace flapsim {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double out_limit = std::numeric_limits<double>::infinity();
  double int_limit = std::numeric_limits<double>::infinity();

  void validate() const {
    if (ki < 0.0) throw ConfigError("pid gains: ki must be >= 0");
    if (!(out_limit > 0.0)) throw ConfigError("pid gains: out_limit must be > 0");
    if (!(int_limit > 0.0)) throw ConfigError("pid gains: int_limit must be > 0");
  }
};

/// Scalar PID with clamped integrator and derivative on measurement, so a
/// setpoint step does not kick the D term.
class Pid {
 public:
  double step(double error, double measurement, double dt,
              const PidGains& g) {
    integrator_ = std::clamp(integrator_ + error * dt, -g.int_limit,
                             g.int_limit);
    double derivative = 0.0;
    if (initialized_ && dt > 0.0) {
      derivative = (measurement - prev_measurement_) / dt;
    }
    prev_measurement_ = measurement;
    initialized_ = true;
    const double out = g.kp * error + g.ki * integrator_ - g.kd * derivative;
    return std::clamp(out, -g.out_limit, g.out_limit);
  }

  void reset() {
    integrator_ = 0.0;
    prev_measurement_ = 0.0;
    initialized_ = false;
  }

  double integrator() const { return integrator_; }

 private:
  double integrator_ = 0.0;
  double prev_measurement_ = 0.0;
  bool initialized_ = false;
};

/// Gains for the benchmark cascade: position -> velocity -> (tilt, thrust)
/// outer loops and angle -> rate inner loops, shared across axes.
struct PidStackGains {
  PidGains position{1.5, 0.0, 0.0, 1.0, 1.0};    // m -> m/s
  PidGains velocity{3.0, 0.4, 0.0, 3.0, 1.25};   // m/s -> m/s^2
  PidGains angle{12.0, 0.0, 0.0, 3.0, 1.0};      // rad -> rad/s
  PidGains rate{1.5e-3, 0.0, 0.0, 0.02, 1.0};    // rad/s -> N*m
  double tilt_limit = 0.45;                      // rad
  int position_divider = 2;  // position cascade runs every Nth attitude tick

  void validate() const {
    position.validate();
    velocity.validate();
    angle.validate();
    rate.validate();
    if (!(tilt_limit > 0.0)) throw ConfigError("pid.tilt_limit must be > 0");
    if (position_divider < 1) {
      throw ConfigError("pid.position_divider must be >= 1");
    }
  }
};

/// Roll/pitch/thrust setpoints produced by the position cascade.
struct AttitudeSetpoint {
  double roll = 0.0;    // rad
  double pitch = 0.0;   // rad
  double thrust = 0.0;  // N
};

/// Cascaded PID flight controller: position and velocity PIDs in the world
/// frame, the planar velocity command rotated into the yaw frame C before
/// mapping to tilt, and an angle/rate cascade producing torques. Yaw is
/// neither measured against a setpoint nor actuated.
class PidFlightController {
 public:
  PidFlightController() = default;
  explicit PidFlightController(const PidStackGains& gains) : gains_(gains) {}

  /// Outer loops. The planar acceleration command is rotated from the world
  /// frame into the yaw frame by -psi_s; in frame C a forward (+X)
  /// acceleration maps to +pitch and a +Y acceleration to -roll.
  AttitudeSetpoint position_step(const VehicleState& estimate,
                                 const FlatTarget& target, double yaw_sample,
                                 const VehicleParams& params, double gravity,
                                 double dt) {
    Vec3 vel_sp;
    for (int i = 0; i < 3; ++i) {
      vel_sp(i) =
          position_[i].step(target.position(i) - estimate.position(i),
                            estimate.position(i), dt, gains_.position) +
          target.velocity(i);
    }
    Vec3 acc_cmd;
    for (int i = 0; i < 3; ++i) {
      acc_cmd(i) = velocity_[i].step(vel_sp(i) - estimate.velocity(i),
                                     estimate.velocity(i), dt,
                                     gains_.velocity);
    }
    const double c = std::cos(yaw_sample), s = std::sin(yaw_sample);
    const double acc_fwd = c * acc_cmd.x() + s * acc_cmd.y();
    const double acc_left = -s * acc_cmd.x() + c * acc_cmd.y();

    AttitudeSetpoint sp;
    sp.pitch = std::clamp(acc_fwd / gravity, -gains_.tilt_limit,
                          gains_.tilt_limit);
    sp.roll = std::clamp(-acc_left / gravity, -gains_.tilt_limit,
                         gains_.tilt_limit);
    sp.thrust = params.mass * (gravity + acc_cmd.z());
    return sp;
  }

  /// Inner loops: angle PIDs emit rate setpoints, rate PIDs emit torques,
  /// thrust passes through. No yaw torque is produced.
  ControlWrench attitude_step(const VehicleState& estimate,
                              const EulerZxy& attitude,
                              const AttitudeSetpoint& setpoint, double dt) {
    const double rate_sp_roll = angle_[0].step(setpoint.roll - attitude.roll,
                                               attitude.roll, dt,
                                               gains_.angle);
    const double rate_sp_pitch = angle_[1].step(
        setpoint.pitch - attitude.pitch, attitude.pitch, dt, gains_.angle);

    ControlWrench w;
    w.thrust = std::max(0.0, setpoint.thrust);
    w.torque_x = rate_[0].step(rate_sp_roll - estimate.body_rates.x(),
                               estimate.body_rates.x(), dt, gains_.rate);
    w.torque_y = rate_[1].step(rate_sp_pitch - estimate.body_rates.y(),
                               estimate.body_rates.y(), dt, gains_.rate);
    w.torque_z_residual = 0.0;
    return w;
  }

  /// Full cascade at the attitude rate; the position cascade runs every
  /// `position_divider` calls and its setpoints are held in between.
  ControlWrench step(const VehicleState& estimate, const EulerZxy& attitude,
                     const FlatTarget& target, const VehicleParams& params,
                     double gravity, double dt) {
    if (tick_ % gains_.position_divider == 0) {
      held_setpoint_ =
          position_step(estimate, target, attitude.yaw, params, gravity,
                        dt * gains_.position_divider);
    }
    ++tick_;
    return attitude_step(estimate, attitude, held_setpoint_, dt);
  }

  void reset() {
    for (auto& p : position_) p.reset();
    for (auto& p : velocity_) p.reset();
    for (auto& p : angle_) p.reset();
    for (auto& p : rate_) p.reset();
    tick_ = 0;
    held_setpoint_ = {};
  }

  const PidStackGains& gains() const { return gains_; }

 private:
  PidStackGains gains_;
  Pid position_[3], velocity_[3];
  Pid angle_[2], rate_[2];
  AttitudeSetpoint held_setpoint_;
  long tick_ = 0;
};

}  // namespace flapsim
