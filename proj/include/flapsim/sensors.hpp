#pragma once

#include <cmath>
#include <random>

#include "flapsim/dynamics.hpp"
#include "flapsim/errors.hpp"
#include "flapsim/geometry.hpp"

namespace flapsim {

/// Noise-corrupted view of the true state, standing in for the onboard
/// sensor fusion: external tracking for position/velocity, an IMU attitude
/// whose yaw accumulates drift, a gyro, an optical-flow velocity valid only
/// near the ground, and a barometric altitude.
struct Observation {
  double timestamp = 0.0;
  Vec3 position_meas = Vec3::Zero();
  Vec3 velocity_meas = Vec3::Zero();
  EulerZxy euler_meas;
  Vec3 omega_meas = Vec3::Zero();
  Vec2 flow_velocity = Vec2::Zero();
  bool flow_valid = false;
  double altitude_meas = 0.0;
};

/// Seeded observation generator. With all noise levels at zero the output
/// equals ground truth; with a fixed seed the sequence is reproducible
/// bit for bit. The yaw channel integrates a constant bias rate plus a
/// random walk between samples.
class SensorModel {
 public:
  explicit SensorModel(const SimConfig& cfg)
      : cfg_(cfg), rng_(cfg.seed ^ 0x9e3779b97f4a7c15ull) {}

  Observation observe(const VehicleState& state, double t) {
    if (has_last_ && t <= last_t_) {
      throw Error("SensorModel::observe: timestamps must strictly increase");
    }
    const double dt = has_last_ ? t - last_t_ : 0.0;
    last_t_ = t;
    has_last_ = true;

    const NoiseConfig& n = cfg_.noise;
    yaw_offset_ += n.yaw_bias_rate_rad_s * dt;
    if (n.yaw_walk_std_rad > 0.0 && dt > 0.0) {
      yaw_offset_ += n.yaw_walk_std_rad * std::sqrt(dt) * gauss();
    }

    Observation obs;
    obs.timestamp = t;
    obs.position_meas =
        state.position + n.position_std_m * gauss_vec();
    obs.velocity_meas =
        state.velocity + n.velocity_std_m_s * gauss_vec();
    try {
      EulerZxy e = rotation_to_euler_zxy(state.rotation);
      e.roll += n.roll_pitch_std_rad * gauss();
      e.pitch += n.roll_pitch_std_rad * gauss();
      e.yaw = wrap_angle(e.yaw + yaw_offset_ + n.yaw_std_rad * gauss());
      last_euler_ = e;
    } catch (const GimbalLock&) {
      // Attitude extraction is singular while tipped through 90 deg of
      // roll; hold the previous sample like a briefly dropped estimate.
    }
    obs.euler_meas = last_euler_;
    obs.omega_meas = state.body_rates + n.omega_std_rad_s * gauss_vec();
    obs.flow_valid = state.position.z() < n.flow_max_altitude_m;
    obs.flow_velocity =
        Vec2(state.velocity.x(), state.velocity.y()) +
        n.flow_std_m_s * Vec2(gauss(), gauss());
    obs.altitude_meas = state.position.z() + n.baro_std_m * gauss();
    return obs;
  }

  /// Accumulated yaw measurement offset (bias + walk), for diagnostics.
  double yaw_offset() const { return yaw_offset_; }

 private:
  double gauss() { return gauss_(rng_); }
  Vec3 gauss_vec() { return Vec3(gauss(), gauss(), gauss()); }

  SimConfig cfg_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  double yaw_offset_ = 0.0;
  double last_t_ = 0.0;
  bool has_last_ = false;
  EulerZxy last_euler_;
};

}  // namespace flapsim
