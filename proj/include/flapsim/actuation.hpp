#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <sstream>

#include "flapsim/errors.hpp"
#include "flapsim/geometry.hpp"

namespace flapsim {

/// Measured throttle-to-frequency fit for one flapping module,
/// f = kThrottleFitA * thr^2 + kThrottleFitB * thr + kThrottleFitC (Hz).
/// The parabola opens downward; its vertex caps the achievable frequency.
inline constexpr double kThrottleFitA = -41.56;
inline constexpr double kThrottleFitB = 80.69;
inline constexpr double kThrottleFitC = -14.64;

/// Throttle below which the fit predicts zero frequency (lower root).
inline double throttle_deadband() {
  const double disc = kThrottleFitB * kThrottleFitB -
                      4.0 * kThrottleFitA * kThrottleFitC;
  return (-kThrottleFitB + std::sqrt(disc)) / (2.0 * kThrottleFitA);
}

/// Throttle at the fit's vertex; frequencies are clamped there so the
/// commanded map stays monotone.
inline double throttle_vertex() {
  return -kThrottleFitB / (2.0 * kThrottleFitA);
}

/// Maximum frequency reachable through the throttle fit (vertex value).
inline double frequency_envelope_max() {
  const double t = throttle_vertex();
  return (kThrottleFitA * t + kThrottleFitB) * t + kThrottleFitC;
}

/// Monotone throttle-to-frequency map: quadratic fit, floored at zero below
/// the deadband and held at the vertex value above it.
inline double throttle_to_frequency(double throttle) {
  const double t = std::min(throttle, throttle_vertex());
  const double f = (kThrottleFitA * t + kThrottleFitB) * t + kThrottleFitC;
  return std::max(0.0, f);
}

/// Inverse of throttle_to_frequency on the monotone branch
/// [deadband, vertex]. Throws OutOfEnvelope above the vertex frequency.
inline double frequency_to_throttle(double frequency) {
  if (frequency < 0.0) {
    throw OutOfEnvelope("frequency_to_throttle: negative frequency");
  }
  const double f_max = frequency_envelope_max();
  if (frequency > f_max + 1e-12) {
    std::ostringstream msg;
    msg << "frequency_to_throttle: " << frequency
        << " Hz exceeds fit maximum " << f_max << " Hz";
    throw OutOfEnvelope(msg.str());
  }
  const double disc =
      std::max(0.0, kThrottleFitB * kThrottleFitB -
                        4.0 * kThrottleFitA * (kThrottleFitC - frequency));
  return (-kThrottleFitB + std::sqrt(disc)) / (2.0 * kThrottleFitA);
}

/// Physical parameters of the triple-flapping-wing vehicle.
///
/// The allocation geometry follows the input matrix convention: the back
/// module sits on +X_B at radius `arm_length`; the left and right modules
/// sit at angle `arm_angle` from +X_B on the -Y_B and +Y_B sides. Per-module
/// cycle-averaged lift is `thrust_coeff` newtons per hertz of flapping.
struct VehicleParams {
  double mass = 0.0374;                    // kg
  Mat3 inertia = (Eigen::Vector3d(2.6e-5, 2.6e-5, 4.3e-5)).asDiagonal();
  double arm_length = 0.06;                // m
  double arm_angle = M_PI / 3.0;           // rad
  double thrust_coeff = 0.0070741;         // N per Hz
  double max_frequency = 25.1;             // Hz, hard clamp for commands
  double throttle_lo = 0.2026;             // usable throttle interval
  double throttle_hi = 0.9708;
  double battery_capacity_mah = 380.0;
  double avionics_draw_ma = 80.0;          // baseline draw, modules idle
  double draw_c0_ma = 0.0;                 // per active module: c0 + c1 * f
  double draw_c1_ma_per_hz = 0.0;
  double yaw_imbalance_coeff = 0.0;        // residual N*m of yaw torque per N of thrust

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

/// Flap-frequency command for (back, left, right) modules plus per-module
/// clamp indicators.
struct ActuatorCommand {
  std::array<double, 3> frequency{0.0, 0.0, 0.0};  // Hz
  std::array<bool, 3> saturated{false, false, false};
};

/// Controller output: collective thrust plus roll/pitch torques. The yaw
/// entry is whatever torque the source computed about Z_B; the allocation
/// cannot realize it, so it is carried for diagnostics only.
struct ControlWrench {
  double thrust = 0.0;           // u1, N
  double torque_x = 0.0;         // u2, N*m
  double torque_y = 0.0;         // u3, N*m
  double torque_z_residual = 0.0;  // M_Z, N*m (not allocated)
};

/// Analytic determinant of the allocation matrix: -2 kF^3 L^2 sin(a)(cos(a)+1).
inline double allocation_determinant(const VehicleParams& p) {
  const double kf = p.thrust_coeff, l = p.arm_length, a = p.arm_angle;
  return -2.0 * kf * kf * kf * l * l * std::sin(a) * (std::cos(a) + 1.0);
}

/// Input matrix B mapping (f1, f2, f3) to (u1, u2, u3):
///
///   u1 = kF (f1 + f2 + f3)
///   u2 = kF L sin(a) (f3 - f2)
///   u3 = kF L (-f1 + cos(a) (f2 + f3))
///
/// Throws SingularAllocation when the determinant is below 1e-12.
inline Mat3 allocation_matrix(const VehicleParams& p) {
  if (std::abs(allocation_determinant(p)) < 1e-12) {
    throw SingularAllocation("allocation_matrix: arm angle near 0 or pi");
  }
  const double kf = p.thrust_coeff;
  const double kfl = kf * p.arm_length;
  const double sa = std::sin(p.arm_angle), ca = std::cos(p.arm_angle);
  Mat3 b;
  b << kf, kf, kf,
       0.0, -sa * kfl, sa * kfl,
       -kfl, ca * kfl, ca * kfl;
  return b;
}

/// Module positions in the body frame, consistent with the torque signs of
/// the allocation matrix: back (+L, 0), left (-L cos a, -L sin a),
/// right (-L cos a, +L sin a).
inline std::array<Vec3, 3> module_positions(const VehicleParams& p) {
  const double l = p.arm_length;
  const double ca = std::cos(p.arm_angle), sa = std::sin(p.arm_angle);
  return {Vec3(l, 0.0, 0.0), Vec3(-l * ca, -l * sa, 0.0),
          Vec3(-l * ca, l * sa, 0.0)};
}

/// Forward mixing u = B f. The nominal model produces no yaw torque; an
/// assembly imbalance can be modeled as a residual proportional to thrust.
inline ControlWrench forward_mix(const ActuatorCommand& cmd,
                                 const VehicleParams& p) {
  const Mat3 b = allocation_matrix(p);
  const Vec3 f(cmd.frequency[0], cmd.frequency[1], cmd.frequency[2]);
  const Vec3 u = b * f;
  ControlWrench w;
  w.thrust = u.x();
  w.torque_x = u.y();
  w.torque_y = u.z();
  w.torque_z_residual = p.yaw_imbalance_coeff * u.x();
  return w;
}

/// Inverts the allocation, then clamps each frequency to [0, max_frequency]
/// and flags the clamped modules. Without clamping the round trip through
/// forward_mix reproduces the wrench to machine precision.
inline ActuatorCommand inverse_mix(const ControlWrench& w,
                                   const VehicleParams& p) {
  const Mat3 b = allocation_matrix(p);
  const Vec3 u(w.thrust, w.torque_x, w.torque_y);
  const Vec3 f = b.partialPivLu().solve(u);
  ActuatorCommand cmd;
  for (int i = 0; i < 3; ++i) {
    const double clamped = std::clamp(f(i), 0.0, p.max_frequency);
    cmd.saturated[i] = std::abs(clamped - f(i)) > 1e-12;
    cmd.frequency[i] = clamped;
  }
  return cmd;
}

/// Frequency at which three equal modules balance gravity: m g / (3 kF).
inline double hover_frequency(const VehicleParams& p, double gravity = 9.81) {
  return p.mass * gravity / (3.0 * p.thrust_coeff);
}

/// Throttle the hover frequency maps back to through the fit.
inline double hover_throttle(const VehicleParams& p, double gravity = 9.81) {
  return frequency_to_throttle(hover_frequency(p, gravity));
}

/// Crawl frequency cap: ground mode runs the two lateral modules at no more
/// than half the hover throttle.
inline double crawl_frequency_cap(const VehicleParams& p,
                                  double gravity = 9.81) {
  return throttle_to_frequency(0.5 * hover_throttle(p, gravity));
}

/// Calibrates the per-module draw model i(f) = c0 + c1 f (mA) against two
/// endurance measurements: hover (three modules at hover frequency) lasting
/// `hover_minutes` and crawl (two modules at the crawl cap) lasting
/// `crawl_minutes`, both on the full battery with the avionics baseline
/// always on. Writes draw_c0_ma / draw_c1_ma_per_hz in place.
inline void calibrate_draw_model(VehicleParams& p, double hover_minutes = 6.5,
                                 double crawl_minutes = 28.0,
                                 double gravity = 9.81) {
  const double f_hover = hover_frequency(p, gravity);
  const double f_crawl = crawl_frequency_cap(p, gravity);
  const double total_hover = p.battery_capacity_mah / (hover_minutes / 60.0);
  const double total_crawl = p.battery_capacity_mah / (crawl_minutes / 60.0);
  // 3 (c0 + c1 f_hover) = total_hover - avionics
  // 2 (c0 + c1 f_crawl) = total_crawl - avionics
  const double rh = (total_hover - p.avionics_draw_ma) / 3.0;
  const double rc = (total_crawl - p.avionics_draw_ma) / 2.0;
  p.draw_c1_ma_per_hz = (rh - rc) / (f_hover - f_crawl);
  p.draw_c0_ma = rh - p.draw_c1_ma_per_hz * f_hover;
}

/// Total instantaneous current draw (mA) for a command: avionics baseline
/// plus the affine per-module draw for every module with nonzero frequency.
inline double current_draw_ma(const ActuatorCommand& cmd,
                              const VehicleParams& p) {
  double total = p.avionics_draw_ma;
  for (double f : cmd.frequency) {
    if (f > 0.0) total += p.draw_c0_ma + p.draw_c1_ma_per_hz * f;
  }
  return total;
}

/// Decrements `charge_mah` by the modeled draw over `dt` seconds. Throws
/// BatteryEmpty exactly when the charge reaches zero; callers treat that as
/// the endurance end and keep the clamped zero charge.
inline double battery_drain(const ActuatorCommand& cmd, double dt,
                            double charge_mah, const VehicleParams& p) {
  const double next = charge_mah - current_draw_ma(cmd, p) * dt / 3600.0;
  if (next <= 0.0) {
    throw BatteryEmpty("battery_drain: charge depleted");
  }
  return next;
}

inline void VehicleParams::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (!(mass > 0.0)) fail("vehicle.mass must be > 0");
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    fail("vehicle.inertia must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    fail("vehicle.inertia must be positive definite");
  }
  if (!(arm_length > 0.0)) fail("vehicle.arm_length must be > 0");
  if (std::abs(std::sin(arm_angle)) < 1e-9) {
    fail("vehicle.arm_angle must have sin(angle) != 0");
  }
  if (!(thrust_coeff > 0.0)) fail("vehicle.thrust_coeff must be > 0");
  if (!(max_frequency > 0.0)) fail("vehicle.max_frequency must be > 0");
  if (!(throttle_lo >= 0.0 && throttle_lo < throttle_hi &&
        throttle_hi <= 1.0)) {
    fail("vehicle.throttle_range must satisfy 0 <= lo < hi <= 1");
  }
  if (!(battery_capacity_mah > 0.0)) {
    fail("vehicle.battery_capacity_mah must be > 0");
  }
  if (avionics_draw_ma < 0.0) fail("vehicle.avionics_draw_ma must be >= 0");
}

/// Default vehicle with the draw model calibrated against the reference
/// endurance figures (hover 6.5 min, crawl 28 min).
inline VehicleParams default_params() {
  VehicleParams p;
  calibrate_draw_model(p);
  return p;
}

}  // namespace flapsim
