#pragma once

#include <cmath>
#include <utility>

#include "flapsim/actuation.hpp"
#include "flapsim/errors.hpp"
#include "flapsim/geometry.hpp"
#include "flapsim/pid_control.hpp"

namespace flapsim {

/// Calibrated unicycle map for vibration-driven crawling. Forward speed is
/// proportional to the mean of the left/right module frequencies (capped at
/// max_speed); yaw rate is proportional to their difference, with a larger
/// right-module output turning counterclockwise. Backward motion is not
/// reachable: frequencies are non-negative, so the commanded speed never is.
struct CrawlParams {
  double speed_per_hz = 0.011982;   // c_v, m/s per Hz of mean frequency
  double yaw_rate_per_hz = 0.08;    // c_omega, rad/s per Hz of differential
  double max_frequency = 4.5067;    // Hz, half-hover-throttle cap
  double max_speed = 0.054;         // m/s
  // The distance output is capped at the frequency limit so that a railed
  // common mode still leaves the differential term steering authority.
  PidGains distance_gains{60.0, 8.0, 0.0, 4.5067, 1.5};  // m -> Hz common mode
  PidGains yaw_gains{60.0, 0.0, 0.0, 50.0, 1.0};         // rad -> Hz differential

  void validate() const {
    if (!(speed_per_hz > 0.0)) throw ConfigError("crawl.speed_per_hz must be > 0");
    if (!(yaw_rate_per_hz > 0.0)) {
      throw ConfigError("crawl.yaw_rate_per_hz must be > 0");
    }
    if (!(max_frequency > 0.0)) throw ConfigError("crawl.max_frequency must be > 0");
    if (!(max_speed > 0.0)) throw ConfigError("crawl.max_speed must be > 0");
    distance_gains.validate();
    yaw_gains.validate();
  }
};

/// Defaults derived from the vehicle: the frequency cap is the fit value at
/// half the hover throttle, and c_v is calibrated so both modules at the cap
/// reach max_speed.
inline CrawlParams default_crawl_params(const VehicleParams& vehicle,
                                        double gravity = 9.81) {
  CrawlParams c;
  c.max_frequency = crawl_frequency_cap(vehicle, gravity);
  c.speed_per_hz = c.max_speed / c.max_frequency;
  c.distance_gains.out_limit = c.max_frequency;
  return c;
}

/// Planar pose while crawling.
struct CrawlState {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  bool grounded = true;
};

/// Unicycle update over dt for left/right module frequencies.
inline CrawlState crawl_kinematics(double freq_left, double freq_right,
                                   const CrawlParams& params,
                                   const CrawlState& state, double dt) {
  const double fl = std::clamp(freq_left, 0.0, params.max_frequency);
  const double fr = std::clamp(freq_right, 0.0, params.max_frequency);
  const double speed =
      std::min(params.speed_per_hz * 0.5 * (fl + fr), params.max_speed);
  const double yaw_rate = params.yaw_rate_per_hz * (fr - fl);
  CrawlState next = state;
  next.x += speed * std::cos(state.yaw) * dt;
  next.y += speed * std::sin(state.yaw) * dt;
  next.yaw = wrap_angle(state.yaw + yaw_rate * dt);
  next.grounded = true;
  return next;
}

/// Four-quadrant bearing from the current position to the target. Throws
/// CoincidentTarget when the two are closer than 1e-9 m.
inline double target_yaw(const Vec2& position, const Vec2& target) {
  const Vec2 d = target - position;
  if (d.norm() < 1e-9) {
    throw CoincidentTarget("target_yaw: target coincides with position");
  }
  return std::atan2(d.y(), d.x());
}

/// Gerono lemniscate reference: x = A sin(2 pi t / T), y = (A/2) sin(4 pi t / T).
inline Vec2 figure_eight_reference(double t, double amplitude, double period) {
  if (!(period > 0.0)) throw ConfigError("figure_eight: period must be > 0");
  const double u = 2.0 * M_PI * t / period;
  return Vec2(amplitude * std::sin(u), 0.5 * amplitude * std::sin(2.0 * u));
}

/// Dual-layer crawl controller: a distance PID produces the common-mode
/// frequency o_d, a yaw PID on the wrapped heading error produces the
/// differential o_psi, mixed as
///
///   f_right = o_d + o_psi,   f_left = o_d - o_psi
///
/// (the right module gets the + term so a positive heading error steers
/// counterclockwise), then clamped to [0, max_frequency]. When the target
/// coincides with the position the previous heading is held.
class CrawlController {
 public:
  std::pair<double, double> step(const CrawlState& state, const Vec2& target,
                                 const CrawlParams& params, double dt) {
    const Vec2 pos(state.x, state.y);
    const double distance = (target - pos).norm();
    double bearing = held_bearing_;
    try {
      bearing = target_yaw(pos, target);
      held_bearing_ = bearing;
    } catch (const CoincidentTarget&) {
      // keep previous heading
    }
    const double common =
        distance_.step(distance, distance, dt, params.distance_gains);
    const double differential = yaw_.step(wrap_angle(bearing - state.yaw),
                                          state.yaw, dt, params.yaw_gains);
    const double f_right =
        std::clamp(common + differential, 0.0, params.max_frequency);
    const double f_left =
        std::clamp(common - differential, 0.0, params.max_frequency);
    return {f_left, f_right};
  }

  void reset() {
    distance_.reset();
    yaw_.reset();
    held_bearing_ = 0.0;
  }

 private:
  Pid distance_, yaw_;
  double held_bearing_ = 0.0;
};

}  // namespace flapsim
