#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "flapsim/actuation.hpp"
#include "flapsim/errors.hpp"
#include "flapsim/geometry.hpp"
#include "flapsim/trajectory.hpp"

namespace flapsim {

enum class Mode {
  kCrawl,
  kTakeoff,
  kFlight,
  kLanding,
  kSelfRight,
  kGrounded,
  kDepleted,
};

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::kCrawl: return "Crawl";
    case Mode::kTakeoff: return "Takeoff";
    case Mode::kFlight: return "Flight";
    case Mode::kLanding: return "Landing";
    case Mode::kSelfRight: return "SelfRight";
    case Mode::kGrounded: return "Grounded";
    case Mode::kDepleted: return "Depleted";
  }
  return "?";
}

inline Mode mode_from_name(const std::string& name) {
  for (Mode m : {Mode::kCrawl, Mode::kTakeoff, Mode::kFlight, Mode::kLanding,
                 Mode::kSelfRight, Mode::kGrounded, Mode::kDepleted}) {
    if (name == mode_name(m)) return m;
  }
  throw Error("unknown mode name: " + name);
}

/// Thresholds and state snapshot consumed by the mode machine.
struct TransitionContext {
  double tilt = 0.0;          // rad, angle between Z_B and vertical
  double altitude = 0.0;      // m
  double descent_rate = 0.0;  // m/s, positive while descending
  bool grounded = false;
  bool battery_empty = false;

  double takeoff_altitude_threshold = 0.2;        // m
  double landing_descent_threshold = 0.05;        // m/s
  double tipped_threshold = 60.0 * M_PI / 180.0;  // rad
  double upright_threshold = 5.0 * M_PI / 180.0;  // rad
};

inline bool is_grounded_mode(Mode m) {
  return m == Mode::kCrawl || m == Mode::kGrounded;
}

/// One step of the mode machine. Automatic edges (depletion, tipping,
/// takeoff altitude, touchdown, righted) are evaluated first; a plan request
/// is then checked against the allowed command edges:
///
///   Crawl -> Takeoff,  Flight -> Landing,  Grounded -> Crawl | Takeoff
///
/// Requests outside that set throw InvalidTransition.
inline Mode mode_transition(Mode current, const TransitionContext& ctx,
                            std::optional<Mode> plan_request = std::nullopt) {
  if (current == Mode::kDepleted) return Mode::kDepleted;
  if (ctx.battery_empty) return Mode::kDepleted;

  if (is_grounded_mode(current) && ctx.tilt > ctx.tipped_threshold) {
    return Mode::kSelfRight;
  }
  if (current == Mode::kSelfRight) {
    return ctx.tilt < ctx.upright_threshold ? Mode::kGrounded
                                            : Mode::kSelfRight;
  }
  if (current == Mode::kTakeoff &&
      ctx.altitude > ctx.takeoff_altitude_threshold) {
    current = Mode::kFlight;
  }
  if (current == Mode::kLanding && ctx.grounded &&
      ctx.descent_rate < ctx.landing_descent_threshold) {
    current = Mode::kGrounded;
  }

  if (plan_request && *plan_request != current) {
    const Mode req = *plan_request;
    const bool ok = (current == Mode::kCrawl && req == Mode::kTakeoff) ||
                    (current == Mode::kFlight && req == Mode::kLanding) ||
                    (current == Mode::kGrounded &&
                     (req == Mode::kCrawl || req == Mode::kTakeoff));
    if (!ok) {
      throw InvalidTransition(std::string("mode_transition: ") +
                              mode_name(current) + " -> " + mode_name(req));
    }
    return req;
  }
  return current;
}

inline constexpr double kSelfRightDuration = 0.5;  // s
inline constexpr double kSelfRightTimeoutS = 0.75; // s

/// Indices of the two modules nearest the ground under the given attitude
/// (the pair deployed for self-righting).
inline std::array<int, 2> select_righting_modules(const Mat3& rotation,
                                                  const VehicleParams& params) {
  const auto positions = module_positions(params);
  std::array<double, 3> height{};
  for (int i = 0; i < 3; ++i) height[i] = (rotation * positions[i]).z();
  int highest = 0;
  for (int i = 1; i < 3; ++i) {
    if (height[i] > height[highest]) highest = i;
  }
  std::array<int, 2> out{};
  int k = 0;
  for (int i = 0; i < 3; ++i) {
    if (i != highest) out[k++] = i;
  }
  return out;
}

/// Scripted self-righting: a smooth attitude slew from the tipped pose to
/// upright (yaw preserved when recoverable) completing in kSelfRightDuration.
/// Pure in (initial state, elapsed time); throws SelfRightTimeout if the
/// pose is still tipped past the timeout.
inline VehicleState self_right_step(const VehicleState& initial,
                                    const VehicleParams& /*params*/,
                                    double t_elapsed) {
  const Mat3& r0 = initial.rotation;

  double yaw = 0.0;
  const double xb_planar = std::hypot(r0(0, 0), r0(1, 0));
  if (xb_planar > 1e-6) yaw = std::atan2(r0(1, 0), r0(0, 0));
  const Mat3 target = rot_z(yaw);

  const double tau = std::clamp(t_elapsed / kSelfRightDuration, 0.0, 1.0);
  const double s = tau * tau * (3.0 - 2.0 * tau);  // smoothstep

  const Eigen::AngleAxisd relative(r0.transpose() * target);
  const Mat3 rotation =
      r0 * Eigen::AngleAxisd(s * relative.angle(), relative.axis())
               .toRotationMatrix();

  VehicleState out = initial;
  out.rotation = orthonormalize(rotation);
  out.velocity = Vec3::Zero();
  out.body_rates = Vec3::Zero();
  out.grounded = true;
  out.position.z() = 0.0;

  if (t_elapsed > kSelfRightTimeoutS &&
      tilt_angle(out.rotation) > 5.0 * M_PI / 180.0) {
    throw SelfRightTimeout("self_right_step: still tipped past timeout");
  }
  return out;
}

/// One phase of a mission plan. Each phase carries a completion condition
/// implied by its kind plus a timeout.
struct Phase {
  enum class Kind { kCrawlTo, kCrawlTrack, kTakeoff, kFlyTrajectory, kLand,
                    kWait };

  Kind kind = Kind::kWait;
  double timeout = 300.0;  // s

  // kCrawlTo: drive to a planar point.
  Vec2 crawl_target = Vec2::Zero();
  double capture_radius = 0.05;  // m

  // kCrawlTrack: follow the figure-eight reference for one duration.
  double track_amplitude = 0.3;  // m
  double track_period = 90.0;    // s
  double track_duration = 94.5;  // s

  // kTakeoff: climb to altitude over climb_duration.
  double takeoff_altitude = 1.0;  // m
  double climb_duration = 3.0;    // s

  // kFlyTrajectory
  TrajectorySpec trajectory;
  bool relative_to_entry = false;  // anchor the trajectory at the entry pose

  // kLand
  double descent_rate = 0.15;  // m/s

  // kWait
  double wait_duration = 1.0;  // s

  static Phase crawl_to(const Vec2& target, double radius, double timeout) {
    Phase p;
    p.kind = Kind::kCrawlTo;
    p.crawl_target = target;
    p.capture_radius = radius;
    p.timeout = timeout;
    return p;
  }
  static Phase crawl_track(double amplitude, double period, double duration) {
    Phase p;
    p.kind = Kind::kCrawlTrack;
    p.track_amplitude = amplitude;
    p.track_period = period;
    p.track_duration = duration;
    p.timeout = duration + 10.0;
    return p;
  }
  static Phase takeoff(double altitude, double timeout = 20.0) {
    Phase p;
    p.kind = Kind::kTakeoff;
    p.takeoff_altitude = altitude;
    p.timeout = timeout;
    return p;
  }
  static Phase fly(TrajectorySpec trajectory) {
    Phase p;
    p.kind = Kind::kFlyTrajectory;
    p.trajectory = std::move(trajectory);
    p.timeout = p.trajectory.duration + 30.0;
    return p;
  }
  /// Hover in place (relative to wherever the previous phase ended).
  static Phase hover(double duration) {
    Phase p = fly(TrajectorySpec::hover(Vec3::Zero(), duration));
    p.relative_to_entry = true;
    return p;
  }
  static Phase land(double timeout = 30.0) {
    Phase p;
    p.kind = Kind::kLand;
    p.timeout = timeout;
    return p;
  }
  static Phase wait(double duration) {
    Phase p;
    p.kind = Kind::kWait;
    p.wait_duration = duration;
    p.timeout = duration + 5.0;
    return p;
  }
};

struct MissionPlan {
  std::vector<Phase> phases;

  void validate() const {
    if (phases.empty()) throw ConfigError("mission plan must not be empty");
    for (const Phase& p : phases) {
      if (!(p.timeout > 0.0)) throw ConfigError("phase timeout must be > 0");
      if (p.kind == Phase::Kind::kFlyTrajectory) p.trajectory.validate();
    }
  }
};

}  // namespace flapsim
