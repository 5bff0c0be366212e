#pragma once

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "flapsim/errors.hpp"
#include "flapsim/geometry.hpp"

namespace flapsim {

/// Reference sample for the flight controllers: position and derivatives up
/// to jerk, plus the observed yaw sample and rate the caller fills in (yaw is
/// observed, never commanded).
struct FlatTarget {
  Vec3 position = Vec3::Zero();      // m
  Vec3 velocity = Vec3::Zero();      // m/s
  Vec3 acceleration = Vec3::Zero();  // m/s^2
  Vec3 jerk = Vec3::Zero();          // m/s^3
  double yaw_sample = 0.0;           // psi_s, rad (observed)
  double yaw_rate_sample = 0.0;      // rad/s (observed)
};

/// Analytic reference trajectory. Lines and waypoint segments use
/// minimum-jerk quintic profiles with zero velocity and acceleration at the
/// endpoints, which keeps waypoint chains C^2 at every join.
struct TrajectorySpec {
  enum class Kind { kHover, kLine, kCircle, kWaypoints };

  Kind kind = Kind::kHover;
  double duration = 1.0;  // s

  Vec3 hover_position = Vec3::Zero();

  Vec3 line_start = Vec3::Zero();
  Vec3 line_end = Vec3::Zero();

  Vec3 circle_center = Vec3::Zero();
  double circle_radius = 1.0;
  double circle_rate = 1.0;   // rad/s
  double circle_phase = 0.0;  // rad

  std::vector<Vec3> waypoints;               // size n+1 for n segments
  std::vector<double> segment_durations;     // size n

  static TrajectorySpec hover(const Vec3& position, double duration) {
    TrajectorySpec s;
    s.kind = Kind::kHover;
    s.hover_position = position;
    s.duration = duration;
    return s;
  }

  static TrajectorySpec line(const Vec3& start, const Vec3& end,
                             double duration) {
    TrajectorySpec s;
    s.kind = Kind::kLine;
    s.line_start = start;
    s.line_end = end;
    s.duration = duration;
    return s;
  }

  static TrajectorySpec circle(const Vec3& center, double radius, double rate,
                               double duration, double phase = 0.0) {
    TrajectorySpec s;
    s.kind = Kind::kCircle;
    s.circle_center = center;
    s.circle_radius = radius;
    s.circle_rate = rate;
    s.circle_phase = phase;
    s.duration = duration;
    return s;
  }

  static TrajectorySpec waypoint_chain(std::vector<Vec3> points,
                                       std::vector<double> durations) {
    TrajectorySpec s;
    s.kind = Kind::kWaypoints;
    s.waypoints = std::move(points);
    s.segment_durations = std::move(durations);
    s.duration = std::accumulate(s.segment_durations.begin(),
                                 s.segment_durations.end(), 0.0);
    return s;
  }

  /// Level approach at `cruise_altitude`, climb to clear `obstacle_height`
  /// plus `clearance`, descend back and continue past the obstacle.
  static TrajectorySpec obstacle_cross(double cruise_altitude,
                                       double obstacle_height,
                                       double clearance,
                                       double segment_duration) {
    const double apex = obstacle_height + clearance;
    std::vector<Vec3> pts = {
        {0.0, 0.0, cruise_altitude},  {1.2, 0.0, cruise_altitude},
        {1.8, 0.0, apex},             {2.4, 0.0, cruise_altitude},
        {3.2, 0.0, cruise_altitude},
    };
    std::vector<double> durs(pts.size() - 1, segment_duration);
    return waypoint_chain(std::move(pts), std::move(durs));
  }

  void validate() const {
    if (!(duration > 0.0)) throw ConfigError("trajectory.duration must be > 0");
    if (kind == Kind::kCircle && !(circle_radius >= 0.0)) {
      throw ConfigError("trajectory.circle_radius must be >= 0");
    }
    if (kind == Kind::kWaypoints) {
      if (waypoints.size() < 2 ||
          segment_durations.size() != waypoints.size() - 1) {
        throw ConfigError(
            "trajectory.waypoints needs n+1 points and n durations");
      }
      for (double d : segment_durations) {
        if (!(d > 0.0)) throw ConfigError("trajectory segment duration <= 0");
      }
    }
  }
};

namespace detail {

/// Minimum-jerk scalar profile s: [0,1] -> [0,1] and its first three time
/// derivatives for a segment of length `duration`.
struct QuinticBlend {
  double s, ds, dds, ddds;
};

inline QuinticBlend quintic_blend(double t, double duration) {
  const double tau = std::clamp(t / duration, 0.0, 1.0);
  const double t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau, t5 = t4 * tau;
  QuinticBlend q;
  q.s = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  q.ds = (30.0 * t2 - 60.0 * t3 + 30.0 * t4) / duration;
  q.dds = (60.0 * tau - 180.0 * t2 + 120.0 * t3) / (duration * duration);
  q.ddds =
      (60.0 - 360.0 * tau + 360.0 * t2) / (duration * duration * duration);
  return q;
}

inline FlatTarget sample_segment(const Vec3& start, const Vec3& end, double t,
                                 double duration) {
  const Vec3 delta = end - start;
  const QuinticBlend q = quintic_blend(t, duration);
  FlatTarget out;
  out.position = start + delta * q.s;
  out.velocity = delta * q.ds;
  out.acceleration = delta * q.dds;
  out.jerk = delta * q.ddds;
  return out;
}

}  // namespace detail

/// Samples the reference at time t. Throws OutOfDomain outside [0, duration].
inline FlatTarget sample(const TrajectorySpec& spec, double t) {
  if (t < 0.0 || t > spec.duration + 1e-12) {
    std::ostringstream msg;
    msg << "trajectory sample at t=" << t << " outside [0, " << spec.duration
        << "]";
    throw OutOfDomain(msg.str());
  }
  switch (spec.kind) {
    case TrajectorySpec::Kind::kHover: {
      FlatTarget out;
      out.position = spec.hover_position;
      return out;
    }
    case TrajectorySpec::Kind::kLine:
      return detail::sample_segment(spec.line_start, spec.line_end, t,
                                    spec.duration);
    case TrajectorySpec::Kind::kCircle: {
      const double r = spec.circle_radius, w = spec.circle_rate;
      const double a = w * t + spec.circle_phase;
      const double c = std::cos(a), s = std::sin(a);
      FlatTarget out;
      out.position = spec.circle_center + Vec3(r * c, r * s, 0.0);
      out.velocity = Vec3(-r * w * s, r * w * c, 0.0);
      out.acceleration = Vec3(-r * w * w * c, -r * w * w * s, 0.0);
      out.jerk = Vec3(r * w * w * w * s, -r * w * w * w * c, 0.0);
      return out;
    }
    case TrajectorySpec::Kind::kWaypoints: {
      double local = t;
      for (size_t i = 0; i < spec.segment_durations.size(); ++i) {
        const double d = spec.segment_durations[i];
        const bool last = i + 1 == spec.segment_durations.size();
        if (local <= d || last) {
          return detail::sample_segment(spec.waypoints[i],
                                        spec.waypoints[i + 1],
                                        std::min(local, d), d);
        }
        local -= d;
      }
      break;
    }
  }
  throw OutOfDomain("trajectory sample: unreachable");
}

/// Reference position at t = 0 (used to place the vehicle at scenario start).
inline Vec3 start_position(const TrajectorySpec& spec) {
  return sample(spec, 0.0).position;
}

}  // namespace flapsim
