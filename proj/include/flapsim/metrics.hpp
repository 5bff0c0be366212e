#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flapsim/config.hpp"
#include "flapsim/errors.hpp"
#include "flapsim/telemetry.hpp"

namespace flapsim {

inline double rmse(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return std::sqrt(acc / static_cast<double>(values.size()));
}

inline double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

/// Run metrics computed purely from (telemetry log, scenario config), so a
/// saved log reproduces the in-run report byte for byte.
struct MetricsReport {
  std::size_t samples = 0;
  double duration_s = 0.0;
  double roll_rmse_deg = 0.0;
  double pitch_rmse_deg = 0.0;
  double roll_max_dev_deg = 0.0;
  double pitch_max_dev_deg = 0.0;
  std::optional<double> position_rmse_m;
  std::optional<double> cross_track_mean_m;
  std::optional<double> cross_track_max_m;
  std::optional<double> endurance_s;  // set when the battery depleted
  long yaw_discard_events = 0;
  long sustained_saturation_warnings = 0;
  std::vector<std::pair<double, Mode>> mode_timeline;

  std::string to_text() const {
    std::string out;
    auto num = [&out](const char* key, double v) {
      out += key;
      out += " = ";
      detail::append_number(out, v);
      out += '\n';
    };
    out += "samples = " + std::to_string(samples) + '\n';
    num("duration_s", duration_s);
    num("roll_rmse_deg", roll_rmse_deg);
    num("pitch_rmse_deg", pitch_rmse_deg);
    num("roll_max_dev_deg", roll_max_dev_deg);
    num("pitch_max_dev_deg", pitch_max_dev_deg);
    if (position_rmse_m) num("position_rmse_m", *position_rmse_m);
    if (cross_track_mean_m) num("cross_track_mean_m", *cross_track_mean_m);
    if (cross_track_max_m) num("cross_track_max_m", *cross_track_max_m);
    if (endurance_s) num("endurance_s", *endurance_s);
    out += "yaw_discard_events = " + std::to_string(yaw_discard_events) + '\n';
    out += "sustained_saturation_warnings = " +
           std::to_string(sustained_saturation_warnings) + '\n';
    out += "mode_timeline =";
    for (const auto& [t, m] : mode_timeline) {
      out += ' ';
      detail::append_number(out, t);
      out += ':';
      out += mode_name(m);
    }
    out += '\n';
    return out;
  }
};

/// Computes the report for a finished run. Attitude errors are measured
/// against level setpoints; the position reference is re-derived from the
/// scenario config. Throws EmptyLog on an empty log.
inline MetricsReport compute_metrics(const TelemetryLog& log,
                                     const ScenarioConfig& cfg) {
  if (log.empty()) throw EmptyLog("compute_metrics: empty log");
  const auto& rows = log.rows();

  MetricsReport rep;
  rep.samples = rows.size();
  rep.duration_s = rows.back().t - rows.front().t;

  constexpr double kRadToDeg = 180.0 / M_PI;
  std::vector<double> roll, pitch;
  roll.reserve(rows.size());
  pitch.reserve(rows.size());
  for (const auto& r : rows) {
    roll.push_back(r.euler.roll * kRadToDeg);
    pitch.push_back(r.euler.pitch * kRadToDeg);
  }
  rep.roll_rmse_deg = rmse(roll);
  rep.pitch_rmse_deg = rmse(pitch);
  rep.roll_max_dev_deg = max_abs(roll);
  rep.pitch_max_dev_deg = max_abs(pitch);

  if (cfg.kind == ScenarioConfig::Kind::kTrajectory) {
    double acc = 0.0;
    for (const auto& r : rows) {
      const double t = std::clamp(r.t, 0.0, cfg.trajectory.duration);
      acc += (r.position - sample(cfg.trajectory, t).position).squaredNorm();
    }
    rep.position_rmse_m = std::sqrt(acc / static_cast<double>(rows.size()));
  }

  if (cfg.kind == ScenarioConfig::Kind::kFigureEight) {
    // Cross-track error against a densely sampled reference path.
    constexpr int kPathSamples = 4096;
    std::vector<Vec2> path(kPathSamples);
    for (int i = 0; i < kPathSamples; ++i) {
      path[i] = figure_eight_reference(
          cfg.eight_period * i / kPathSamples, cfg.eight_amplitude,
          cfg.eight_period);
    }
    double acc = 0.0, worst = 0.0;
    std::size_t count = 0;
    for (const auto& r : rows) {
      if (r.mode != Mode::kCrawl) continue;
      const Vec2 p(r.position.x(), r.position.y());
      double best = std::numeric_limits<double>::infinity();
      for (const Vec2& q : path) best = std::min(best, (p - q).norm());
      acc += best;
      worst = std::max(worst, best);
      ++count;
    }
    if (count > 0) {
      rep.cross_track_mean_m = acc / static_cast<double>(count);
      rep.cross_track_max_m = worst;
    }
  }

  for (const auto& r : rows) {
    if (r.mode == Mode::kDepleted) {
      rep.endurance_s = r.t;
      break;
    }
  }

  for (const auto& r : rows) {
    if (std::abs(r.mz_cmd) > 1e-12) ++rep.yaw_discard_events;
  }

  // Saturation streaks longer than one second.
  double streak_start = 0.0;
  bool in_streak = false;
  auto any_sat = [](const TelemetryRecord& r) {
    return r.saturated[0] || r.saturated[1] || r.saturated[2];
  };
  for (const auto& r : rows) {
    if (any_sat(r)) {
      if (!in_streak) {
        in_streak = true;
        streak_start = r.t;
      }
    } else if (in_streak) {
      if (r.t - streak_start > 1.0) ++rep.sustained_saturation_warnings;
      in_streak = false;
    }
  }
  if (in_streak && rows.back().t - streak_start > 1.0) {
    ++rep.sustained_saturation_warnings;
  }

  rep.mode_timeline.emplace_back(rows.front().t, rows.front().mode);
  for (const auto& r : rows) {
    if (r.mode != rep.mode_timeline.back().second) {
      rep.mode_timeline.emplace_back(r.t, r.mode);
    }
  }
  return rep;
}

}  // namespace flapsim
