// Acceptance suite: one test per criterion, each printing its own pass/fail
// line through the test runner. Thresholds are pinned here, not tuned at
// runtime.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "flapsim/actuation.hpp"
#include "flapsim/config.hpp"
#include "flapsim/metrics.hpp"
#include "flapsim/scenario.hpp"
#include "flapsim/se3_control.hpp"

using namespace flapsim;

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRadToDeg = 180.0 / M_PI;

double position_error_at(const TelemetryLog& log, double t, const Vec3& ref) {
  double best_dt = 1e9, err = 1e9;
  for (const auto& r : log.rows()) {
    const double dt = std::abs(r.t - t);
    if (dt < best_dt) {
      best_dt = dt;
      err = (r.position - ref).norm();
    }
  }
  return err;
}

}  // namespace

// Criterion 1: allocation round-trip over 1e4 seeded feasible wrenches,
// relative error < 1e-9, in under a second.
TEST(Acceptance, C01_AllocationRoundTrip) {
  const VehicleParams p = default_params();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, p.max_frequency);
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    ActuatorCommand f;
    for (int k = 0; k < 3; ++k) f.frequency[k] = u(rng);
    const ControlWrench w = forward_mix(f, p);
    const ControlWrench back = forward_mix(inverse_mix(w, p), p);
    const double num = std::hypot(back.thrust - w.thrust,
                                  back.torque_x - w.torque_x,
                                  back.torque_y - w.torque_y);
    const double den = std::hypot(w.thrust, w.torque_x, w.torque_y);
    worst = std::max(worst, num / den);
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  EXPECT_LT(worst, 1e-9);
  EXPECT_LT(elapsed, 1.0);
}

// Criterion 2: hover algebra with the 37.4 g vehicle and calibrated thrust
// coefficient; three modules at 25.1 Hz lift within 1% of 54.2 gf.
TEST(Acceptance, C02_HoverAlgebra) {
  const VehicleParams p = default_params();
  ASSERT_DOUBLE_EQ(p.mass, 0.0374);
  ControlWrench hover;
  hover.thrust = p.mass * 9.81;
  const ActuatorCommand cmd = inverse_mix(hover, p);
  EXPECT_NEAR(cmd.frequency[0], cmd.frequency[1], 1e-9);
  EXPECT_NEAR(cmd.frequency[1], cmd.frequency[2], 1e-9);
  EXPECT_NEAR(cmd.frequency[0], 17.29, 0.01);

  ActuatorCommand full;
  full.frequency = {25.1, 25.1, 25.1};
  const double lift_gf = forward_mix(full, p).thrust / 9.81 * 1000.0;
  EXPECT_NEAR(lift_gf / 54.2, 1.0, 0.01);
}

// Criterion 3: throttle fit envelope and monotone-branch inversion.
TEST(Acceptance, C03_ThrottleFitEnvelope) {
  const double f_full = throttle_to_frequency(1.0);
  EXPECT_GE(f_full, 24.4);
  EXPECT_LE(f_full, 24.6);
  const double deadband = throttle_deadband();
  EXPECT_GE(deadband, 0.20);
  EXPECT_LE(deadband, 0.21);
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double thr = 0.2026 + (0.9707 - 0.2026) * i / 2000.0;
    worst = std::max(
        worst, std::abs(frequency_to_throttle(throttle_to_frequency(thr)) -
                        thr));
  }
  EXPECT_LT(worst, 1e-9);
}

// Criterion 4: flatness feedforward against finite-differenced desired
// attitude along a 0.5 m / 1 rad/s circle, within 1e-2 rad/s, under 10 s.
TEST(Acceptance, C04_FlatnessVsFiniteDifferences) {
  const VehicleParams p = default_params();
  const double g = 9.81, dt = 1e-4;
  const TrajectorySpec circle =
      TrajectorySpec::circle(Vec3(0, 0, 1), 0.5, 1.0, 2.0 * M_PI + 10 * dt);
  auto r_des_at = [&](double t) {
    const FlatTarget f = sample(circle, t);
    const Vec3 force = p.mass * (f.acceleration + Vec3(0, 0, g));
    return desired_attitude(force.normalized(), 0.0);
  };
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double t = dt; t <= 2.0 * M_PI; t += dt) {
    const FlatTarget f = sample(circle, t);
    const Vec3 force = p.mass * (f.acceleration + Vec3(0, 0, g));
    const Mat3 r = r_des_at(t);
    const Vec3 ff = flatness_rates(f, force.norm(), r, p);
    const Mat3 dr = (r_des_at(t + dt) - r_des_at(t - dt)) / (2.0 * dt);
    const Vec3 omega_fd = vee_symmetrized(r.transpose() * dr);
    worst = std::max({worst, std::abs(ff.x() - omega_fd.x()),
                      std::abs(ff.y() - omega_fd.y())});
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  EXPECT_LT(worst, 1e-2);
  EXPECT_LT(elapsed, 10.0);
}

// Criterion 5: closed-loop hover. (a) zero noise, 5 cm offset, error < 1 cm
// within 3 s; (b) with sensor noise and yaw drift over 150 s the roll/pitch
// RMSE stays below the hardware reference values 4.78 / 7.07 deg.
TEST(Acceptance, C05_ClosedLoopHover) {
  ScenarioConfig clean;
  clean.kind = ScenarioConfig::Kind::kTrajectory;
  clean.trajectory = TrajectorySpec::hover(Vec3(0, 0, 1), 6.0);
  clean.initial_offset = Vec3(0.05, 0, 0);
  const RunResult quiet = ScenarioRunner(clean).run();
  EXPECT_LT(position_error_at(quiet.log, 3.0, Vec3(0, 0, 1)), 0.01);
  EXPECT_LT(position_error_at(quiet.log, 6.0, Vec3(0, 0, 1)), 0.01);
  // Settled, noise-free tracking is sub-millimeter.
  double settled_rmse = 0.0;
  std::size_t n = 0;
  for (const auto& r : quiet.log.rows()) {
    if (r.t < 5.0) continue;
    settled_rmse += (r.position - Vec3(0, 0, 1)).squaredNorm();
    ++n;
  }
  EXPECT_LT(std::sqrt(settled_rmse / n), 0.001);

  // The error envelope decays monotonically: the worst error in each
  // half-second window never exceeds the previous window's.
  double prev_window = 1e9, window_max = 0.0;
  int window = 0;
  for (const auto& r : quiet.log.rows()) {
    const int w = static_cast<int>(r.t / 0.5);
    if (w != window) {
      EXPECT_LE(window_max, prev_window + 1e-9) << "window " << window;
      prev_window = window_max;
      window_max = 0.0;
      window = w;
    }
    window_max =
        std::max(window_max, (r.position - Vec3(0, 0, 1)).norm());
  }

  ScenarioConfig noisy = preset_hover();
  noisy.trajectory.duration = 150.0;
  noisy.output = OutputConfig{};
  const RunResult res = ScenarioRunner(noisy).run();
  EXPECT_LE(res.metrics.roll_rmse_deg, 4.78);
  EXPECT_LE(res.metrics.pitch_rmse_deg, 7.07);
}

// Criterion 6: passive yaw drift past 90 degrees over 120 s must not break
// inertial-frame position control (RMSE < 5 cm).
TEST(Acceptance, C06_YawDriftRobustness) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioConfig::Kind::kTrajectory;
  cfg.trajectory = TrajectorySpec::hover(Vec3(0, 0, 1), 120.0);
  cfg.sim.yaw_disturbance.constant_nm = 1.5e-8;
  cfg.sim.yaw_disturbance.walk_std_nm = 1e-10;
  cfg.sim.seed = 6;
  const RunResult res = ScenarioRunner(cfg).run();

  double drift = 0.0, prev_yaw = res.log.rows().front().euler.yaw;
  for (const auto& r : res.log.rows()) {
    drift += wrap_angle(r.euler.yaw - prev_yaw);
    prev_yaw = r.euler.yaw;
  }
  EXPECT_GE(std::abs(drift), 90.0 * kDegToRad);
  ASSERT_TRUE(res.metrics.position_rmse_m.has_value());
  EXPECT_LT(*res.metrics.position_rmse_m, 0.05);
}

// Criterion 7: dual-layer PID tracks the 0.3 m Gerono lemniscate with mean
// cross-track below 5 cm at a reference speed within 0.8 of the top speed;
// the crawl model stays forward-only and speed-capped throughout.
TEST(Acceptance, C07_GroundFigureEight) {
  ScenarioConfig cfg = preset_figure_eight_ground();
  cfg.output = OutputConfig{};

  // Reference demand stays within 0.8 x 5.4 cm/s.
  double peak_speed = 0.0;
  for (double t = 0.0; t < cfg.eight_period; t += 0.01) {
    const Vec2 a =
        figure_eight_reference(t, cfg.eight_amplitude, cfg.eight_period);
    const Vec2 b = figure_eight_reference(t + 1e-4, cfg.eight_amplitude,
                                          cfg.eight_period);
    peak_speed = std::max(peak_speed, (b - a).norm() / 1e-4);
  }
  EXPECT_LE(peak_speed, 0.8 * 0.054);

  const RunResult res = ScenarioRunner(cfg).run();
  ASSERT_TRUE(res.metrics.cross_track_mean_m.has_value());
  EXPECT_LT(*res.metrics.cross_track_mean_m, 0.05);

  // Completed the full figure in crawl mode.
  EXPECT_GE(res.log.rows().back().t, cfg.eight_period);
  for (const auto& r : res.log.rows()) {
    ASSERT_EQ(r.mode, Mode::kCrawl);
    const double speed = std::hypot(r.velocity.x(), r.velocity.y());
    EXPECT_LE(speed, 0.054 + 1e-12);
    const double along = r.velocity.x() * std::cos(r.euler.yaw) +
                         r.velocity.y() * std::sin(r.euler.yaw);
    EXPECT_GE(along, -1e-12);  // never crawls backward
  }
}

// Criterion 8: endurance closure of the two-point power calibration.
// The simulated depletion times must land within 2% of 6.5 min hover and
// 28 min crawl.
TEST(Acceptance, C08_EnduranceCalibrationClosure) {
  ScenarioConfig hover = preset_endurance_hover();
  hover.output = OutputConfig{};
  const RunResult h = ScenarioRunner(hover).run();
  ASSERT_TRUE(h.metrics.endurance_s.has_value());
  EXPECT_NEAR(*h.metrics.endurance_s, 6.5 * 60.0, 0.02 * 6.5 * 60.0);

  ScenarioConfig crawl = preset_endurance_crawl();
  crawl.output = OutputConfig{};
  const RunResult c = ScenarioRunner(crawl).run();
  ASSERT_TRUE(c.metrics.endurance_s.has_value());
  EXPECT_NEAR(*c.metrics.endurance_s, 28.0 * 60.0, 0.02 * 28.0 * 60.0);
}

// Criterion 9: self-righting from 20 randomized tipped poses completes
// within 0.5 s of simulated time, ending under 5 degrees of tilt.
TEST(Acceptance, C09_SelfRighting) {
  const VehicleParams p = default_params();
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> mag(90.0 * kDegToRad, M_PI);
  std::uniform_real_distribution<double> coin(-1.0, 1.0);
  std::uniform_real_distribution<double> yaw(-M_PI, M_PI);
  for (int i = 0; i < 20; ++i) {
    const double angle = std::copysign(mag(rng), coin(rng));
    VehicleState tipped;
    tipped.grounded = true;
    tipped.rotation = coin(rng) > 0.0 ? rot_z(yaw(rng)) * rot_x(angle)
                                      : rot_z(yaw(rng)) * rot_y(angle);
    ASSERT_GT(tilt_angle(tipped.rotation), 60.0 * kDegToRad);
    const VehicleState up = self_right_step(tipped, p, 0.5);
    EXPECT_LT(tilt_angle(up.rotation) * kRadToDeg, 5.0) << "pose " << i;
  }

  // Integrated: a tipped start recovers to Grounded within 0.5 s plus one
  // control period.
  ScenarioConfig cfg = preset_selfright();
  cfg.output = OutputConfig{};
  const RunResult res = ScenarioRunner(cfg).run();
  ASSERT_GE(res.metrics.mode_timeline.size(), 2u);
  EXPECT_EQ(res.metrics.mode_timeline[0].second, Mode::kSelfRight);
  EXPECT_EQ(res.metrics.mode_timeline[1].second, Mode::kGrounded);
  EXPECT_LE(res.metrics.mode_timeline[1].first, 0.5 + 0.011);
}

// Criterion 10: the crawl -> takeoff -> hover -> land mission runs the
// full mode sequence with no invalid transitions, and identical seeds give
// byte-identical telemetry.
TEST(Acceptance, C10_MultiModeMission) {
  ScenarioConfig cfg = preset_multi_mode_mission();
  cfg.output = OutputConfig{};
  const RunResult a = ScenarioRunner(cfg).run();
  const RunResult b = ScenarioRunner(cfg).run();

  std::vector<Mode> order;
  for (const auto& [t, m] : a.metrics.mode_timeline) order.push_back(m);
  const std::vector<Mode> expected{Mode::kCrawl, Mode::kTakeoff, Mode::kFlight,
                                   Mode::kLanding, Mode::kGrounded};
  EXPECT_EQ(order, expected);
  EXPECT_FALSE(a.summary.aborted);
  for (const auto& e : a.summary.events) {
    EXPECT_EQ(e.find("mode_transition"), std::string::npos) << e;
  }
  // Takeoff and landing never command frequencies beyond the actuator limit.
  for (const auto& r : a.log.rows()) {
    for (double f : r.frequency) {
      EXPECT_LE(f, cfg.vehicle.max_frequency + 1e-12);
      EXPECT_GE(f, 0.0);
    }
  }
  EXPECT_EQ(a.log.to_csv(), b.log.to_csv());
}

// Criterion 11: the cascaded PID benchmark holds the criterion-5 hover
// scenario with under 2 cm of steady-state error.
TEST(Acceptance, C11_CascadedPidBenchmark) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioConfig::Kind::kTrajectory;
  cfg.trajectory = TrajectorySpec::hover(Vec3(0, 0, 1), 8.0);
  cfg.initial_offset = Vec3(0.05, 0, 0);
  cfg.controller = ControllerType::kPid;
  const RunResult res = ScenarioRunner(cfg).run();
  double worst_tail = 0.0;
  for (const auto& r : res.log.rows()) {
    if (r.t < 7.0) continue;
    worst_tail =
        std::max(worst_tail, (r.position - Vec3(0, 0, 1)).norm());
  }
  EXPECT_LT(worst_tail, 0.02);
}
