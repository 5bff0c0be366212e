#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flapsim/config.hpp"
#include "flapsim/dynamics.hpp"
#include "flapsim/errors.hpp"
#include "flapsim/ground_control.hpp"
#include "flapsim/metrics.hpp"
#include "flapsim/mission.hpp"
#include "flapsim/pid_control.hpp"
#include "flapsim/se3_control.hpp"
#include "flapsim/sensors.hpp"
#include "flapsim/telemetry.hpp"

namespace flapsim {

/// Noteworthy run events (phase timeouts, depletion, aborts) that are not
/// part of the telemetry schema.
struct RunSummary {
  std::vector<std::string> events;
  bool aborted = false;
};

struct RunResult {
  TelemetryLog log;
  MetricsReport metrics;
  RunSummary summary;
};

/// Executes one scenario deterministically: fixed-step physics, zero-order
///-hold control at the configured rate, sensor sampling, the mode machine,
/// battery accounting and telemetry capture.
class ScenarioRunner {
 public:
  explicit ScenarioRunner(ScenarioConfig cfg)
      : cfg_(std::move(cfg)),
        sensors_(cfg_.sim),
        walk_rng_(cfg_.sim.seed ^ 0x51e57ab1eull),
        se3_(cfg_.se3_gains, cfg_.se3_options),
        pid_(cfg_.pid_gains) {
    cfg_.validate();
    battery_ = cfg_.vehicle.battery_capacity_mah;
    build_plan();
    init_state();
  }

  RunResult run() {
    const double dt = cfg_.sim.dt_physics;
    const long sensor_every =
        std::lround(1.0 / (cfg_.sim.sensor_rate_hz * dt));
    const long control_every =
        std::lround(1.0 / (cfg_.sim.control_rate_hz * dt));
    const double t_end = cfg_.duration();

    for (long i = 0;; ++i) {
      const double t = i * dt;
      if (t > t_end + 1e-9) break;
      if (finished_ || summary_.aborted) break;
      if (depleted_at_ >= 0.0 && t - depleted_at_ > 2.0) break;

      if (i % sensor_every == 0) observation_ = sensors_.observe(state_, t);
      if (i % control_every == 0) control_tick(t, control_every * dt);
      if (finished_ || summary_.aborted) break;
      advance_physics(t, dt);
    }

    if (log_.empty()) append_row(0.0);  // plan finished before the first tick
    RunResult result;
    result.log = std::move(log_);
    result.summary = std::move(summary_);
    result.metrics = compute_metrics(result.log, cfg_);
    return result;
  }

  const ScenarioConfig& config() const { return cfg_; }

 private:
  // -- setup ---------------------------------------------------------------

  void build_plan() {
    switch (cfg_.kind) {
      case ScenarioConfig::Kind::kTrajectory:
        plan_.phases = {Phase::fly(cfg_.trajectory)};
        plan_.phases[0].timeout = cfg_.trajectory.duration + 1.0;
        mode_ = Mode::kFlight;
        break;
      case ScenarioConfig::Kind::kFigureEight:
        plan_.phases = {Phase::crawl_track(
            cfg_.eight_amplitude, cfg_.eight_period, cfg_.eight_duration)};
        mode_ = Mode::kCrawl;
        break;
      case ScenarioConfig::Kind::kCrawlTo:
        plan_.phases = {
            Phase::crawl_to(cfg_.crawl_target, 0.05, cfg_.crawl_duration)};
        mode_ = Mode::kCrawl;
        break;
      case ScenarioConfig::Kind::kMission:
        plan_ = cfg_.plan;
        mode_ = Mode::kGrounded;
        break;
    }
  }

  void init_state() {
    if (cfg_.kind == ScenarioConfig::Kind::kTrajectory) {
      const FlatTarget t0 = sample(cfg_.trajectory, 0.0);
      state_.position = t0.position + cfg_.initial_offset;
      state_.velocity = t0.velocity;
    } else {
      state_.position = Vec3::Zero();
      state_.grounded = true;
    }
    if (cfg_.initial_position) state_.position = *cfg_.initial_position;
    crawl_state_.x = state_.position.x();
    crawl_state_.y = state_.position.y();
    if (cfg_.kind == ScenarioConfig::Kind::kFigureEight) {
      crawl_state_.yaw = cfg_.initial_yaw;
    }
    if (cfg_.kind == ScenarioConfig::Kind::kFigureEight ||
        cfg_.kind == ScenarioConfig::Kind::kCrawlTo) {
      sync_crawl_pose(0.0, 0.0);
    }
    if (cfg_.initial_euler) {
      state_.rotation = euler_zxy_to_rotation(*cfg_.initial_euler);
      crawl_state_.yaw = cfg_.initial_euler->yaw;
    }
    enter_phase(0, 0.0);
  }

  // -- phase machinery -----------------------------------------------------

  const Phase* active_phase() const {
    if (phase_index_ >= plan_.phases.size()) return nullptr;
    return &plan_.phases[phase_index_];
  }

  void enter_phase(std::size_t index, double t) {
    phase_index_ = index;
    phase_start_ = t;
    const Phase* phase = active_phase();
    if (!phase) {
      finished_ = true;
      return;
    }
    if (phase->kind == Phase::Kind::kFlyTrajectory) {
      flight_trajectory_ = phase->trajectory;
      trajectory_anchor_ = phase->relative_to_entry
                               ? Vec3(state_.position -
                                      start_position(phase->trajectory))
                               : Vec3::Zero();
      trajectory_start_ = t;
    }
  }

  bool phase_complete(const Phase& phase, double t) const {
    const double elapsed = t - phase_start_;
    switch (phase.kind) {
      case Phase::Kind::kCrawlTo: {
        const Vec2 pos(state_.position.x(), state_.position.y());
        return (pos - phase.crawl_target).norm() < phase.capture_radius;
      }
      case Phase::Kind::kCrawlTrack:
        return elapsed >= phase.track_duration;
      case Phase::Kind::kTakeoff:
        return mode_ == Mode::kFlight &&
               std::abs(state_.position.z() - phase.takeoff_altitude) < 0.05 &&
               std::abs(state_.velocity.z()) < 0.1;
      case Phase::Kind::kFlyTrajectory:
        return elapsed >= phase.trajectory.duration;
      case Phase::Kind::kLand:
        return mode_ == Mode::kGrounded;
      case Phase::Kind::kWait:
        return elapsed >= phase.wait_duration;
    }
    return false;
  }

  std::optional<Mode> phase_mode_request(const Phase& phase) const {
    if (mode_ == Mode::kSelfRight || mode_ == Mode::kDepleted) {
      return std::nullopt;  // let the automatic behavior finish
    }
    switch (phase.kind) {
      case Phase::Kind::kCrawlTo:
      case Phase::Kind::kCrawlTrack:
        if (mode_ != Mode::kCrawl) return Mode::kCrawl;
        return std::nullopt;
      case Phase::Kind::kTakeoff:
      case Phase::Kind::kFlyTrajectory:
        if (mode_ == Mode::kCrawl || mode_ == Mode::kGrounded) {
          return Mode::kTakeoff;
        }
        return std::nullopt;
      case Phase::Kind::kLand:
        if (mode_ == Mode::kFlight) return Mode::kLanding;
        return std::nullopt;
      case Phase::Kind::kWait:
        return std::nullopt;
    }
    return std::nullopt;
  }

  // -- control loop --------------------------------------------------------

  void control_tick(double t, double dt_ctrl) {
    const Phase* phase = active_phase();
    if (phase) {
      if (phase_complete(*phase, t)) {
        enter_phase(phase_index_ + 1, t);
        phase = active_phase();
      } else if (t - phase_start_ > phase->timeout) {
        record_event(t, std::string("phase timeout in phase ") +
                            std::to_string(phase_index_));
        enter_phase(phase_index_ + 1, t);
        phase = active_phase();
      }
    }
    if (!phase) {
      finished_ = true;
      return;
    }

    TransitionContext ctx;
    ctx.tilt = tilt_angle(state_.rotation);
    ctx.altitude = state_.position.z();
    ctx.descent_rate = -state_.velocity.z();
    ctx.grounded = state_.grounded;
    ctx.battery_empty = battery_empty_;

    Mode next = mode_;
    try {
      next = mode_transition(mode_, ctx, phase_mode_request(*phase));
    } catch (const InvalidTransition& e) {
      record_event(t, e.what());
      summary_.aborted = true;
      append_row(t);
      return;
    }
    if (next != mode_) on_mode_entry(next, t);

    dispatch_controller(t, dt_ctrl, *phase);

    try {
      battery_ = battery_drain(command_, dt_ctrl, battery_, cfg_.vehicle);
    } catch (const BatteryEmpty&) {
      battery_ = 0.0;
      if (!battery_empty_) {
        battery_empty_ = true;
        record_event(t, "battery depleted");
      }
    }

    if (tick_counter_ % cfg_.output.decimation == 0) append_row(t);
    ++tick_counter_;
  }

  void on_mode_entry(Mode next, double t) {
    switch (next) {
      case Mode::kSelfRight:
        selfright_entry_ = state_;
        selfright_start_ = t;
        selfright_modules_ =
            select_righting_modules(state_.rotation, cfg_.vehicle);
        break;
      case Mode::kTakeoff: {
        se3_.reset();
        pid_.reset();
        const Phase* phase = active_phase();
        const double altitude =
            phase && phase->kind == Phase::Kind::kTakeoff
                ? phase->takeoff_altitude
                : 1.0;
        const double climb =
            phase && phase->kind == Phase::Kind::kTakeoff
                ? phase->climb_duration
                : 3.0;
        flight_trajectory_ = TrajectorySpec::line(
            state_.position,
            Vec3(state_.position.x(), state_.position.y(), altitude), climb);
        trajectory_anchor_ = Vec3::Zero();
        trajectory_start_ = t;
        break;
      }
      case Mode::kLanding: {
        const double descent = active_phase() &&
                                       active_phase()->kind == Phase::Kind::kLand
                                   ? active_phase()->descent_rate
                                   : 0.15;
        // Aim slightly below the ground plane so the reference actually
        // drives through touchdown instead of hovering asymptotically at 0.
        const double duration =
            std::max(2.0, (state_.position.z() + 0.05) / std::max(0.05, descent));
        flight_trajectory_ = TrajectorySpec::line(
            state_.position,
            Vec3(state_.position.x(), state_.position.y(), -0.05), duration);
        trajectory_anchor_ = Vec3::Zero();
        trajectory_start_ = t;
        break;
      }
      case Mode::kCrawl:
        crawl_controller_.reset();
        crawl_state_.x = state_.position.x();
        crawl_state_.y = state_.position.y();
        crawl_state_.yaw = observation_.euler_meas.yaw;
        break;
      case Mode::kDepleted:
        depleted_at_ = t;
        break;
      default:
        break;
    }
    mode_ = next;
  }

  /// Reference for the active flight trajectory, clamped at its end.
  FlatTarget flight_target(double t) const {
    const double local =
        std::clamp(t - trajectory_start_, 0.0, flight_trajectory_.duration);
    FlatTarget target = sample(flight_trajectory_, local);
    target.position += trajectory_anchor_;
    target.yaw_sample = observation_.euler_meas.yaw;
    const Mat3 r_est = euler_zxy_to_rotation(observation_.euler_meas);
    // Invert r = psi_dot (Z_W . Z_B) to recover the observed yaw rate.
    target.yaw_rate_sample =
        observation_.omega_meas.z() / std::clamp(r_est(2, 2), 0.2, 1.0);
    return target;
  }

  void dispatch_controller(double t, double dt_ctrl, const Phase& phase) {
    wrench_cmd_ = ControlWrench{};
    command_ = ActuatorCommand{};
    applied_ = ControlWrench{};

    switch (mode_) {
      case Mode::kTakeoff:
      case Mode::kFlight:
      case Mode::kLanding: {
        VehicleState estimate;
        estimate.position = observation_.position_meas;
        estimate.velocity = observation_.velocity_meas;
        estimate.rotation = euler_zxy_to_rotation(observation_.euler_meas);
        estimate.body_rates = observation_.omega_meas;
        const FlatTarget target = flight_target(t);
        if (cfg_.controller == ControllerType::kSe3) {
          wrench_cmd_ =
              se3_.step(estimate, target, cfg_.vehicle, cfg_.sim.gravity);
        } else {
          wrench_cmd_ = pid_.step(estimate, observation_.euler_meas, target,
                                  cfg_.vehicle, cfg_.sim.gravity, dt_ctrl);
        }
        // The yaw channel is computed for diagnostics and dropped here: the
        // allocation has no yaw authority.
        ControlWrench allocate = wrench_cmd_;
        allocate.thrust = std::max(0.0, allocate.thrust);
        command_ = inverse_mix(allocate, cfg_.vehicle);
        applied_ = forward_mix(command_, cfg_.vehicle);
        break;
      }
      case Mode::kCrawl: {
        CrawlState observed;
        observed.x = observation_.position_meas.x();
        observed.y = observation_.position_meas.y();
        observed.yaw = observation_.euler_meas.yaw;
        const Vec2 target =
            phase.kind == Phase::Kind::kCrawlTrack
                ? figure_eight_reference(t - phase_start_,
                                         phase.track_amplitude,
                                         phase.track_period)
                : phase.crawl_target;
        const auto [f_left, f_right] =
            crawl_controller_.step(observed, target, cfg_.crawl, dt_ctrl);
        crawl_left_ = f_left;
        crawl_right_ = f_right;
        command_.frequency = {0.0, f_left, f_right};
        break;
      }
      case Mode::kSelfRight: {
        const double burst = frequency_envelope_max();
        for (int idx : selfright_modules_) command_.frequency[idx] = burst;
        break;
      }
      case Mode::kGrounded:
      case Mode::kDepleted:
        break;
    }

    // Physical yaw torque: assembly imbalance plus the disturbance walk.
    if (cfg_.sim.yaw_disturbance.walk_std_nm > 0.0) {
      walk_state_ += cfg_.sim.yaw_disturbance.walk_std_nm *
                     std::sqrt(dt_ctrl) * gauss_(walk_rng_);
    }
    applied_.torque_z_residual +=
        cfg_.sim.yaw_disturbance.constant_nm + walk_state_;
  }

  // -- physics -------------------------------------------------------------

  void sync_crawl_pose(double f_left, double f_right) {
    const double speed = std::min(
        cfg_.crawl.speed_per_hz * 0.5 *
            (std::clamp(f_left, 0.0, cfg_.crawl.max_frequency) +
             std::clamp(f_right, 0.0, cfg_.crawl.max_frequency)),
        cfg_.crawl.max_speed);
    const double yaw_rate = cfg_.crawl.yaw_rate_per_hz * (f_right - f_left);
    state_.position = Vec3(crawl_state_.x, crawl_state_.y, 0.0);
    state_.velocity = Vec3(speed * std::cos(crawl_state_.yaw),
                           speed * std::sin(crawl_state_.yaw), 0.0);
    state_.rotation = rot_z(crawl_state_.yaw);
    state_.body_rates = Vec3(0.0, 0.0, yaw_rate);
    state_.grounded = true;
  }

  void advance_physics(double t, double dt) {
    switch (mode_) {
      case Mode::kCrawl:
        crawl_state_ = crawl_kinematics(crawl_left_, crawl_right_, cfg_.crawl,
                                        crawl_state_, dt);
        sync_crawl_pose(crawl_left_, crawl_right_);
        break;
      case Mode::kSelfRight:
        state_ = self_right_step(selfright_entry_, cfg_.vehicle,
                                 t + dt - selfright_start_);
        break;
      case Mode::kGrounded:
      case Mode::kDepleted: {
        state_ = step_dynamics(state_, ControlWrench{}, cfg_.vehicle, cfg_.sim,
                               dt);
        state_ = ground_contact(state_, cfg_.sim, dt);
        break;
      }
      default:
        state_ = step_dynamics(state_, applied_, cfg_.vehicle, cfg_.sim, dt);
        state_ = ground_contact(state_, cfg_.sim, dt);
        break;
    }
  }

  // -- output --------------------------------------------------------------

  void append_row(double t) {
    TelemetryRecord r;
    r.t = t;
    r.position = state_.position;
    r.velocity = state_.velocity;
    try {
      r.euler = rotation_to_euler_zxy(state_.rotation);
      last_logged_euler_ = r.euler;
    } catch (const GimbalLock&) {
      r.euler = last_logged_euler_;  // tipped through the extraction singularity
    }
    r.body_rates = state_.body_rates;
    r.u1 = wrench_cmd_.thrust;
    r.u2 = wrench_cmd_.torque_x;
    r.u3 = wrench_cmd_.torque_y;
    r.mz_cmd = wrench_cmd_.torque_z_residual;
    r.frequency = command_.frequency;
    for (int i = 0; i < 3; ++i) {
      const double f = command_.frequency[i];
      r.throttle[i] =
          f > 0.0 ? frequency_to_throttle(std::min(f, frequency_envelope_max()))
                  : 0.0;
    }
    r.mode = mode_;
    r.battery_mah = battery_;
    r.saturated = command_.saturated;
    log_.append(r);
  }

  void record_event(double t, const std::string& what) {
    std::string msg = "t=";
    detail::append_number(msg, t);
    msg += ": " + what;
    summary_.events.push_back(msg);
  }

  // -- members ---------------------------------------------------------------

  ScenarioConfig cfg_;
  VehicleState state_;
  CrawlState crawl_state_;
  Mode mode_ = Mode::kGrounded;

  SensorModel sensors_;
  Observation observation_;
  std::mt19937_64 walk_rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  double walk_state_ = 0.0;

  Se3Controller se3_;
  PidFlightController pid_;
  CrawlController crawl_controller_;

  MissionPlan plan_;
  std::size_t phase_index_ = 0;
  double phase_start_ = 0.0;
  TrajectorySpec flight_trajectory_ = TrajectorySpec::hover(Vec3::Zero(), 1.0);
  Vec3 trajectory_anchor_ = Vec3::Zero();
  double trajectory_start_ = 0.0;

  VehicleState selfright_entry_;
  double selfright_start_ = 0.0;
  std::array<int, 2> selfright_modules_{1, 2};
  double crawl_left_ = 0.0, crawl_right_ = 0.0;

  double battery_ = 0.0;
  bool battery_empty_ = false;
  double depleted_at_ = -1.0;
  bool finished_ = false;

  ControlWrench wrench_cmd_;
  ActuatorCommand command_;
  ControlWrench applied_;

  TelemetryLog log_;
  RunSummary summary_;
  EulerZxy last_logged_euler_;
  long tick_counter_ = 0;
};

/// Runs a scenario and writes the configured outputs. Deterministic for a
/// fixed (config, seed).
inline RunResult run_scenario(const ScenarioConfig& cfg) {
  ScenarioRunner runner(cfg);
  RunResult result = runner.run();
  if (!cfg.output.telemetry_path.empty()) {
    std::ofstream out(cfg.output.telemetry_path, std::ios::binary);
    if (!out) {
      throw ConfigError("cannot write telemetry to " +
                        cfg.output.telemetry_path);
    }
    result.log.write_csv(out);
  }
  if (!cfg.output.metrics_path.empty()) {
    std::ofstream out(cfg.output.metrics_path, std::ios::binary);
    if (!out) {
      throw ConfigError("cannot write metrics to " + cfg.output.metrics_path);
    }
    const std::string text = result.metrics.to_text();
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
  }
  return result;
}

/// Executes a mission plan with the given base configuration.
inline TelemetryLog run_mission(const MissionPlan& plan, ScenarioConfig cfg) {
  cfg.kind = ScenarioConfig::Kind::kMission;
  cfg.plan = plan;
  cfg.output = OutputConfig{};
  return ScenarioRunner(std::move(cfg)).run().log;
}

}  // namespace flapsim
