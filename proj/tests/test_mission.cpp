#include "flapsim/mission.hpp"

#include <gtest/gtest.h>

#include <random>

#include "flapsim/scenario.hpp"

using namespace flapsim;

namespace {

TransitionContext level_ground() {
  TransitionContext ctx;
  ctx.grounded = true;
  return ctx;
}

}  // namespace

TEST(ModeTransition, LandingSequence) {
  TransitionContext ctx;
  ctx.altitude = 0.8;
  Mode m = mode_transition(Mode::kFlight, ctx, Mode::kLanding);
  EXPECT_EQ(m, Mode::kLanding);
  ctx.grounded = true;
  ctx.descent_rate = 0.01;
  ctx.altitude = 0.0;
  m = mode_transition(m, ctx);
  EXPECT_EQ(m, Mode::kGrounded);
}

TEST(ModeTransition, TakeoffPromotesToFlightAboveThreshold) {
  TransitionContext ctx;
  ctx.altitude = 0.1;
  EXPECT_EQ(mode_transition(Mode::kTakeoff, ctx), Mode::kTakeoff);
  ctx.altitude = 0.25;
  EXPECT_EQ(mode_transition(Mode::kTakeoff, ctx), Mode::kFlight);
}

TEST(ModeTransition, TippedGroundedGoesToSelfRight) {
  TransitionContext ctx = level_ground();
  ctx.tilt = 120.0 * M_PI / 180.0;
  EXPECT_EQ(mode_transition(Mode::kGrounded, ctx), Mode::kSelfRight);
  EXPECT_EQ(mode_transition(Mode::kCrawl, ctx), Mode::kSelfRight);
  // not while flying
  ctx.grounded = false;
  EXPECT_EQ(mode_transition(Mode::kFlight, ctx), Mode::kFlight);
}

TEST(ModeTransition, SelfRightFinishesWhenUpright) {
  TransitionContext ctx = level_ground();
  ctx.tilt = 0.02;
  EXPECT_EQ(mode_transition(Mode::kSelfRight, ctx), Mode::kGrounded);
  ctx.tilt = 0.5;
  EXPECT_EQ(mode_transition(Mode::kSelfRight, ctx), Mode::kSelfRight);
}

TEST(ModeTransition, DepletionIsAbsorbingFromAnywhere) {
  TransitionContext ctx;
  ctx.battery_empty = true;
  for (Mode m : {Mode::kCrawl, Mode::kTakeoff, Mode::kFlight, Mode::kLanding,
                 Mode::kSelfRight, Mode::kGrounded}) {
    EXPECT_EQ(mode_transition(m, ctx), Mode::kDepleted);
  }
  ctx.battery_empty = false;
  EXPECT_EQ(mode_transition(Mode::kDepleted, ctx, Mode::kTakeoff),
            Mode::kDepleted);
}

TEST(ModeTransition, PlanEdgesValidated) {
  TransitionContext ctx = level_ground();
  EXPECT_EQ(mode_transition(Mode::kGrounded, ctx, Mode::kCrawl), Mode::kCrawl);
  EXPECT_EQ(mode_transition(Mode::kGrounded, ctx, Mode::kTakeoff),
            Mode::kTakeoff);
  EXPECT_EQ(mode_transition(Mode::kCrawl, ctx, Mode::kTakeoff), Mode::kTakeoff);
  EXPECT_THROW(mode_transition(Mode::kGrounded, ctx, Mode::kLanding),
               InvalidTransition);
  EXPECT_THROW(mode_transition(Mode::kCrawl, ctx, Mode::kFlight),
               InvalidTransition);
  TransitionContext air;
  EXPECT_THROW(mode_transition(Mode::kFlight, air, Mode::kCrawl),
               InvalidTransition);
}

TEST(SelectRightingModules, RollTowardRightExcludesRightModule) {
  const VehicleParams p = default_params();
  // +120 deg roll drops the left module lowest; the right module ends up
  // highest and is excluded, leaving back (0) and left (1).
  const auto pair = select_righting_modules(rot_x(120.0 * M_PI / 180.0), p);
  EXPECT_EQ(pair[0], 0);
  EXPECT_EQ(pair[1], 1);
}

TEST(SelectRightingModules, PitchTipExcludesBackModule) {
  const VehicleParams p = default_params();
  // Tipping so the back arm points up leaves the lateral pair lowest.
  const auto pair = select_righting_modules(rot_y(-120.0 * M_PI / 180.0), p);
  EXPECT_EQ(pair[0], 1);
  EXPECT_EQ(pair[1], 2);
}

TEST(SelfRightStep, FullInversionRecoversInHalfSecond) {
  const VehicleParams p = default_params();
  VehicleState tipped;
  tipped.rotation = rot_x(M_PI);  // fully inverted
  tipped.grounded = true;
  const VehicleState up = self_right_step(tipped, p, kSelfRightDuration);
  EXPECT_LT(tilt_angle(up.rotation), 5.0 * M_PI / 180.0);
  EXPECT_TRUE(up.grounded);
}

TEST(SelfRightStep, AlreadyUprightIsNoOp) {
  const VehicleParams p = default_params();
  VehicleState s;
  s.rotation = rot_z(0.8);
  s.grounded = true;
  const VehicleState out = self_right_step(s, p, 0.0);
  EXPECT_LT(tilt_angle(out.rotation), 1e-9);
  // yaw preserved
  EXPECT_NEAR(rotation_to_euler_zxy(out.rotation).yaw, 0.8, 1e-9);
}

TEST(SelfRightStep, SlewIsProgressive) {
  const VehicleParams p = default_params();
  VehicleState tipped;
  tipped.rotation = rot_x(150.0 * M_PI / 180.0);
  const double t0 = tilt_angle(self_right_step(tipped, p, 0.0).rotation);
  const double t1 = tilt_angle(self_right_step(tipped, p, 0.25).rotation);
  const double t2 = tilt_angle(self_right_step(tipped, p, 0.5).rotation);
  EXPECT_GT(t0, t1);
  EXPECT_GT(t1, t2);
  EXPECT_LT(t2, 5.0 * M_PI / 180.0);
}

TEST(SelfRightStep, RandomTippedPosesRecover) {
  const VehicleParams p = default_params();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> mag(M_PI / 2, M_PI);
  std::uniform_real_distribution<double> sign(-1.0, 1.0);
  std::uniform_real_distribution<double> yaw(-M_PI, M_PI);
  for (int i = 0; i < 50; ++i) {
    VehicleState s;
    const double angle = std::copysign(mag(rng), sign(rng));
    s.rotation = sign(rng) > 0 ? rot_z(yaw(rng)) * rot_x(angle)
                               : rot_z(yaw(rng)) * rot_y(angle);
    const VehicleState out = self_right_step(s, p, kSelfRightDuration);
    EXPECT_LT(tilt_angle(out.rotation), 5.0 * M_PI / 180.0);
  }
}

TEST(MissionPlan, EmptyPlanRejected) {
  MissionPlan plan;
  EXPECT_THROW(plan.validate(), ConfigError);
}

TEST(RunMission, ShortCrawlCompletesInCrawlMode) {
  ScenarioConfig cfg;
  MissionPlan plan;
  plan.phases = {Phase::crawl_to(Vec2(0.12, 0.0), 0.05, 30.0)};
  const TelemetryLog log = run_mission(plan, cfg);
  ASSERT_FALSE(log.empty());
  bool saw_crawl = false;
  for (const auto& r : log.rows()) {
    if (r.mode == Mode::kCrawl) saw_crawl = true;
    EXPECT_NE(mode_name(r.mode), std::string("?"));
  }
  EXPECT_TRUE(saw_crawl);
  const auto& last = log.rows().back();
  EXPECT_LT(std::hypot(last.position.x() - 0.12, last.position.y()), 0.06);
}

TEST(RunMission, TinyBatteryDepletesAndAbsorbs) {
  ScenarioConfig cfg;  // draw model stays calibrated for the full battery
  cfg.vehicle.battery_capacity_mah = 0.8;  // seconds of hover at ~3.5 A
  cfg.kind = ScenarioConfig::Kind::kTrajectory;
  cfg.trajectory = TrajectorySpec::hover(Vec3(0, 0, 1), 10.0);
  const RunResult res = ScenarioRunner(cfg).run();
  ASSERT_TRUE(res.metrics.endurance_s.has_value());
  bool depleted_seen = false;
  double prev_battery = cfg.vehicle.battery_capacity_mah;
  for (const auto& r : res.log.rows()) {
    EXPECT_LE(r.battery_mah, prev_battery);  // monotone non-increasing
    prev_battery = r.battery_mah;
    if (depleted_seen) EXPECT_EQ(r.mode, Mode::kDepleted);  // absorbing
    if (r.mode == Mode::kDepleted) depleted_seen = true;
  }
  EXPECT_TRUE(depleted_seen);
}

TEST(RunMission, RandomPlansNeverProduceIllegalModeEdges) {
  // Whatever the plan asks for (including nonsense orderings that abort),
  // the logged mode sequence must only walk legal edges.
  auto legal = [](Mode a, Mode b) {
    if (a == b) return true;
    if (b == Mode::kDepleted) return true;
    switch (a) {
      case Mode::kCrawl:
        return b == Mode::kTakeoff || b == Mode::kSelfRight;
      case Mode::kTakeoff:
        return b == Mode::kFlight;
      case Mode::kFlight:
        return b == Mode::kLanding;
      case Mode::kLanding:
        return b == Mode::kGrounded;
      case Mode::kGrounded:
        return b == Mode::kCrawl || b == Mode::kTakeoff ||
               b == Mode::kSelfRight;
      case Mode::kSelfRight:
        return b == Mode::kGrounded;
      default:
        return false;
    }
  };
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_real_distribution<double> len(0.5, 3.0);
  for (int trial = 0; trial < 12; ++trial) {
    MissionPlan plan;
    const int n = 1 + static_cast<int>(pick(rng)) % 3;
    for (int i = 0; i < n; ++i) {
      switch (pick(rng)) {
        case 0:
          plan.phases.push_back(Phase::crawl_to(Vec2(0.1, 0.05), 0.05, 5.0));
          break;
        case 1:
          plan.phases.push_back(Phase::takeoff(0.6, 10.0));
          break;
        case 2:
          plan.phases.push_back(Phase::hover(len(rng)));
          break;
        case 3:
          plan.phases.push_back(Phase::land(10.0));
          break;
        default:
          plan.phases.push_back(Phase::wait(len(rng)));
          break;
      }
    }
    ScenarioConfig cfg;
    cfg.sim.seed = 100 + trial;
    const TelemetryLog log = run_mission(plan, cfg);
    ASSERT_FALSE(log.empty());
    for (size_t i = 1; i < log.rows().size(); ++i) {
      const Mode a = log.rows()[i - 1].mode, b = log.rows()[i].mode;
      ASSERT_TRUE(legal(a, b))
          << "trial " << trial << ": " << mode_name(a) << " -> "
          << mode_name(b);
    }
  }
}

TEST(RunMission, TippedStartTriggersSelfRightThenGrounded) {
  ScenarioConfig cfg = preset("selfright");
  cfg.output = OutputConfig{};
  const RunResult res = ScenarioRunner(cfg).run();
  std::vector<Mode> order;
  for (const auto& [t, m] : res.metrics.mode_timeline) order.push_back(m);
  ASSERT_GE(order.size(), 2u);
  EXPECT_EQ(order[0], Mode::kSelfRight);
  EXPECT_EQ(order[1], Mode::kGrounded);
}
