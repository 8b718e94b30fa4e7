#include <cmath>

#include "beam/pipeline.hpp"
#include "beam/scenario_io.hpp"
#include "support.hpp"

namespace beam::sim {
namespace {

using test::deg;
using test::error_of;

Scenario moving(MotionKind kind, double speed, double extent) {
  Scenario s;
  s.motion.kind = kind;
  s.motion.speed = speed;
  s.motion.extent = extent;
  return s;
}

Scenario at_depth(double z) {
  Scenario s;
  s.motion.start_pose = RigidTransform::translation(Vec3(0, 0, z), Frame::Headset, Frame::World);
  s.scene.headset.pose = s.motion.start_pose;
  return s;
}

// Viewpoint pixels spanned by the steering deadband at distance z.
double deadband_in_viewpoint_px(const Scenario& s, double z) {
  const double meters = s.scene.deadband_px / s.scene.camera.intrinsics.fx * z;
  return meters * s.scene.viewpoint.intrinsics.fx / s.scene.viewpoint.eye_distance;
}

TEST(Motion, StaticHoldsStartPose) {
  MotionScript m;
  const auto p = m.pose_at(3.0);
  EXPECT_EQ(p.translation(), Vec3(0, 0, 1));
  EXPECT_EQ(p.rotation(), Mat3::Identity());
}

TEST(Motion, SlideRunsThenHolds) {
  MotionScript m;
  m.kind = MotionKind::SlideX;
  m.speed = 0.05;
  m.extent = 0.2;
  EXPECT_NEAR(m.completion_time(), 4.0, 1e-12);
  EXPECT_NEAR(m.pose_at(1.0).translation().x(), 0.05, 1e-15);
  EXPECT_NEAR(m.pose_at(10.0).translation().x(), 0.2, 1e-15);
  EXPECT_EQ(m.pose_at(-1.0).translation().x(), 0.0);
  m.kind = MotionKind::DepthZ;
  EXPECT_NEAR(m.pose_at(2.0).translation().z(), 1.1, 1e-15);
}

TEST(Motion, RotationsTurnAboutThePivot) {
  for (const auto kind : {MotionKind::Yaw, MotionKind::Pitch, MotionKind::Roll}) {
    MotionScript m;
    m.kind = kind;
    m.speed = 20.0;
    m.extent = 60.0;
    m.pivot_distance = 0.15;
    EXPECT_NEAR(m.completion_time(), 3.0, 1e-12);
    const auto p = m.pose_at(1.0);
    EXPECT_NEAR(rotation_angle_between(Mat3::Identity(), p.rotation()), deg(20), 1e-12);
    // The pivot point stays put.
    EXPECT_LE((p.apply(Vec3(0, 0, 0.15)) - Vec3(0, 0, 1.15)).norm(), 1e-12);
  }
}

TEST(Motion, Validation) {
  MotionScript m;
  m.speed = -1.0;
  EXPECT_EQ(error_of([&] { m.validate(); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(error_of([] { motion_kind_from_string("spin"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(motion_kind_from_string("yaw"), MotionKind::Yaw);
  EXPECT_EQ(to_string(MotionKind::SlideX), "slide_x");
}

TEST(Scenario, Validation) {
  Scenario s;
  s.duration = 0.0;
  EXPECT_EQ(error_of([&] { run_scenario(s); }), ErrorCode::ConfigInvalid);
  s = Scenario{};
  s.pipeline.capture_rate = 200.0;
  EXPECT_EQ(error_of([&] { run_scenario(s); }), ErrorCode::ConfigInvalid);
  s = Scenario{};
  s.pipeline.display_rate = 0.0;
  EXPECT_EQ(error_of([&] { run_scenario(s); }), ErrorCode::ConfigInvalid);
}

TEST(Pipeline, StaticConvergesToFixedPoint) {
  const Scenario s;
  const auto trace = run_scenario(s);
  ASSERT_TRUE(trace.tracking_acquired);
  const auto stats = trajectory_stats(trace, 1.0);
  EXPECT_GT(stats.samples, 300u);
  EXPECT_EQ(stats.rms_jitter, Vec2::Zero());
  EXPECT_EQ(stats.max_excursion, Vec2::Zero());
  EXPECT_LE(stats.mean_offset.norm(), 1e-6);
  for (const auto& smp : trace.samples) {
    if (smp.t < 1.0) continue;
    ASSERT_TRUE(smp.offset_px.has_value());
    EXPECT_LE(smp.offset_px->norm(), s.scene.deadband_px);
  }
}

TEST(Pipeline, SlideWithoutSteeringLosesTheScreen) {
  auto s = moving(MotionKind::SlideX, 0.05, 0.2);
  s.toggles.steer = false;
  const auto trace = run_scenario(s);
  const double half_width = 0.5 * s.scene.headset.screen.screen_w;
  double lost_at = -1.0;
  for (const auto& smp : trace.samples) {
    const bool off = !smp.markers_visible || !smp.center_screen_m || std::abs(smp.center_screen_m->x()) > half_width;
    if (off) {
      lost_at = smp.t;
      break;
    }
  }
  ASSERT_GE(lost_at, 0.0);
  EXPECT_LT(lost_at, s.motion.completion_time());
  EXPECT_FALSE(trace.samples.back().markers_visible);
}

TEST(Pipeline, SlideWithSteeringKeepsContentFixed) {
  const auto s = moving(MotionKind::SlideX, 0.05, 0.2);
  const auto trace = run_scenario(s);
  for (const auto& smp : trace.samples) EXPECT_TRUE(smp.markers_visible) << smp.t;
  const auto stats = trajectory_stats(trace, s.motion.completion_time() + 0.5);
  EXPECT_LE(stats.mean_offset.norm(), deadband_in_viewpoint_px(s, 1.0));
  EXPECT_LE(stats.rms_jitter.norm(), 1e-6);
}

TEST(Pipeline, RotationsStayTrackedWithAllStagesOn) {
  for (const auto kind : {MotionKind::Yaw, MotionKind::Pitch, MotionKind::Roll}) {
    const auto s = moving(kind, 20.0, 60.0);
    const auto trace = run_scenario(s);
    for (const auto& smp : trace.samples) EXPECT_TRUE(smp.markers_visible) << to_string(kind) << " " << smp.t;
  }
}

TEST(Pipeline, YawWithoutSteeringIsCutOff) {
  auto s = moving(MotionKind::Yaw, 20.0, 60.0);
  s.toggles.steer = false;
  const auto trace = run_scenario(s);
  EXPECT_FALSE(trace.samples.back().markers_visible);
  EXPECT_FALSE(trace.samples.back().center_px.has_value());
}

TEST(Pipeline, RefocusTracksEstimatedThrow) {
  for (double z : {0.89, 1.05, 1.27}) {
    const auto s = at_depth(z);
    const auto trace = run_scenario(s);
    std::size_t checked = 0;
    for (const auto& smp : trace.samples) {
      if (!smp.throw_estimate) continue;
      EXPECT_EQ(smp.lens_diopters, optics::focus_power_for_throw(*smp.throw_estimate, 0.0).diopters);
      EXPECT_NEAR(smp.lens_diopters, 1.0 / (z + s.scene.camera.axial_offset), 1e-9);
      ++checked;
    }
    EXPECT_GT(checked, 400u) << z;
  }
}

TEST(Pipeline, RefocusOffKeepsCalibrationFocus) {
  auto s = at_depth(1.27);
  s.toggles.refocus = false;
  const double expected = 1.0 / (s.scene.calibration_depth + s.scene.camera.axial_offset);
  for (const auto& smp : run_scenario(s).samples) EXPECT_DOUBLE_EQ(smp.lens_diopters, expected);
}

TEST(Pipeline, LatencyWithinQueueingBound) {
  const auto s = moving(MotionKind::Yaw, 20.0, 60.0);
  const auto& p = s.pipeline;
  const double lo = p.total_delay();
  const double hi = lo + 1.0 / p.capture_rate + 1.0 / p.detect_rate + 1.0 / p.display_rate;
  const auto trace = run_scenario(s);
  ASSERT_FALSE(trace.samples.empty());
  for (const auto& smp : trace.samples) {
    EXPECT_GE(smp.latency, lo - 1e-9) << smp.t;
    EXPECT_LE(smp.latency, hi + 1e-9) << smp.t;
  }
}

TEST(Pipeline, Causality) {
  const auto trace = run_scenario(moving(MotionKind::Pitch, 20.0, 60.0));
  for (std::size_t i = 1; i < trace.events.size(); ++i) EXPECT_GE(trace.events[i].t, trace.events[i - 1].t);
  for (const auto& smp : trace.samples) {
    EXPECT_LE(smp.capture_t, smp.t);
    EXPECT_NEAR(smp.latency, smp.t - smp.capture_t, 1e-12);
  }
  for (const auto& e : trace.events) {
    if (e.stage == Stage::Display) {
      ASSERT_GE(e.capture_id, 0);
      EXPECT_TRUE(e.latency.has_value());
    }
  }
}

TEST(Pipeline, CaptureCountMatchesRate) {
  for (double duration : {1.0, 2.5, 5.0}) {
    Scenario s;
    s.duration = duration;
    const auto trace = run_scenario(s);
    const double expected = std::floor(duration * s.pipeline.capture_rate);
    EXPECT_LE(std::abs(static_cast<double>(trace.capture_count) - expected), 1.0) << duration;
  }
}

TEST(Pipeline, SteeringRespectsSettleLockout) {
  const auto s = moving(MotionKind::Yaw, 20.0, 60.0);
  const auto trace = run_scenario(s);
  const auto& m = s.scene.projector.mirror;
  double last_t = -1.0;
  double theta = 0.0, phi = 0.0;
  int steers = 0;
  for (const auto& e : trace.events) {
    if (e.stage != Stage::Steer) continue;
    const double step = std::max(std::abs(*e.theta - theta), std::abs(*e.phi - phi));
    if (last_t >= 0.0) {
      EXPECT_GE(e.t + 1e-12, last_t);
    }
    last_t = e.t + steering::settle_time(m, step);
    theta = *e.theta;
    phi = *e.phi;
    EXPECT_NEAR(theta / m.step_resolution, std::round(theta / m.step_resolution), 1e-6);
    ++steers;
  }
  EXPECT_GT(steers, 10);
}

TEST(Pipeline, DeterministicTrace) {
  auto s = moving(MotionKind::Roll, 20.0, 60.0);
  s.scene.camera.noise_sigma = 0.5;
  s.pipeline.seed = 42;
  EXPECT_EQ(trace_csv(run_scenario(s)), trace_csv(run_scenario(s)));
  const auto a = trajectory_stats(run_scenario(s));
  const auto b = trajectory_stats(run_scenario(s));
  EXPECT_EQ(a.rms_jitter, b.rms_jitter);
  EXPECT_EQ(a.mean_offset, b.mean_offset);
  s.pipeline.seed = 43;
  const auto c = trajectory_stats(run_scenario(s));
  EXPECT_NE(a.rms_jitter, c.rms_jitter);
}

TEST(Pipeline, JitterScalesWithNoise) {
  std::vector<double> rms;
  for (double sigma : {0.25, 0.5, 1.0}) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Scenario s;
      s.scene.camera.noise_sigma = sigma;
      s.pipeline.seed = seed;
      sum += trajectory_stats(run_scenario(s), 1.0).rms_jitter.norm();
    }
    rms.push_back(sum / 5.0);
  }
  EXPECT_GT(rms[0], 0.0);
  EXPECT_NEAR(rms[1] / rms[0], 2.0, 0.4);
  EXPECT_NEAR(rms[2] / rms[1], 2.0, 0.4);
}

TEST(Pipeline, MeanLatencyStableAcrossSeeds) {
  double lo = 1e9, hi = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto s = moving(MotionKind::Yaw, 20.0, 60.0);
    s.scene.camera.noise_sigma = 0.2;
    s.pipeline.seed = seed;
    const double m = trajectory_stats(run_scenario(s)).mean_latency;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  EXPECT_LE((hi - lo) / lo, 0.05);
}

TEST(TrajectoryStats, NeedsTwoSamples) {
  EXPECT_EQ(error_of([] { trajectory_stats(PipelineTrace{}); }), ErrorCode::EmptyTrace);
  Scenario s;
  s.duration = 1.0;
  const auto trace = run_scenario(s);
  EXPECT_EQ(error_of([&] { trajectory_stats(trace, 5.0); }), ErrorCode::EmptyTrace);
}

TEST(TrajectoryStats, HandComputedValues) {
  PipelineTrace t;
  t.viewpoint_reference = Vec2(10, 20);
  const Vec2 centers[] = {Vec2(11, 20), Vec2(13, 20), Vec2(12, 23)};
  double time = 0.0;
  for (const auto& c : centers) {
    DisplaySample s{};
    s.t = time;
    s.latency = 0.01 * (time + 1.0);
    s.center_px = c;
    t.samples.push_back(s);
    time += 1.0;
  }
  const auto stats = trajectory_stats(t);
  EXPECT_EQ(stats.samples, 3u);
  EXPECT_NEAR(stats.mean_offset.x(), 2.0, 1e-12);
  EXPECT_NEAR(stats.mean_offset.y(), 1.0, 1e-12);
  EXPECT_NEAR(stats.rms_jitter.x(), std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(stats.rms_jitter.y(), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(stats.max_excursion.x(), 1.0, 1e-12);
  EXPECT_NEAR(stats.max_excursion.y(), 2.0, 1e-12);
  EXPECT_NEAR(stats.mean_latency, 0.02, 1e-12);
}

}  // namespace
}  // namespace beam::sim
