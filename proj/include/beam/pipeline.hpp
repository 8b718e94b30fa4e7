#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "beam/scene.hpp"

namespace beam::sim {

enum class MotionKind { Static, SlideX, DepthZ, Yaw, Pitch, Roll };

std::string_view to_string(MotionKind k);
MotionKind motion_kind_from_string(std::string_view s);

// Headset motion: runs at `speed` until `extent` is covered, then holds.
// Translations are in meters (world axes); rotations are in degrees about the
// headset's own axes through a pivot `pivot_distance` behind the screen.
struct MotionScript {
  MotionKind kind = MotionKind::Static;
  double speed = 0.0;
  double extent = 0.0;
  double pivot_distance = 0.15;
  RigidTransform start_pose = RigidTransform::translation(Vec3(0, 0, 1.0), Frame::Headset, Frame::World);

  void validate() const;
  RigidTransform pose_at(double t) const;
  // Time at which the motion extent is reached.
  double completion_time() const;
};

struct PipelineConfig {
  double capture_rate = 130.0;
  double detect_rate = 130.0;
  double display_rate = 100.0;
  // Unset delays default to one period of the stage.
  std::optional<double> capture_delay;
  std::optional<double> detect_delay;
  std::optional<double> display_delay;
  double capture_phase = 0.0;
  double detect_phase = 0.0;
  double display_phase = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
  double capture_delay_s() const { return capture_delay.value_or(1.0 / capture_rate); }
  double detect_delay_s() const { return detect_delay.value_or(1.0 / detect_rate); }
  double display_delay_s() const { return display_delay.value_or(1.0 / display_rate); }
  double total_delay() const { return capture_delay_s() + detect_delay_s() + display_delay_s(); }
};

struct Toggles {
  bool warp = true;
  bool steer = true;
  bool refocus = true;
};

// Pinhole camera rigidly attached to the headset at the design eye position,
// looking at the screen along +z from eye_distance in front of it.
struct ViewpointCamera {
  CameraIntrinsics intrinsics{1000.0, 1000.0, 515.5, 385.5, 1032, 772};
  double eye_distance = 0.06;

  Vec2 project_screen_point(const Vec2& screen_m) const;
};

struct SceneModel {
  ProjectorModel projector;
  TrackingCamera camera;
  HeadsetModel headset;
  ViewpointCamera viewpoint;
  double deadband_px = 2.0;
  std::optional<double> gain;  // rad/px; derived from the camera when unset
  double calibration_depth = 1.0;

  steering::SteeringController controller() const;
};

struct Scenario {
  SceneModel scene;
  MotionScript motion;
  PipelineConfig pipeline;
  Toggles toggles;
  double duration = 5.0;

  void validate() const;
};

enum class Stage { Capture, Detect, Steer, Display };

std::string_view to_string(Stage s);

struct TraceEvent {
  double t;
  Stage stage;
  std::int64_t capture_id = -1;
  std::optional<Vec2> center_px;
  std::optional<Vec2> offset_px;
  std::optional<double> theta;
  std::optional<double> phi;
  std::optional<double> lens_diopters;
  std::optional<bool> markers_visible;
  std::optional<double> latency;
};

struct DisplaySample {
  double t;
  std::int64_t capture_id;
  double capture_t;
  double latency;
  // Content center in viewpoint pixels; empty when the warp target falls off
  // the projector raster (the image is cut off) or the ray misses the screen.
  std::optional<Vec2> center_px;
  std::optional<Vec2> center_screen_m;
  // Where the projector's principal ray meets the screen plane, screen frame.
  std::optional<Vec2> axis_screen_m;
  std::optional<Vec2> offset_px;
  double theta;
  double phi;
  double lens_diopters;
  std::optional<double> throw_estimate;
  bool markers_visible;
};

struct PipelineTrace {
  std::vector<TraceEvent> events;
  std::vector<DisplaySample> samples;
  Vec2 viewpoint_reference = Vec2::Zero();  // screen center in viewpoint pixels
  std::size_t capture_count = 0;
  bool tracking_acquired = false;  // any capture saw a marker
};

PipelineTrace run_scenario(const Scenario& scenario);

struct TrajectoryStats {
  std::size_t samples = 0;
  Vec2 mean_offset = Vec2::Zero();    // content center minus screen center, viewpoint px
  Vec2 rms_jitter = Vec2::Zero();     // standard deviation about the mean
  Vec2 max_excursion = Vec2::Zero();  // largest |deviation| from the mean
  double mean_latency = 0.0;
};

// Statistics over display samples at or after `from_t` that carry a center.
TrajectoryStats trajectory_stats(const PipelineTrace& trace, double from_t = 0.0);

}  // namespace beam::sim
