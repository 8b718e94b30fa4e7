#include "beam/pipeline.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include "beam/error.hpp"

namespace beam::sim {

std::string_view to_string(MotionKind k) {
  switch (k) {
    case MotionKind::Static: return "static";
    case MotionKind::SlideX: return "slide_x";
    case MotionKind::DepthZ: return "depth_z";
    case MotionKind::Yaw: return "yaw";
    case MotionKind::Pitch: return "pitch";
    case MotionKind::Roll: return "roll";
  }
  return "static";
}

MotionKind motion_kind_from_string(std::string_view s) {
  for (auto k : {MotionKind::Static, MotionKind::SlideX, MotionKind::DepthZ, MotionKind::Yaw,
                 MotionKind::Pitch, MotionKind::Roll}) {
    if (to_string(k) == s) return k;
  }
  fail(ErrorCode::ConfigInvalid, "unknown motion kind '" + std::string(s) + "'");
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Capture: return "capture";
    case Stage::Detect: return "detect";
    case Stage::Steer: return "steer";
    case Stage::Display: return "display";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Configuration

void MotionScript::validate() const {
  if (!(speed >= 0.0) || !std::isfinite(speed)) fail(ErrorCode::ConfigInvalid, "motion speed must be >= 0");
  if (!(extent >= 0.0) || !std::isfinite(extent)) fail(ErrorCode::ConfigInvalid, "motion extent must be >= 0");
  if (!std::isfinite(pivot_distance)) fail(ErrorCode::ConfigInvalid, "motion pivot must be finite");
  if (start_pose.from() != Frame::Headset || start_pose.to() != Frame::World) {
    fail(ErrorCode::ConfigInvalid, "start pose must map Headset to World");
  }
}

double MotionScript::completion_time() const {
  if (kind == MotionKind::Static || extent == 0.0) return 0.0;
  if (speed == 0.0) return std::numeric_limits<double>::infinity();
  return extent / speed;
}

RigidTransform MotionScript::pose_at(double t) const {
  const double progress = std::min(speed * std::max(t, 0.0), extent);
  const Mat3& r0 = start_pose.rotation();
  const Vec3& t0 = start_pose.translation();
  const auto rotate_about_pivot = [&](const Mat3& r) {
    const Vec3 pivot(0.0, 0.0, pivot_distance);
    return RigidTransform(r0 * r, t0 + r0 * (pivot - r * pivot), Frame::Headset, Frame::World);
  };
  switch (kind) {
    case MotionKind::Static: return start_pose;
    case MotionKind::SlideX: return {r0, t0 + Vec3(progress, 0, 0), Frame::Headset, Frame::World};
    case MotionKind::DepthZ: return {r0, t0 + Vec3(0, 0, progress), Frame::Headset, Frame::World};
    case MotionKind::Yaw: return rotate_about_pivot(rot_y(steering::deg_to_rad(progress)));
    case MotionKind::Pitch: return rotate_about_pivot(rot_x(steering::deg_to_rad(progress)));
    case MotionKind::Roll: return rotate_about_pivot(rot_z(steering::deg_to_rad(progress)));
  }
  return start_pose;
}

void PipelineConfig::validate() const {
  for (double r : {capture_rate, detect_rate, display_rate}) {
    if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::ConfigInvalid, "stage rates must be positive");
  }
  for (double d : {capture_delay_s(), detect_delay_s(), display_delay_s(), capture_phase, detect_phase, display_phase}) {
    if (!(d >= 0.0) || !std::isfinite(d)) fail(ErrorCode::ConfigInvalid, "stage delays and phases must be >= 0");
  }
}

Vec2 ViewpointCamera::project_screen_point(const Vec2& s) const {
  return intrinsics.project(Vec3(s.x(), s.y(), eye_distance));
}

steering::SteeringController SceneModel::controller() const {
  if (gain) return {deadband_px, *gain};
  return steering::SteeringController::from_camera(camera.intrinsics, projector.mirror, deadband_px);
}

void Scenario::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) fail(ErrorCode::ConfigInvalid, "duration must be positive");
  scene.projector.validate();
  scene.camera.validate();
  scene.headset.validate();
  scene.viewpoint.intrinsics.validate();
  if (!(scene.viewpoint.eye_distance > 0.0)) fail(ErrorCode::ConfigInvalid, "eye distance must be positive");
  if (!(scene.calibration_depth > 0.0)) fail(ErrorCode::ConfigInvalid, "calibration depth must be positive");
  scene.controller().validate();
  motion.validate();
  pipeline.validate();
  if (pipeline.capture_rate > scene.camera.frame_rate) {
    fail(ErrorCode::ConfigInvalid, "capture rate exceeds the camera frame rate");
  }
}

// ---------------------------------------------------------------------------
// Discrete-event simulation

namespace {

using Ns = std::int64_t;

Ns to_ns(double s) { return std::llround(s * 1e9); }
double to_s(Ns ns) { return static_cast<double>(ns) / 1e9; }

// Tie order at equal timestamps: capture < detect < display tick < display out.
TraceEvent make_event(double t, Stage stage, std::int64_t capture_id) {
  TraceEvent e{};
  e.t = t;
  e.stage = stage;
  e.capture_id = capture_id;
  return e;
}

enum class Kind { CaptureTick = 0, DetectTick = 1, DisplayTick = 2, DisplayDone = 3 };

struct Queued {
  Ns t;
  Kind kind;
  std::uint64_t seq;
  std::size_t payload;
};

struct Later {
  bool operator()(const Queued& a, const Queued& b) const {
    return std::tuple(a.t, static_cast<int>(a.kind), a.seq) > std::tuple(b.t, static_cast<int>(b.kind), b.seq);
  }
};

struct Capture {
  Ns t;
  Ns ready;
  std::int64_t theta_steps;
  std::int64_t phi_steps;
  MarkerSet markers;
};

struct Detection {
  std::size_t capture;
  Ns ready;
};

struct PendingFrame {
  std::size_t capture;
  std::optional<Vec2> target_px;  // content center on the projector raster
  std::optional<Vec2> offset_px;
  double lens;
  std::optional<double> throw_estimate;
};

class Simulation {
 public:
  explicit Simulation(const Scenario& s)
      : sc_(s),
        mirror_(s.scene.projector.mirror),
        controller_(s.scene.controller()),
        kp_(s.scene.projector.intrinsics()),
        kc_(s.scene.camera.intrinsics),
        rng_(s.pipeline.seed),
        camera_to_projector_(calibrate()) {
    lens_ = optics::focus_power_for_throw(s.scene.calibration_depth, s.scene.camera.axial_offset,
                                          s.scene.projector.lens)
                .diopters;
    trace_.viewpoint_reference = s.scene.viewpoint.project_screen_point(Vec2::Zero());
  }

  PipelineTrace run() {
    const auto& p = sc_.pipeline;
    duration_ = to_ns(sc_.duration);
    periods_ = {to_ns(1.0 / p.capture_rate), to_ns(1.0 / p.detect_rate), to_ns(1.0 / p.display_rate)};
    phases_ = {to_ns(p.capture_phase), to_ns(p.detect_phase), to_ns(p.display_phase)};
    delays_ = {to_ns(p.capture_delay_s()), to_ns(p.detect_delay_s()), to_ns(p.display_delay_s())};
    for (std::size_t i = 0; i < 3; ++i) schedule_tick(static_cast<Kind>(i), 0);

    while (!queue_.empty()) {
      const Queued q = queue_.top();
      queue_.pop();
      switch (q.kind) {
        case Kind::CaptureTick: on_capture(q); break;
        case Kind::DetectTick: on_detect(q); break;
        case Kind::DisplayTick: on_display_tick(q); break;
        case Kind::DisplayDone: on_display_done(q); break;
      }
    }
    trace_.capture_count = captures_.size();
    return std::move(trace_);
  }

 private:
  // Offline camera -> projector mapping: both rasters observing a
  // frontoparallel plane at the calibration depth.
  Homography calibrate() const {
    const double depth = sc_.scene.calibration_depth;
    const double offset = sc_.scene.camera.axial_offset;
    CorrespondenceSet pairs;
    const double w = kp_.width - 1.0;
    const double h = kp_.height - 1.0;
    for (const Vec2& px : {Vec2(0, 0), Vec2(w, 0), Vec2(w, h), Vec2(0, h), Vec2(0.5 * w, 0.5 * h)}) {
      const Vec3 ray = kp_.back_project(px);
      const Vec3 point = Vec3(0, 0, -offset) + (depth + offset) * ray;
      pairs.push_back({kc_.project(point), px});
    }
    return estimate_homography(pairs, beam::Frame::Camera, beam::Frame::Projector);
  }

  void schedule(Ns t, Kind kind, std::size_t payload = 0) { queue_.push({t, kind, seq_++, payload}); }

  void schedule_tick(Kind kind, std::int64_t index) {
    const auto i = static_cast<std::size_t>(kind);
    const Ns t = phases_[i] + index * periods_[i];
    if (t < duration_) schedule(t, kind, static_cast<std::size_t>(index));
  }

  // Angles the mirror physically holds at time t: the previous command until
  // the current one has settled.
  std::pair<std::int64_t, std::int64_t> effective_steps(double t) const {
    if (t < state_.busy_until) return {prev_theta_, prev_phi_};
    return {state_.theta_steps, state_.phi_steps};
  }

  Mat3 rotation_for(std::int64_t theta_steps, std::int64_t phi_steps) const {
    return steering::optical_rotation(mirror_, mirror_.angle(theta_steps), mirror_.angle(phi_steps));
  }

  // Re-expresses marker pixels seen at the capture mirror angles in the camera
  // image for the given mirror state (pure rotation about the camera center).
  MarkerSet compensate(const Capture& cap, const steering::MirrorState& s) const {
    const Mat3 h = kc_.matrix() * rotation_for(s.theta_steps, s.phi_steps).transpose() *
                   rotation_for(cap.theta_steps, cap.phi_steps) * kc_.inverse_matrix();
    MarkerSet out = cap.markers;
    for (auto& m : out) {
      for (auto& c : m.corners) {
        const Vec3 q = h * Vec3(c.x(), c.y(), 1.0);
        c = Vec2(q.x() / q.z(), q.y() / q.z());
      }
    }
    return out;
  }

  void on_capture(const Queued& q) {
    const double t = to_s(q.t);
    const auto [th, ph] = effective_steps(t);
    HeadsetModel headset = sc_.scene.headset;
    headset.pose = sc_.motion.pose_at(t);
    Capture cap{q.t, q.t + delays_[0], th, ph,
                observe_markers(sc_.scene.camera, headset, mirror_, mirror_.angle(th), mirror_.angle(ph), rng_)};
    const bool visible = !cap.markers.empty();
    trace_.tracking_acquired = trace_.tracking_acquired || visible;
    TraceEvent e = make_event(t, Stage::Capture, static_cast<std::int64_t>(captures_.size()));
    e.markers_visible = visible;
    trace_.events.push_back(e);
    captures_.push_back(std::move(cap));
    schedule_tick(Kind::CaptureTick, static_cast<std::int64_t>(q.payload) + 1);
  }

  void on_detect(const Queued& q) {
    schedule_tick(Kind::DetectTick, static_cast<std::int64_t>(q.payload) + 1);
    // Newest capture whose result is ready and that has not been consumed.
    std::optional<std::size_t> pick;
    for (std::size_t i = captures_.size(); i-- > next_capture_;) {
      if (captures_[i].ready <= q.t) {
        pick = i;
        break;
      }
    }
    if (!pick) return;
    next_capture_ = *pick + 1;
    const Capture& cap = captures_[*pick];
    detections_.push_back({*pick, q.t + delays_[1]});
    TraceEvent e = make_event(to_s(q.t), Stage::Detect, static_cast<std::int64_t>(*pick));
    e.markers_visible = !cap.markers.empty();
    if (!cap.markers.empty()) {
      try {
        e.offset_px = compute_screen_offset(cap.markers, sc_.scene.headset.markers, Vec2(kc_.cx, kc_.cy));
      } catch (const Error&) {
        e.offset_px.reset();
      }
    }
    trace_.events.push_back(e);
  }

  void on_display_tick(const Queued& q) {
    schedule_tick(Kind::DisplayTick, static_cast<std::int64_t>(q.payload) + 1);
    const double t = to_s(q.t);
    std::optional<std::size_t> pick;
    for (std::size_t i = detections_.size(); i-- > 0;) {
      if (detections_[i].ready <= q.t) {
        pick = i;
        break;
      }
    }
    if (!pick) return;
    const Capture& cap = captures_[detections_[*pick].capture];
    const auto& layout = sc_.scene.headset.markers;
    PendingFrame f{detections_[*pick].capture, std::nullopt, std::nullopt, lens_, std::nullopt};

    if (!cap.markers.empty()) {
      try {
        MarkerSet now = compensate(cap, state_);
        f.offset_px = compute_screen_offset(now, layout, Vec2(kc_.cx, kc_.cy));
        if (sc_.toggles.steer) {
          const auto r = steering::steer_update(controller_, mirror_, state_, *f.offset_px, t);
          if (r.commanded) {
            prev_theta_ = state_.theta_steps;
            prev_phi_ = state_.phi_steps;
            state_ = r.state;
            TraceEvent e = make_event(t, Stage::Steer, static_cast<std::int64_t>(f.capture));
            e.theta = state_.theta(mirror_);
            e.phi = state_.phi(mirror_);
            trace_.events.push_back(e);
            now = compensate(cap, state_);
          }
        }
        if (sc_.toggles.refocus) {
          const double throw_m = estimate_throw(cap.markers, sc_.scene.camera, layout);
          lens_ = optics::focus_power_for_throw(throw_m, 0.0, sc_.scene.projector.lens).diopters;
          f.lens = lens_;
          f.throw_estimate = throw_m;
        }
        if (sc_.toggles.warp) {
          const Homography screen_to_projector = compose(screen_homography(now, layout), camera_to_projector_);
          warp_target_ = apply_homography(screen_to_projector, Vec2::Zero());
        }
      } catch (const Error&) {
        // Degenerate marker geometry counts as a failed detection; the
        // previous warp and lens setting stay in effect.
      }
    }
    f.target_px = sc_.toggles.warp && warp_target_ ? *warp_target_ : Vec2(kp_.cx, kp_.cy);
    frames_.push_back(f);
    const Ns done = q.t + delays_[2];
    if (done < duration_) schedule(done, Kind::DisplayDone, frames_.size() - 1);
  }

  // Where a projector pixel lands on the screen at time t, in screen meters.
  std::optional<Vec2> land(const Vec2& projector_px, const Mat3& steer, const RigidTransform& pose) const {
    const Vec3 origin = steer * Vec3(0, 0, -sc_.scene.camera.axial_offset);
    const Vec3 dir = steer * kp_.back_project(projector_px);
    const Vec3 normal = pose.rotation().col(2);
    const double denom = dir.dot(normal);
    if (std::abs(denom) < 1e-12) return std::nullopt;
    const double s = (pose.translation() - origin).dot(normal) / denom;
    if (!(s > 0.0)) return std::nullopt;
    const Vec3 local = pose.rotation().transpose() * (origin + s * dir - pose.translation());
    return Vec2(local.x(), local.y());
  }

  void on_display_done(const Queued& q) {
    const double t = to_s(q.t);
    const PendingFrame& f = frames_[q.payload];
    const Capture& cap = captures_[f.capture];
    const auto [th, ph] = effective_steps(t);
    const Mat3 steer = rotation_for(th, ph);
    const RigidTransform pose = sc_.motion.pose_at(t);

    DisplaySample s{};
    s.t = t;
    s.capture_id = static_cast<std::int64_t>(f.capture);
    s.capture_t = to_s(cap.t);
    s.latency = to_s(q.t - cap.t);
    s.axis_screen_m = land(Vec2(kp_.cx, kp_.cy), steer, pose);
    if (f.target_px && kp_.contains(*f.target_px)) {
      s.center_screen_m = land(*f.target_px, steer, pose);
      if (s.center_screen_m) s.center_px = sc_.scene.viewpoint.project_screen_point(*s.center_screen_m);
    }
    s.offset_px = f.offset_px;
    s.theta = mirror_.angle(th);
    s.phi = mirror_.angle(ph);
    s.lens_diopters = f.lens;
    s.throw_estimate = f.throw_estimate;
    s.markers_visible = !cap.markers.empty();
    trace_.samples.push_back(s);

    TraceEvent e = make_event(t, Stage::Display, s.capture_id);
    e.center_px = s.center_px;
    e.offset_px = s.offset_px;
    e.theta = s.theta;
    e.phi = s.phi;
    e.lens_diopters = s.lens_diopters;
    e.markers_visible = s.markers_visible;
    e.latency = s.latency;
    trace_.events.push_back(e);
  }

  const Scenario& sc_;
  const steering::MirrorModel& mirror_;
  steering::SteeringController controller_;
  CameraIntrinsics kp_;
  CameraIntrinsics kc_;
  std::mt19937_64 rng_;
  Homography camera_to_projector_;

  std::priority_queue<Queued, std::vector<Queued>, Later> queue_;
  std::uint64_t seq_ = 0;
  Ns duration_ = 0;
  std::array<Ns, 3> periods_{};
  std::array<Ns, 3> phases_{};
  std::array<Ns, 3> delays_{};

  steering::MirrorState state_;
  std::int64_t prev_theta_ = 0;
  std::int64_t prev_phi_ = 0;
  double lens_ = 0.0;
  std::optional<Vec2> warp_target_;

  std::vector<Capture> captures_;
  std::size_t next_capture_ = 0;
  std::vector<Detection> detections_;
  std::vector<PendingFrame> frames_;
  PipelineTrace trace_;
};

}  // namespace

PipelineTrace run_scenario(const Scenario& scenario) {
  scenario.validate();
  return Simulation(scenario).run();
}

TrajectoryStats trajectory_stats(const PipelineTrace& trace, double from_t) {
  std::vector<const DisplaySample*> used;
  for (const auto& s : trace.samples)
    if (s.t >= from_t && s.center_px) used.push_back(&s);
  if (used.size() < 2) fail(ErrorCode::EmptyTrace, "trajectory statistics need at least 2 display samples");

  // Deviations are taken relative to the first sample so a constant
  // trajectory yields exactly zero spread.
  const Vec2 origin = *used.front()->center_px;
  const double n = static_cast<double>(used.size());
  Vec2 mean_d = Vec2::Zero();
  double latency = 0.0;
  for (const auto* s : used) {
    mean_d += *s->center_px - origin;
    latency += s->latency;
  }
  mean_d /= n;
  Vec2 sq = Vec2::Zero();
  Vec2 excursion = Vec2::Zero();
  for (const auto* s : used) {
    const Vec2 dev = (*s->center_px - origin) - mean_d;
    sq += dev.cwiseProduct(dev);
    excursion = excursion.cwiseMax(dev.cwiseAbs());
  }
  TrajectoryStats out;
  out.samples = used.size();
  out.mean_offset = (origin + mean_d) - trace.viewpoint_reference;
  out.rms_jitter = (sq / n).cwiseSqrt();
  out.max_excursion = excursion;
  out.mean_latency = latency / n;
  return out;
}

}  // namespace beam::sim
