#include "beam/scene.hpp"

#include <cmath>

#include "beam/error.hpp"

namespace beam::sim {

void ProjectorModel::validate() const {
  if (width <= 0 || height <= 0) fail(ErrorCode::ConfigInvalid, "projector resolution must be positive");
  optics.validate();
  lens.validate();
  mirror.validate();
  const double optical_half = steering::rad_to_deg(mirror.max_angle * mirror.beam_deflection_factor);
  if (!(cone_deg > 0.0) || !(cone_deg < 2.0 * optical_half)) {
    fail(ErrorCode::ConfigInvalid, "projection cone must be positive and within the mirror range");
  }
}

CameraIntrinsics ProjectorModel::intrinsics() const {
  const double f = 0.5 * width / std::tan(steering::deg_to_rad(0.5 * cone_deg));
  return {f, f, 0.5 * (width - 1), 0.5 * (height - 1), width, height};
}

void TrackingCamera::validate() const {
  intrinsics.validate();
  if (!(frame_rate > 0.0)) fail(ErrorCode::ConfigInvalid, "camera frame rate must be positive");
  if (!(noise_sigma >= 0.0)) fail(ErrorCode::ConfigInvalid, "camera noise must be non-negative");
  if (!std::isfinite(axial_offset)) fail(ErrorCode::ConfigInvalid, "camera axial offset must be finite");
}

std::array<Vec2, 4> MarkerLayout::corners(std::size_t id) const {
  const Vec2 c = centers.at(id);
  const double h = 0.5 * marker_size;
  return {Vec2(c.x() - h, c.y() - h), Vec2(c.x() + h, c.y() - h), Vec2(c.x() + h, c.y() + h),
          Vec2(c.x() - h, c.y() + h)};
}

MarkerLayout MarkerLayout::around_screen(double screen_w, double screen_h, double marker_size, double gap) {
  const double ox = 0.5 * screen_w + gap + 0.5 * marker_size;
  const double oy = 0.5 * screen_h + gap + 0.5 * marker_size;
  return {marker_size, {Vec2(-ox, -oy), Vec2(ox, -oy), Vec2(ox, oy), Vec2(-ox, oy)}};
}

void HeadsetModel::validate() const {
  screen.validate();
  if (!(markers.marker_size > 0.0)) fail(ErrorCode::ConfigInvalid, "marker size must be positive");
  if (markers.centers.size() < 2) fail(ErrorCode::ConfigInvalid, "headset needs at least 2 markers");
  if (pose.from() != Frame::Headset || pose.to() != Frame::World) {
    fail(ErrorCode::FrameMismatch, "headset pose must map Headset to World");
  }
  const double hw = 0.5 * screen.screen_w;
  const double hh = 0.5 * screen.screen_h;
  for (std::size_t i = 0; i < markers.centers.size(); ++i) {
    const auto c = markers.corners(i);
    const bool apart = c[1].x() <= -hw || c[0].x() >= hw || c[2].y() <= -hh || c[0].y() >= hh;
    if (!apart) fail(ErrorCode::ConfigInvalid, "marker overlaps the active screen area");
  }
}

MarkerSet observe_markers(const TrackingCamera& cam, const HeadsetModel& headset,
                          const steering::MirrorModel& mirror, double theta, double phi,
                          std::mt19937_64& rng) {
  cam.validate();
  const Mat3 steer = steering::optical_rotation(mirror, theta, phi);
  const RigidTransform camera_from_world = RigidTransform::rotation(steer.transpose(), Frame::World, Frame::Camera);
  const RigidTransform camera_from_headset = compose(headset.pose, camera_from_world);
  std::normal_distribution<double> noise(0.0, 1.0);

  MarkerSet out;
  for (std::size_t id = 0; id < headset.markers.centers.size(); ++id) {
    const auto plane = headset.markers.corners(id);
    MarkerObservation obs{id, {}};
    bool visible = true;
    for (std::size_t k = 0; k < 4; ++k) {
      const Vec3 p = camera_from_headset.apply(Vec3(plane[k].x(), plane[k].y(), 0.0));
      // Noise is drawn for every corner so the random stream does not depend on visibility.
      const Vec2 n(noise(rng), noise(rng));
      if (!(p.z() > 1e-9)) {
        visible = false;
        continue;
      }
      obs.corners[k] = cam.intrinsics.project(p) + cam.noise_sigma * n;
      if (!cam.intrinsics.contains(obs.corners[k])) visible = false;
    }
    if (visible) out.push_back(obs);
  }
  return out;
}

Homography screen_homography(const MarkerSet& markers, const MarkerLayout& layout) {
  if (markers.empty()) fail(ErrorCode::NoMarkersVisible, "no markers visible");
  CorrespondenceSet pairs;
  for (const auto& m : markers) {
    const auto plane = layout.corners(m.id);
    for (std::size_t k = 0; k < 4; ++k) pairs.push_back({plane[k], m.corners[k]});
  }
  return estimate_homography(pairs, Frame::Screen, Frame::Camera);
}

Vec2 compute_screen_offset(const MarkerSet& markers, const MarkerLayout& layout, const Vec2& projection_center) {
  return apply_homography(screen_homography(markers, layout), Vec2::Zero()) - projection_center;
}

double estimate_throw(const MarkerSet& markers, const TrackingCamera& cam, const MarkerLayout& layout) {
  const auto pose = planar_pose_from_homography(screen_homography(markers, layout), cam.intrinsics, 1.0,
                                                Frame::Screen, Frame::Camera);
  return pose.translation().z() + cam.axial_offset;
}

}  // namespace beam::sim
