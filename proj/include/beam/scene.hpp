#pragma once

#include <array>
#include <random>
#include <vector>

#include "beam/geometry.hpp"
#include "beam/optics.hpp"
#include "beam/steering.hpp"

namespace beam::sim {

// Steering projector: DMD raster behind the 4F relay, tunable lens and mirror.
// The projection cone is the horizontal FoV of the raster through the mirror.
struct ProjectorModel {
  int width = 854;
  int height = 480;
  double cone_deg = 8.0;
  optics::FourFSystem optics;
  optics::TunableLens lens;
  steering::MirrorModel mirror;

  void validate() const;
  CameraIntrinsics intrinsics() const;
};

// Camera sharing the projector's optical path. Its center sits on the mirror
// pivot; the projector's optical center lies axial_offset behind it along the
// same axis, so projector throw = camera distance + axial_offset.
struct TrackingCamera {
  // 1032 x 772 half-resolution frames behind a 50 mm lens (6.9 um binned pixels).
  CameraIntrinsics intrinsics{7246.0, 7246.0, 515.5, 385.5, 1032, 772};
  double frame_rate = 165.0;  // Hz
  double axial_offset = 0.02; // meters
  double noise_sigma = 0.0;   // pixels

  void validate() const;
};

// Square fiducials on the headset, positioned in the screen frame (origin at
// the active-area center, x right, y down, z away from the projector).
struct MarkerLayout {
  double marker_size = 0.010;
  std::vector<Vec2> centers;

  // Corners in order top-left, top-right, bottom-right, bottom-left.
  std::array<Vec2, 4> corners(std::size_t id) const;

  // Four markers just outside the corners of the active area.
  static MarkerLayout around_screen(double screen_w, double screen_h, double marker_size = 0.010,
                                    double gap = 0.002);
};

struct HeadsetModel {
  optics::EyepieceModel screen;
  MarkerLayout markers = MarkerLayout::around_screen(0.030, 0.020);
  // World-from-headset; the headset frame is the screen frame.
  RigidTransform pose = RigidTransform::translation(Vec3(0, 0, 1.0), Frame::Headset, Frame::World);

  void validate() const;
};

struct MarkerObservation {
  std::size_t id;
  std::array<Vec2, 4> corners;
};

using MarkerSet = std::vector<MarkerObservation>;

// Pinhole projection of every marker through the steered co-axial camera at
// mirror angles (theta, phi), with isotropic Gaussian pixel noise. Markers not
// entirely inside the frame (or behind the camera) are dropped.
MarkerSet observe_markers(const TrackingCamera& cam, const HeadsetModel& headset,
                          const steering::MirrorModel& mirror, double theta, double phi,
                          std::mt19937_64& rng);

// Homography from screen-frame meters to camera pixels fitted on every
// visible marker corner.
Homography screen_homography(const MarkerSet& markers, const MarkerLayout& layout);

// Screen center in the camera image minus the projection center.
Vec2 compute_screen_offset(const MarkerSet& markers, const MarkerLayout& layout,
                           const Vec2& projection_center);

// Camera-to-screen distance from planar pose, plus the camera's axial offset.
double estimate_throw(const MarkerSet& markers, const TrackingCamera& cam, const MarkerLayout& layout);

}  // namespace beam::sim
