#pragma once

#include <Eigen/Core>
#include <span>
#include <utility>
#include <vector>

namespace beam {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Named coordinate frames of the steering projector rig.
enum class Frame { World, Projector, Camera, Screen, Headset, Mirror };

const char* to_string(Frame f) noexcept;

// Proper rigid motion mapping points expressed in `from()` into `to()`:
//   x_to = rotation * x_from + translation
// Units are meters. Construction validates orthonormality and det = +1.
class RigidTransform {
 public:
  RigidTransform(const Mat3& rotation, const Vec3& translation, Frame from,
                 Frame to);

  static RigidTransform identity(Frame frame);
  static RigidTransform translation(const Vec3& t, Frame from, Frame to);
  static RigidTransform rotation(const Mat3& r, Frame from, Frame to);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Frame from() const { return from_; }
  Frame to() const { return to_; }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }

 private:
  Mat3 rotation_;
  Vec3 translation_;
  Frame from_;
  Frame to_;
};

// Applies `a` first, then `b`. Requires a.to() == b.from().
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);

// Elementary rotations (right-handed, angle in radians).
Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

// Closest proper rotation in the Frobenius sense (polar decomposition via SVD).
Mat3 nearest_rotation(const Mat3& m);

// Angle of the relative rotation a^T b, in radians.
double rotation_angle_between(const Mat3& a, const Mat3& b);

// 3x3 projective map between planes, stored scale-normalized so that the
// largest-magnitude entry equals +1.
class Homography {
 public:
  explicit Homography(const Mat3& h, Frame from = Frame::Screen,
                      Frame to = Frame::Camera);

  static Homography identity(Frame from = Frame::Screen, Frame to = Frame::Camera);

  const Mat3& matrix() const { return h_; }
  Frame from() const { return from_; }
  Frame to() const { return to_; }

  Homography inverse() const;

 private:
  Mat3 h_;
  Frame from_;
  Frame to_;
};

// Applies `a` first, then `b`.
Homography compose(const Homography& a, const Homography& b);

Vec2 apply_homography(const Homography& h, const Vec2& p);

struct Correspondence {
  Vec2 source;
  Vec2 target;
};

using CorrespondenceSet = std::vector<Correspondence>;

// Normalized DLT: both point sets are translated to their centroid and scaled
// to mean distance sqrt(2) before the null-space solve.
Homography estimate_homography(std::span<const Correspondence> pairs,
                               Frame from = Frame::Screen,
                               Frame to = Frame::Camera);

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;
  Mat3 matrix() const;
  Mat3 inverse_matrix() const;
  // Pinhole projection of a camera-frame point (camera looks down +z).
  Vec2 project(const Vec3& p) const;
  // Unit-depth ray through a pixel.
  Vec3 back_project(const Vec2& pixel) const;
  // True when the pixel lies in [-0.5, w - 0.5) x [-0.5, h - 0.5).
  bool contains(const Vec2& pixel) const;
};

// Camera-from-plane pose for a homography mapping plane units to pixels.
// plane_scale converts plane units to meters.
RigidTransform planar_pose_from_homography(const Homography& h,
                                           const CameraIntrinsics& k,
                                           double plane_scale = 1.0,
                                           Frame plane = Frame::Screen,
                                           Frame camera = Frame::Camera);

}  // namespace beam
