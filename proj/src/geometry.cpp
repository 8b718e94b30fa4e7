#include "beam/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "beam/error.hpp"

namespace beam {

const char* to_string(Frame f) noexcept {
  switch (f) {
    case Frame::World: return "World";
    case Frame::Projector: return "Projector";
    case Frame::Camera: return "Camera";
    case Frame::Screen: return "Screen";
    case Frame::Headset: return "Headset";
    case Frame::Mirror: return "Mirror";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Rigid transforms

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation,
                               Frame from, Frame to)
    : rotation_(rotation), translation_(translation), from_(from), to_(to) {
  const double ortho = (rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = rotation.determinant();
  if (!(ortho <= 1e-9) || !(std::abs(det - 1.0) <= 1e-9)) {
    fail(ErrorCode::InvalidArgument, "rotation is not a proper orthonormal matrix");
  }
  if (!translation.allFinite()) {
    fail(ErrorCode::InvalidArgument, "translation is not finite");
  }
}

RigidTransform RigidTransform::identity(Frame frame) {
  return {Mat3::Identity(), Vec3::Zero(), frame, frame};
}

RigidTransform RigidTransform::translation(const Vec3& t, Frame from, Frame to) {
  return {Mat3::Identity(), t, from, to};
}

RigidTransform RigidTransform::rotation(const Mat3& r, Frame from, Frame to) {
  return {r, Vec3::Zero(), from, to};
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  if (a.to() != b.from()) {
    fail(ErrorCode::FrameMismatch, std::string("cannot chain ") + to_string(a.from()) +
                                       "->" + to_string(a.to()) + " with " +
                                       to_string(b.from()) + "->" + to_string(b.to()));
  }
  return {b.rotation() * a.rotation(), b.rotation() * a.translation() + b.translation(),
          a.from(), b.to()};
}

RigidTransform invert(const RigidTransform& t) {
  const Mat3 rt = t.rotation().transpose();
  return {rt, -(rt * t.translation()), t.to(), t.from()};
}

Mat3 rot_x(double a) {
  Mat3 r;
  r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return r;
}

Mat3 rot_y(double a) {
  Mat3 r;
  r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return r;
}

Mat3 rot_z(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

double rotation_angle_between(const Mat3& a, const Mat3& b) {
  const Mat3 rel = a.transpose() * b;
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  // acos is ill-conditioned near zero; use the skew part there.
  const Vec3 w(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  return std::atan2(0.5 * w.norm(), c);
}

// ---------------------------------------------------------------------------
// Homographies

namespace {

Mat3 normalize_scale(const Mat3& h) {
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  h.cwiseAbs().maxCoeff(&r, &c);
  const double s = h(r, c);
  if (!std::isfinite(s) || s == 0.0) {
    fail(ErrorCode::DegenerateHomography, "homography has no finite nonzero entry");
  }
  return h / s;
}

}  // namespace

Homography::Homography(const Mat3& h, Frame from, Frame to)
    : h_(normalize_scale(h)), from_(from), to_(to) {
  if (!h_.allFinite() || std::abs(h_.determinant()) < 1e-14) {
    fail(ErrorCode::DegenerateHomography, "homography is singular");
  }
}

Homography Homography::identity(Frame from, Frame to) {
  return Homography(Mat3::Identity(), from, to);
}

Homography Homography::inverse() const {
  return Homography(h_.inverse(), to_, from_);
}

Homography compose(const Homography& a, const Homography& b) {
  if (a.to() != b.from()) {
    fail(ErrorCode::FrameMismatch, std::string("cannot chain homography ") +
                                       to_string(a.to()) + " into " + to_string(b.from()));
  }
  return Homography(b.matrix() * a.matrix(), a.from(), b.to());
}

Vec2 apply_homography(const Homography& h, const Vec2& p) {
  const Vec3 q = h.matrix() * Vec3(p.x(), p.y(), 1.0);
  if (std::abs(q.z()) < 1e-12) {
    fail(ErrorCode::PointAtInfinity, "point maps to infinity");
  }
  return {q.x() / q.z(), q.y() / q.z()};
}

namespace {

// Similarity taking points to centroid 0 and mean distance sqrt(2).
Mat3 isotropic_normalizer(std::span<const Correspondence> pairs, bool source) {
  Vec2 centroid = Vec2::Zero();
  for (const auto& c : pairs) centroid += source ? c.source : c.target;
  centroid /= static_cast<double>(pairs.size());
  double mean_dist = 0.0;
  for (const auto& c : pairs) mean_dist += ((source ? c.source : c.target) - centroid).norm();
  mean_dist /= static_cast<double>(pairs.size());
  if (!(mean_dist > 0.0) || !std::isfinite(mean_dist)) {
    fail(ErrorCode::DegenerateConfiguration, "all points coincide");
  }
  const double s = std::sqrt(2.0) / mean_dist;
  Mat3 t;
  t << s, 0, -s * centroid.x(), 0, s, -s * centroid.y(), 0, 0, 1;
  return t;
}

bool collinear(const Vec2& a, const Vec2& b, const Vec2& c, double scale) {
  const Vec2 u = b - a;
  const Vec2 v = c - a;
  return std::abs(u.x() * v.y() - u.y() * v.x()) <= 1e-12 * scale * scale;
}

}  // namespace

Homography estimate_homography(std::span<const Correspondence> pairs, Frame from, Frame to) {
  const auto n = static_cast<Eigen::Index>(pairs.size());
  if (n < 4) {
    fail(ErrorCode::InsufficientCorrespondences,
         "homography needs at least 4 correspondences, got " + std::to_string(n));
  }
  const Mat3 ts = isotropic_normalizer(pairs, true);
  const Mat3 tt = isotropic_normalizer(pairs, false);

  if (n == 4) {
    for (const bool src : {true, false}) {
      for (int skip = 0; skip < 4; ++skip) {
        std::vector<Vec2> p;
        for (int i = 0; i < 4; ++i)
          if (i != skip) p.push_back(src ? pairs[i].source : pairs[i].target);
        const double scale = std::max({p[0].norm(), p[1].norm(), p[2].norm(), 1.0});
        if (collinear(p[0], p[1], p[2], scale)) {
          fail(ErrorCode::DegenerateConfiguration, "three of four points are collinear");
        }
      }
    }
  }

  // Two rows per correspondence; rows are padded to at least 9 so the full
  // right singular basis is available. Tall systems are reduced by QR first.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(2 * n, 9), 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 s = ts * pairs[i].source.homogeneous();
    const Vec3 t = tt * pairs[i].target.homogeneous();
    const double x = s.x() / s.z(), y = s.y() / s.z();
    const double u = t.x() / t.z(), v = t.y() / t.z();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  Eigen::Matrix<double, 9, 9> r;
  if (a.rows() > 9) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    r = qr.matrixQR().topRows(9).triangularView<Eigen::Upper>();
  } else {
    r = a;
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 9, 9>> svd(r, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(7) > 1e-10 * sv(0))) {
    fail(ErrorCode::DegenerateConfiguration, "design matrix is rank deficient");
  }
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Mat3 denorm = tt.inverse() * hn * ts;
  if (std::abs(normalize_scale(denorm).determinant()) < 1e-14) {
    fail(ErrorCode::DegenerateConfiguration, "estimated homography is singular");
  }
  return Homography(denorm, from, to);
}

// ---------------------------------------------------------------------------
// Camera intrinsics and planar pose

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) fail(ErrorCode::InvalidArgument, "focal lengths must be positive");
  if (width <= 0 || height <= 0) fail(ErrorCode::InvalidArgument, "resolution must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    fail(ErrorCode::InvalidArgument, "principal point outside the image");
  }
}

Mat3 CameraIntrinsics::matrix() const {
  Mat3 k;
  k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
  return k;
}

Mat3 CameraIntrinsics::inverse_matrix() const {
  Mat3 k;
  k << 1.0 / fx, 0, -cx / fx, 0, 1.0 / fy, -cy / fy, 0, 0, 1;
  return k;
}

Vec2 CameraIntrinsics::project(const Vec3& p) const {
  return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
}

Vec3 CameraIntrinsics::back_project(const Vec2& px) const {
  return {(px.x() - cx) / fx, (px.y() - cy) / fy, 1.0};
}

bool CameraIntrinsics::contains(const Vec2& px) const {
  return px.x() >= -0.5 && px.x() < width - 0.5 && px.y() >= -0.5 && px.y() < height - 0.5;
}

RigidTransform planar_pose_from_homography(const Homography& h, const CameraIntrinsics& k,
                                           double plane_scale, Frame plane, Frame camera) {
  k.validate();
  if (!(plane_scale > 0.0)) fail(ErrorCode::NonPositiveInput, "plane scale must be positive");
  const Mat3 m = k.inverse_matrix() * h.matrix();
  const double n1 = m.col(0).norm();
  const double n2 = m.col(1).norm();
  const double norm = 0.5 * (n1 + n2);
  if (!(norm > 0.0)) fail(ErrorCode::DegenerateConfiguration, "homography has null rotation columns");

  Vec3 r1 = m.col(0) / norm;
  Vec3 r2 = m.col(1) / norm;
  Vec3 t = m.col(2) * (plane_scale / norm);
  if (std::abs(t.z()) < 1e-12) {
    fail(ErrorCode::BehindCamera, "plane passes through the camera center");
  }
  if (t.z() < 0.0) {
    r1 = -r1;
    r2 = -r2;
    t = -t;
  }
  Mat3 approx;
  approx.col(0) = r1;
  approx.col(1) = r2;
  approx.col(2) = r1.cross(r2);
  return {nearest_rotation(approx), t, plane, camera};
}

}  // namespace beam
