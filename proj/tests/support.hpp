#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "beam/error.hpp"
#include "beam/geometry.hpp"

namespace beam::test {

inline constexpr double kPi = std::numbers::pi;

inline double deg(double d) { return d * kPi / 180.0; }

// Runs `body` and returns the ErrorCode it throws; fails the test if it
// returns normally.
template <class F>
ErrorCode error_of(F&& body) {
  try {
    body();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected beam::Error";
  return ErrorCode::Io;
}

// Rotation about a random unit axis by an angle drawn from [0, max_angle].
inline Mat3 random_rotation(std::mt19937_64& rng, double max_angle) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, max_angle);
  Vec3 axis(n(rng), n(rng), n(rng));
  axis.normalize();
  return Eigen::AngleAxisd(u(rng), axis).toRotationMatrix();
}

// Well-conditioned projective map of a ~1000 px image onto itself.
inline Mat3 random_homography(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double s = 1.0 + 0.3 * u(rng);
  const double a = 0.5 * u(rng);
  Mat3 h;
  h << s * std::cos(a) + 0.05 * u(rng), -s * std::sin(a) + 0.05 * u(rng), 100.0 * u(rng),
      s * std::sin(a) + 0.05 * u(rng), s * std::cos(a) + 0.05 * u(rng), 100.0 * u(rng), 2e-4 * u(rng),
      2e-4 * u(rng), 1.0;
  return h;
}

inline Vec2 apply_matrix(const Mat3& h, const Vec2& p) {
  const Vec3 q = h * Vec3(p.x(), p.y(), 1.0);
  return {q.x() / q.z(), q.y() / q.z()};
}

}  // namespace beam::test
