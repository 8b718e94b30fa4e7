#include "beam/steering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "beam/error.hpp"

namespace beam::steering {

void MirrorModel::validate() const {
  if (!(step_resolution > 0.0)) fail(ErrorCode::InvalidArgument, "mirror step resolution must be positive");
  if (!(max_angle > 0.0)) fail(ErrorCode::InvalidArgument, "mirror max angle must be positive");
  if (!(beam_deflection_factor > 0.0)) fail(ErrorCode::InvalidArgument, "beam deflection factor must be positive");
  if (settle_points.empty()) fail(ErrorCode::InvalidArgument, "mirror needs at least one settle point");
  double prev = 0.0;
  for (const auto& p : settle_points) {
    if (!(p.step > prev)) fail(ErrorCode::InvalidArgument, "settle points must be strictly increasing in step");
    if (!(p.time >= 0.0)) fail(ErrorCode::InvalidArgument, "settle time must be non-negative");
    prev = p.step;
  }
}

std::int64_t MirrorModel::max_steps() const {
  return static_cast<std::int64_t>(std::floor(max_angle / step_resolution));
}

void SteeringController::validate() const {
  if (!(deadband >= 0.0)) fail(ErrorCode::InvalidArgument, "deadband must be non-negative");
  if (!(gain > 0.0)) fail(ErrorCode::InvalidArgument, "steering gain must be positive");
}

SteeringController SteeringController::from_camera(const CameraIntrinsics& cam, const MirrorModel& m,
                                                   double deadband) {
  cam.validate();
  m.validate();
  return {deadband, (1.0 / cam.fx) / m.beam_deflection_factor};
}

namespace {

void check_tangent(double angle) {
  if (!(std::abs(angle) < std::numbers::pi / 2.0) || std::abs(std::cos(angle)) < 1e-9) {
    fail(ErrorCode::TangentSingularity, "angle too close to +-90 degrees");
  }
}

}  // namespace

double image_shift_exact(double z, double theta, double dtheta) {
  check_tangent(theta);
  check_tangent(theta + dtheta);
  return z * (std::tan(theta + dtheta) - std::tan(theta));
}

double image_shift_approx(double z, double theta, double dtheta) {
  check_tangent(theta);
  check_tangent(theta + dtheta);
  const double c = std::cos(theta);
  return z * dtheta / (c * c);
}

double settle_time(const MirrorModel& m, double step) {
  m.validate();
  const double s = std::abs(step);
  double x0 = 0.0;
  double y0 = 0.0;
  for (const auto& p : m.settle_points) {
    if (s == p.step) return p.time;
    if (s < p.step) return y0 + (p.time - y0) * (s - x0) / (p.step - x0);
    x0 = p.step;
    y0 = p.time;
  }
  return m.settle_points.back().time;
}

std::int64_t quantize_steps(const MirrorModel& m, double angle) {
  return static_cast<std::int64_t>(std::round(angle / m.step_resolution));
}

double quantize_angle(const MirrorModel& m, double angle) {
  m.validate();
  if (!(std::abs(angle) <= m.max_angle)) fail(ErrorCode::OutOfRange, "mirror angle outside range");
  return m.angle(quantize_steps(m, angle));
}

SteerResult steer_update(const SteeringController& c, const MirrorModel& m, const MirrorState& state,
                         const Vec2& offset_px, double now) {
  c.validate();
  m.validate();
  if (offset_px.norm() <= c.deadband || now < state.busy_until) return {state, false};

  const std::int64_t limit = m.max_steps();
  MirrorState next = state;
  next.theta_steps = std::clamp(state.theta_steps + quantize_steps(m, c.gain * offset_px.x()), -limit, limit);
  next.phi_steps = std::clamp(state.phi_steps + quantize_steps(m, c.gain * offset_px.y()), -limit, limit);
  const std::int64_t moved = std::max(std::abs(next.theta_steps - state.theta_steps),
                                      std::abs(next.phi_steps - state.phi_steps));
  next.busy_until = now + settle_time(m, m.angle(moved));
  return {next, true};
}

ErrorBudget mirror_error_budget(const MirrorModel& m, double z, double theta, double repeatability,
                                double image_height) {
  m.validate();
  if (!(image_height > 0.0)) fail(ErrorCode::NonPositiveInput, "image height must be positive");
  const double shift = image_shift_exact(z, theta, m.beam_deflection_factor * repeatability);
  return {shift, shift / image_height};
}

Mat3 optical_rotation(const MirrorModel& m, double theta, double phi) {
  const double k = m.beam_deflection_factor;
  return rot_y(k * theta) * rot_x(-k * phi);
}

}  // namespace beam::steering
