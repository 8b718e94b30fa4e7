#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "beam/geometry.hpp"

namespace beam::steering {

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct SettlePoint {
  double step;  // radians (mechanical)
  double time;  // seconds
};

// Two-axis voice-coil steering mirror. Angles are mechanical; the reflected
// beam moves by beam_deflection_factor times the mechanical angle.
struct MirrorModel {
  double step_resolution = 22e-6;
  // 7.5 deg mechanical = 15 deg optical half-cone with the default factor of
  // 2, i.e. the 30 x 30 deg projection cone.
  double max_angle = deg_to_rad(7.5);
  std::vector<SettlePoint> settle_points{{deg_to_rad(0.1), 0.002}, {deg_to_rad(20.0), 0.012}};
  double beam_deflection_factor = 2.0;

  void validate() const;
  // Largest reachable step count per axis.
  std::int64_t max_steps() const;
  double angle(std::int64_t steps) const { return static_cast<double>(steps) * step_resolution; }
};

// Mirror angles are held as integer step counts so they are exact multiples of
// the step resolution.
struct MirrorState {
  std::int64_t theta_steps = 0;
  std::int64_t phi_steps = 0;
  double busy_until = 0.0;  // seconds

  double theta(const MirrorModel& m) const { return m.angle(theta_steps); }
  double phi(const MirrorModel& m) const { return m.angle(phi_steps); }
  bool operator==(const MirrorState&) const = default;
};

// Offset-driven sequential controller.
struct SteeringController {
  double deadband = 2.0;  // pixels
  double gain = 0.0;      // radians per pixel

  void validate() const;
  // One commanded step nominally cancels one observed pixel:
  // gain = camera angular pitch / deflection factor.
  static SteeringController from_camera(const CameraIntrinsics& cam, const MirrorModel& m,
                                        double deadband = 2.0);
};

struct SteerResult {
  MirrorState state;
  bool commanded;
};

// z (tan(theta + dtheta) - tan(theta)).
double image_shift_exact(double z, double theta, double dtheta);
// First-order form z dtheta / cos^2 theta.
double image_shift_approx(double z, double theta, double dtheta);

// Piecewise linear over |step| with an implicit (0, 0) knot, clamped beyond
// the last knot.
double settle_time(const MirrorModel& m, double step);

// Nearest step count; ties round away from zero.
std::int64_t quantize_steps(const MirrorModel& m, double angle);
double quantize_angle(const MirrorModel& m, double angle);

SteerResult steer_update(const SteeringController& c, const MirrorModel& m,
                         const MirrorState& state, const Vec2& offset_px, double now);

struct ErrorBudget {
  double shift;     // meters
  double fraction;  // of image height
};

ErrorBudget mirror_error_budget(const MirrorModel& m, double z, double theta,
                                double repeatability, double image_height);

// Rotation applied to the co-axial optical axis by the mirror. Positive theta
// steers toward +x, positive phi toward +y (image down), camera looks down +z.
Mat3 optical_rotation(const MirrorModel& m, double theta, double phi);

}  // namespace beam::steering
