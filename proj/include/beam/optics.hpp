#pragma once

#include <vector>

namespace beam::optics {

// Wavelength in meters, restricted to the visible band.
class Wavelength {
 public:
  static constexpr double kMin = 380e-9;
  static constexpr double kMax = 780e-9;
  static constexpr double kDefault = 550e-9;

  explicit Wavelength(double meters = kDefault);
  double meters() const { return meters_; }

 private:
  double meters_;
};

// Two-lens relay: object plane at f1 before lens 1, image plane at f2 after
// lens 2. The relay always inverts the image; that is reported separately
// from the unsigned magnification.
struct FourFSystem {
  double f1 = 0.045;
  double f2 = 0.075;
  double aperture_d = 0.05;

  void validate() const;
  double separation() const;
  double magnification() const;
  static constexpr bool inverts_image = true;
};

struct TunableLens {
  double min_power = -1.5;   // diopters
  double max_power = 3.5;    // diopters
  double response_time = 0.0025;  // seconds

  void validate() const;
};

struct FovEntry {
  double throw_m;
  double fov_h_deg;
  double fov_v_deg;
};

struct EyepieceModel {
  double screen_w = 0.030;
  double screen_h = 0.020;
  std::vector<FovEntry> fov_table{{0.5, 24.0, 17.0}, {2.0, 36.0, 24.0}};

  void validate() const;
};

struct FocusCommand {
  double diopters;   // value sent to the lens
  double requested;  // 1 / (throw + offset) before clamping
  bool clamped;
};

struct FieldOfView {
  double horizontal_deg;
  double vertical_deg;
};

// Diffraction-limited spot size 1.22 d lambda / D.
double rayleigh_spot(double d_image, Wavelength lambda, double aperture_d);

double lens_separation(double f1, double f2);
double magnification(double f1, double f2);

FocusCommand focus_power_for_throw(double throw_m, double axial_offset,
                                   const TunableLens& lens = {});

// Piecewise-linear in throw, held constant outside the table.
FieldOfView fov_at_throw(const EyepieceModel& e, double throw_m);

double angular_pixel_pitch(double fov_deg, double pixels_across);

// Cycles per degree of a spot of the given size seen from the given distance
// (one cycle spans two spots).
double spot_to_cycles_per_degree(double spot_m, double viewing_distance_m);

}  // namespace beam::optics
