#include "beam/optics.hpp"

#include <cmath>
#include <numbers>

#include "beam/error.hpp"

namespace beam::optics {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(ErrorCode::NonPositiveInput, std::string(name) + " must be positive");
  }
}

}  // namespace

Wavelength::Wavelength(double meters) : meters_(meters) {
  if (!(meters >= kMin && meters <= kMax)) {
    fail(ErrorCode::OutOfRange, "wavelength outside the visible band (380-780 nm)");
  }
}

void FourFSystem::validate() const {
  require_positive(f1, "f1");
  require_positive(f2, "f2");
  require_positive(aperture_d, "aperture");
}

double FourFSystem::separation() const { return lens_separation(f1, f2); }
double FourFSystem::magnification() const { return optics::magnification(f1, f2); }

void TunableLens::validate() const {
  if (!(min_power < max_power)) fail(ErrorCode::InvalidArgument, "lens power range is empty");
  if (!(response_time >= 0.0)) fail(ErrorCode::InvalidArgument, "negative lens response time");
}

void EyepieceModel::validate() const {
  require_positive(screen_w, "screen width");
  require_positive(screen_h, "screen height");
  if (fov_table.size() < 2) fail(ErrorCode::InvalidArgument, "FoV table needs at least 2 entries");
  for (std::size_t i = 0; i < fov_table.size(); ++i) {
    const auto& e = fov_table[i];
    require_positive(e.throw_m, "table throw");
    if (!(e.fov_h_deg > 0.0 && e.fov_h_deg < 180.0) || !(e.fov_v_deg > 0.0 && e.fov_v_deg < 180.0)) {
      fail(ErrorCode::InvalidArgument, "FoV must lie strictly between 0 and 180 degrees");
    }
    if (i > 0 && !(e.throw_m > fov_table[i - 1].throw_m)) {
      fail(ErrorCode::InvalidArgument, "FoV table throws must be strictly increasing");
    }
  }
}

double rayleigh_spot(double d_image, Wavelength lambda, double aperture_d) {
  require_positive(d_image, "throw distance");
  require_positive(aperture_d, "aperture");
  return 1.22 * d_image * lambda.meters() / aperture_d;
}

double lens_separation(double f1, double f2) {
  require_positive(f1, "f1");
  require_positive(f2, "f2");
  return f1 + f2;
}

double magnification(double f1, double f2) {
  require_positive(f1, "f1");
  require_positive(f2, "f2");
  return f2 / f1;
}

FocusCommand focus_power_for_throw(double throw_m, double axial_offset, const TunableLens& lens) {
  lens.validate();
  const double f = throw_m + axial_offset;
  if (!(f > 0.0) || !std::isfinite(f)) {
    fail(ErrorCode::NonPositiveDistance, "throw plus axial offset must be positive");
  }
  const double requested = 1.0 / f;
  if (requested < lens.min_power) return {lens.min_power, requested, true};
  if (requested > lens.max_power) return {lens.max_power, requested, true};
  return {requested, requested, false};
}

FieldOfView fov_at_throw(const EyepieceModel& e, double throw_m) {
  e.validate();
  require_positive(throw_m, "throw distance");
  const auto& t = e.fov_table;
  if (throw_m <= t.front().throw_m) return {t.front().fov_h_deg, t.front().fov_v_deg};
  if (throw_m >= t.back().throw_m) return {t.back().fov_h_deg, t.back().fov_v_deg};
  std::size_t i = 1;
  while (t[i].throw_m < throw_m) ++i;
  const auto& a = t[i - 1];
  const auto& b = t[i];
  const double u = (throw_m - a.throw_m) / (b.throw_m - a.throw_m);
  return {a.fov_h_deg + u * (b.fov_h_deg - a.fov_h_deg), a.fov_v_deg + u * (b.fov_v_deg - a.fov_v_deg)};
}

double angular_pixel_pitch(double fov_deg, double pixels_across) {
  require_positive(fov_deg, "field of view");
  require_positive(pixels_across, "pixel count");
  return fov_deg / pixels_across;
}

double spot_to_cycles_per_degree(double spot_m, double viewing_distance_m) {
  require_positive(spot_m, "spot size");
  require_positive(viewing_distance_m, "viewing distance");
  const double spot_deg = 2.0 * std::atan(0.5 * spot_m / viewing_distance_m) * 180.0 / std::numbers::pi;
  return 1.0 / (2.0 * spot_deg);
}

}  // namespace beam::optics
