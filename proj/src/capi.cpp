#include "beam/beam.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "beam/error.hpp"
#include "beam/graycode.hpp"
#include "beam/imaging.hpp"
#include "beam/optics.hpp"
#include "beam/pipeline.hpp"
#include "beam/scenario_io.hpp"
#include "beam/steering.hpp"

struct beam_scenario {
  beam::sim::ScenarioConfig config;
};

struct beam_trace {
  beam::sim::PipelineTrace trace;
};

struct beam_image {
  beam::imaging::GrayImage image;
};

struct beam_mtf {
  beam::imaging::MtfCurve curve;
  beam::imaging::MtfCurve reported;
};

namespace {

thread_local std::string last_error;

beam_status to_status(beam::ErrorCode code) {
  using beam::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return BEAM_ERR_INVALID_ARGUMENT;
    case ErrorCode::FrameMismatch: return BEAM_ERR_FRAME_MISMATCH;
    case ErrorCode::PointAtInfinity: return BEAM_ERR_POINT_AT_INFINITY;
    case ErrorCode::DegenerateConfiguration: return BEAM_ERR_DEGENERATE_CONFIGURATION;
    case ErrorCode::InsufficientCorrespondences: return BEAM_ERR_INSUFFICIENT_CORRESPONDENCES;
    case ErrorCode::BehindCamera: return BEAM_ERR_BEHIND_CAMERA;
    case ErrorCode::NonPositiveInput: return BEAM_ERR_NON_POSITIVE_INPUT;
    case ErrorCode::NonPositiveDistance: return BEAM_ERR_NON_POSITIVE_DISTANCE;
    case ErrorCode::TangentSingularity: return BEAM_ERR_TANGENT_SINGULARITY;
    case ErrorCode::OutOfRange: return BEAM_ERR_OUT_OF_RANGE;
    case ErrorCode::NoMarkersVisible: return BEAM_ERR_NO_MARKERS_VISIBLE;
    case ErrorCode::ConfigInvalid: return BEAM_ERR_CONFIG_INVALID;
    case ErrorCode::EmptyTrace: return BEAM_ERR_EMPTY_TRACE;
    case ErrorCode::DegenerateHomography: return BEAM_ERR_DEGENERATE_HOMOGRAPHY;
    case ErrorCode::AngleOutOfRange: return BEAM_ERR_ANGLE_OUT_OF_RANGE;
    case ErrorCode::NoEdgeFound: return BEAM_ERR_NO_EDGE_FOUND;
    case ErrorCode::ProfileTooShort: return BEAM_ERR_PROFILE_TOO_SHORT;
    case ErrorCode::NoHalfContrastCrossing: return BEAM_ERR_NO_HALF_CONTRAST_CROSSING;
    case ErrorCode::Io: return BEAM_ERR_IO;
  }
  return BEAM_ERR_INTERNAL;
}

template <class F>
beam_status guard(F&& body) noexcept {
  try {
    body();
    last_error.clear();
    return BEAM_OK;
  } catch (const beam::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return BEAM_ERR_INTERNAL;
}

template <class... Ptr>
void require(Ptr... p) {
  if (((p == nullptr) || ...)) beam::fail(beam::ErrorCode::InvalidArgument, "null pointer argument");
}

beam::Mat3 to_mat(const double* h) {
  beam::Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = h[3 * r + c];
  return m;
}

void from_mat(const beam::Mat3& m, double* out) {
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[3 * r + c] = m(r, c);
}

}  // namespace

extern "C" {

BEAM_API const char* beam_version(void) { return "0.1.0"; }

BEAM_API const char* beam_status_name(beam_status status) {
  switch (status) {
    case BEAM_OK: return "Ok";
    case BEAM_ERR_INTERNAL: return "Internal";
    default: break;
  }
  const int i = static_cast<int>(status) - 1;
  if (i < 0 || i > static_cast<int>(beam::ErrorCode::Io)) return "unknown";
  return beam::to_string(static_cast<beam::ErrorCode>(i));
}

BEAM_API const char* beam_last_error(void) { return last_error.c_str(); }

BEAM_API beam_status beam_rayleigh_spot(double throw_m, double aperture_m, double wavelength_m, double* spot_m) {
  return guard([&] {
    require(spot_m);
    *spot_m = beam::optics::rayleigh_spot(throw_m, beam::optics::Wavelength(wavelength_m), aperture_m);
  });
}

BEAM_API beam_status beam_lens_separation(double f1_m, double f2_m, double* separation_m) {
  return guard([&] {
    require(separation_m);
    *separation_m = beam::optics::lens_separation(f1_m, f2_m);
  });
}

BEAM_API beam_status beam_magnification(double f1_m, double f2_m, double* magnification) {
  return guard([&] {
    require(magnification);
    *magnification = beam::optics::magnification(f1_m, f2_m);
  });
}

BEAM_API beam_status beam_focus_power(double throw_m, double offset_m, double* diopters, int* clamped) {
  return guard([&] {
    require(diopters);
    const auto cmd = beam::optics::focus_power_for_throw(throw_m, offset_m, beam::optics::TunableLens{});
    *diopters = cmd.diopters;
    if (clamped != nullptr) *clamped = cmd.clamped ? 1 : 0;
  });
}

BEAM_API beam_status beam_fov_at_throw(double throw_m, double* fov_h_deg, double* fov_v_deg) {
  return guard([&] {
    require(fov_h_deg, fov_v_deg);
    const auto fov = beam::optics::fov_at_throw(beam::optics::EyepieceModel{}, throw_m);
    *fov_h_deg = fov.horizontal_deg;
    *fov_v_deg = fov.vertical_deg;
  });
}

BEAM_API beam_status beam_angular_pixel_pitch(double throw_m, int pixels_h, double* deg_per_px) {
  return guard([&] {
    require(deg_per_px);
    const auto fov = beam::optics::fov_at_throw(beam::optics::EyepieceModel{}, throw_m);
    *deg_per_px = beam::optics::angular_pixel_pitch(fov.horizontal_deg, pixels_h);
  });
}

BEAM_API beam_status beam_image_shift_exact(double z_m, double theta, double dtheta, double* shift_m) {
  return guard([&] {
    require(shift_m);
    *shift_m = beam::steering::image_shift_exact(z_m, theta, dtheta);
  });
}

BEAM_API beam_status beam_image_shift_approx(double z_m, double theta, double dtheta, double* shift_m) {
  return guard([&] {
    require(shift_m);
    *shift_m = beam::steering::image_shift_approx(z_m, theta, dtheta);
  });
}

BEAM_API beam_status beam_settle_time(double step, double* seconds) {
  return guard([&] {
    require(seconds);
    *seconds = beam::steering::settle_time(beam::steering::MirrorModel{}, step);
  });
}

BEAM_API beam_status beam_quantize_angle(double angle, double* quantized) {
  return guard([&] {
    require(quantized);
    *quantized = beam::steering::quantize_angle(beam::steering::MirrorModel{}, angle);
  });
}

BEAM_API beam_status beam_mirror_error_budget(double z_m, double theta, double repeatability, double image_height_m,
                                             double* shift_m, double* height_fraction) {
  return guard([&] {
    require(shift_m, height_fraction);
    const auto b = beam::steering::mirror_error_budget(beam::steering::MirrorModel{}, z_m, theta, repeatability,
                                                       image_height_m);
    *shift_m = b.shift;
    *height_fraction = b.fraction;
  });
}

BEAM_API beam_status beam_homography_estimate(const double* source_xy, const double* target_xy, size_t count,
                                              double h_out[9]) {
  return guard([&] {
    require(source_xy, target_xy, h_out);
    beam::CorrespondenceSet pairs;
    for (size_t i = 0; i < count; ++i) {
      pairs.push_back({beam::Vec2(source_xy[2 * i], source_xy[2 * i + 1]),
                       beam::Vec2(target_xy[2 * i], target_xy[2 * i + 1])});
    }
    from_mat(beam::estimate_homography(pairs).matrix(), h_out);
  });
}

BEAM_API beam_status beam_homography_apply(const double h[9], double x, double y, double* out_x, double* out_y) {
  return guard([&] {
    require(h, out_x, out_y);
    const auto p = beam::apply_homography(beam::Homography(to_mat(h)), beam::Vec2(x, y));
    *out_x = p.x();
    *out_y = p.y();
  });
}

BEAM_API beam_status beam_calibrate_simulated(int width, int height, const double h0[9], double corrupt_fraction,
                                              uint64_t seed, beam_calibration_report* report) {
  return guard([&] {
    require(h0, report);
    using beam::Frame;
    const beam::Homography truth(to_mat(h0), Frame::Projector, Frame::Camera);
    const auto stack = beam::sim::graycode_generate(width, height);
    auto obs = beam::sim::observe_patterns(stack, truth);
    if (corrupt_fraction > 0.0) {
      std::mt19937_64 rng(seed);
      beam::sim::corrupt_observation(obs, corrupt_fraction, rng);
    }
    const auto pairs = beam::sim::graycode_decode(stack.layout, obs);
    const auto h = beam::estimate_homography(pairs, Frame::Projector, Frame::Camera);
    double worst = 0.0;
    for (const auto& c : pairs) worst = std::max(worst, (beam::apply_homography(h, c.source) - c.target).norm());
    from_mat(h.matrix(), report->homography);
    report->max_reprojection_error_px = worst;
    report->pattern_pairs = static_cast<size_t>(stack.layout.pattern_pairs());
    report->correspondences = pairs.size();
  });
}

BEAM_API beam_status beam_scenario_create_default(beam_scenario** out) {
  return guard([&] {
    require(out);
    *out = new beam_scenario{};
  });
}

BEAM_API beam_status beam_scenario_load(const char* path, beam_scenario** out) {
  return guard([&] {
    require(path, out);
    auto cfg = beam::sim::ScenarioConfig::load(path);
    cfg.build();
    *out = new beam_scenario{std::move(cfg)};
  });
}

BEAM_API beam_status beam_scenario_set(beam_scenario* scenario, const char* key, const char* value) {
  return guard([&] {
    require(scenario, key, value);
    scenario->config.set(key, value);
  });
}

BEAM_API void beam_scenario_destroy(beam_scenario* scenario) { delete scenario; }

BEAM_API beam_status beam_simulate(const beam_scenario* scenario, beam_trace** out) {
  return guard([&] {
    require(scenario, out);
    *out = new beam_trace{beam::sim::run_scenario(scenario->config.build())};
  });
}

BEAM_API beam_status beam_trace_write_csv(const beam_trace* trace, const char* path) {
  return guard([&] {
    require(trace, path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) beam::fail(beam::ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
    beam::sim::write_trace_csv(out, trace->trace);
    out.flush();
    if (!out) beam::fail(beam::ErrorCode::Io, std::string("failed writing '") + path + "'");
  });
}

BEAM_API beam_status beam_trace_csv(const beam_trace* trace, char* buffer, size_t capacity, size_t* length) {
  return guard([&] {
    require(trace, length);
    const std::string text = beam::sim::trace_csv(trace->trace);
    *length = text.size();
    if (buffer != nullptr && capacity > 0) {
      const size_t n = std::min(capacity - 1, text.size());
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
    }
  });
}

BEAM_API size_t beam_trace_event_count(const beam_trace* trace) {
  return trace == nullptr ? 0 : trace->trace.events.size();
}

BEAM_API size_t beam_trace_sample_count(const beam_trace* trace) {
  return trace == nullptr ? 0 : trace->trace.samples.size();
}

BEAM_API int beam_trace_tracking_acquired(const beam_trace* trace) {
  return trace != nullptr && trace->trace.tracking_acquired ? 1 : 0;
}

BEAM_API beam_status beam_trace_stats(const beam_trace* trace, double from_t, beam_trajectory_stats* stats) {
  return guard([&] {
    require(trace, stats);
    const auto s = beam::sim::trajectory_stats(trace->trace, from_t);
    stats->samples = s.samples;
    for (int i = 0; i < 2; ++i) {
      stats->mean_offset_px[i] = s.mean_offset[i];
      stats->rms_jitter_px[i] = s.rms_jitter[i];
      stats->max_excursion_px[i] = s.max_excursion[i];
    }
    stats->mean_latency_s = s.mean_latency;
  });
}

BEAM_API void beam_trace_destroy(beam_trace* trace) { delete trace; }

BEAM_API beam_status beam_image_read_pgm(const char* path, beam_image** out) {
  return guard([&] {
    require(path, out);
    *out = new beam_image{beam::imaging::read_pgm(path)};
  });
}

BEAM_API beam_status beam_image_write_pgm(const beam_image* image, const char* path) {
  return guard([&] {
    require(image, path);
    beam::imaging::write_pgm(image->image, path);
  });
}

BEAM_API beam_status beam_image_slanted_edge(int width, int height, double angle_deg, int low, int high,
                                             int supersample, beam_image** out) {
  return guard([&] {
    require(out);
    if (low < 0 || low > 255 || high < 0 || high > 255) {
      beam::fail(beam::ErrorCode::InvalidArgument, "intensities must lie in [0, 255]");
    }
    *out = new beam_image{beam::imaging::slanted_edge_pattern({width, height}, angle_deg,
                                                              static_cast<std::uint8_t>(low),
                                                              static_cast<std::uint8_t>(high), supersample)};
  });
}

BEAM_API beam_status beam_image_blur(const beam_image* image, double sigma_px, beam_image** out) {
  return guard([&] {
    require(image, out);
    *out = new beam_image{beam::imaging::gaussian_blur(image->image, sigma_px)};
  });
}

BEAM_API int beam_image_width(const beam_image* image) { return image == nullptr ? 0 : image->image.width(); }

BEAM_API int beam_image_height(const beam_image* image) { return image == nullptr ? 0 : image->image.height(); }

BEAM_API void beam_image_destroy(beam_image* image) { delete image; }

BEAM_API beam_status beam_mtf_analyze(const beam_image* image, int x, int y, int width, int height, beam_mtf** out) {
  return guard([&] {
    require(image, out);
    const auto& img = image->image;
    const auto roi = (width == 0 || height == 0) ? img : img.crop(x, y, width, height);
    auto curve = beam::imaging::mtf_from_esf(beam::imaging::esf_from_roi(roi));
    auto reported = curve.reported();
    *out = new beam_mtf{std::move(curve), std::move(reported)};
  });
}

BEAM_API size_t beam_mtf_size(const beam_mtf* mtf) { return mtf == nullptr ? 0 : mtf->reported.frequencies.size(); }

BEAM_API beam_status beam_mtf_point(const beam_mtf* mtf, size_t index, double* freq_cypx, double* response) {
  return guard([&] {
    require(mtf, freq_cypx, response);
    if (index >= mtf->reported.frequencies.size()) beam::fail(beam::ErrorCode::OutOfRange, "MTF index out of range");
    *freq_cypx = mtf->reported.frequencies[index];
    *response = mtf->reported.response[index];
  });
}

BEAM_API beam_status beam_mtf_mtf50(const beam_mtf* mtf, double deg_per_px, double* cypx, double* cpd) {
  return guard([&] {
    require(mtf, cypx, cpd);
    const auto m = beam::imaging::mtf50(mtf->curve, deg_per_px);
    *cypx = m.cycles_per_pixel;
    *cpd = m.cycles_per_degree;
  });
}

BEAM_API beam_status beam_mtf_write_csv(const beam_mtf* mtf, const char* path) {
  return guard([&] {
    require(mtf, path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) beam::fail(beam::ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
    out << "freq_cypx,response\n";
    char buf[64];
    for (size_t i = 0; i < mtf->reported.frequencies.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.6g,%.10g\n", mtf->reported.frequencies[i], mtf->reported.response[i]);
      out << buf;
    }
    out.flush();
    if (!out) beam::fail(beam::ErrorCode::Io, std::string("failed writing '") + path + "'");
  });
}

BEAM_API void beam_mtf_destroy(beam_mtf* mtf) { delete mtf; }

}  // extern "C"
