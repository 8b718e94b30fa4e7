/* C interface to the beaming-display toolkit.
 *
 * Every fallible function returns a beam_status; on failure a message is
 * available from beam_last_error() on the calling thread. Objects are opaque
 * handles released with their matching *_destroy function (NULL is accepted).
 */
#ifndef BEAM_BEAM_H
#define BEAM_BEAM_H

#include <stddef.h>
#include <stdint.h>

#if defined(BEAM_BUILDING_LIBRARY)
#define BEAM_API __attribute__((visibility("default")))
#else
#define BEAM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum beam_status {
  BEAM_OK = 0,
  BEAM_ERR_INVALID_ARGUMENT = 1,
  BEAM_ERR_FRAME_MISMATCH = 2,
  BEAM_ERR_POINT_AT_INFINITY = 3,
  BEAM_ERR_DEGENERATE_CONFIGURATION = 4,
  BEAM_ERR_INSUFFICIENT_CORRESPONDENCES = 5,
  BEAM_ERR_BEHIND_CAMERA = 6,
  BEAM_ERR_NON_POSITIVE_INPUT = 7,
  BEAM_ERR_NON_POSITIVE_DISTANCE = 8,
  BEAM_ERR_TANGENT_SINGULARITY = 9,
  BEAM_ERR_OUT_OF_RANGE = 10,
  BEAM_ERR_NO_MARKERS_VISIBLE = 11,
  BEAM_ERR_CONFIG_INVALID = 12,
  BEAM_ERR_EMPTY_TRACE = 13,
  BEAM_ERR_DEGENERATE_HOMOGRAPHY = 14,
  BEAM_ERR_ANGLE_OUT_OF_RANGE = 15,
  BEAM_ERR_NO_EDGE_FOUND = 16,
  BEAM_ERR_PROFILE_TOO_SHORT = 17,
  BEAM_ERR_NO_HALF_CONTRAST_CROSSING = 18,
  BEAM_ERR_IO = 19,
  BEAM_ERR_INTERNAL = 99
} beam_status;

BEAM_API const char* beam_version(void);
BEAM_API const char* beam_status_name(beam_status status);
/* Message of the last failure on this thread; empty string if none. */
BEAM_API const char* beam_last_error(void);

/* ---- Optics and steering calculators (SI units, angles in radians) ---- */

BEAM_API beam_status beam_rayleigh_spot(double throw_m, double aperture_m, double wavelength_m, double* spot_m);
BEAM_API beam_status beam_lens_separation(double f1_m, double f2_m, double* separation_m);
BEAM_API beam_status beam_magnification(double f1_m, double f2_m, double* magnification);
/* Lens power for a throw plus axial offset, clamped to the default lens range. */
BEAM_API beam_status beam_focus_power(double throw_m, double offset_m, double* diopters, int* clamped);
/* Eyepiece field of view (degrees) at the given throw, default eyepiece. */
BEAM_API beam_status beam_fov_at_throw(double throw_m, double* fov_h_deg, double* fov_v_deg);
/* Degrees of visual field per screen pixel for the default eyepiece. */
BEAM_API beam_status beam_angular_pixel_pitch(double throw_m, int pixels_h, double* deg_per_px);
BEAM_API beam_status beam_image_shift_exact(double z_m, double theta, double dtheta, double* shift_m);
BEAM_API beam_status beam_image_shift_approx(double z_m, double theta, double dtheta, double* shift_m);
/* Settle time of the default mirror for a mechanical step (radians). */
BEAM_API beam_status beam_settle_time(double step, double* seconds);
/* Nearest reachable angle of the default mirror. */
BEAM_API beam_status beam_quantize_angle(double angle, double* quantized);
/* Image shift and fraction of image height for a mirror repeatability error. */
BEAM_API beam_status beam_mirror_error_budget(double z_m, double theta, double repeatability, double image_height_m,
                                             double* shift_m, double* height_fraction);

/* ---- Homographies (row-major 3x3) ---- */

BEAM_API beam_status beam_homography_estimate(const double* source_xy, const double* target_xy, size_t count,
                                              double h_out[9]);
BEAM_API beam_status beam_homography_apply(const double h[9], double x, double y, double* out_x, double* out_y);

typedef struct beam_calibration_report {
  double homography[9]; /* recovered projector -> camera mapping */
  double max_reprojection_error_px;
  size_t pattern_pairs;
  size_t correspondences;
} beam_calibration_report;

/* Gray-code calibration against a simulated camera observing the projector
 * raster through h0 (projector -> camera). A fraction of samples can be
 * corrupted with ambiguous bits, drawn from `seed`. */
BEAM_API beam_status beam_calibrate_simulated(int width, int height, const double h0[9], double corrupt_fraction,
                                              uint64_t seed, beam_calibration_report* report);

/* ---- Scenarios and simulation ---- */

typedef struct beam_scenario beam_scenario;
typedef struct beam_trace beam_trace;

BEAM_API beam_status beam_scenario_create_default(beam_scenario** out);
BEAM_API beam_status beam_scenario_load(const char* path, beam_scenario** out);
/* Overrides one key; unknown keys fail with BEAM_ERR_CONFIG_INVALID. */
BEAM_API beam_status beam_scenario_set(beam_scenario* scenario, const char* key, const char* value);
BEAM_API void beam_scenario_destroy(beam_scenario* scenario);

BEAM_API beam_status beam_simulate(const beam_scenario* scenario, beam_trace** out);
BEAM_API beam_status beam_trace_write_csv(const beam_trace* trace, const char* path);
/* Copies the CSV text into `buffer` (NUL-terminated, truncated to
 * `capacity`); `length` receives the full text length excluding the NUL. */
BEAM_API beam_status beam_trace_csv(const beam_trace* trace, char* buffer, size_t capacity, size_t* length);
BEAM_API size_t beam_trace_event_count(const beam_trace* trace);
BEAM_API size_t beam_trace_sample_count(const beam_trace* trace);
/* Nonzero when at least one capture saw a marker. */
BEAM_API int beam_trace_tracking_acquired(const beam_trace* trace);

typedef struct beam_trajectory_stats {
  size_t samples;
  double mean_offset_px[2];
  double rms_jitter_px[2];
  double max_excursion_px[2];
  double mean_latency_s;
} beam_trajectory_stats;

BEAM_API beam_status beam_trace_stats(const beam_trace* trace, double from_t, beam_trajectory_stats* stats);
BEAM_API void beam_trace_destroy(beam_trace* trace);

/* ---- Images and MTF ---- */

typedef struct beam_image beam_image;
typedef struct beam_mtf beam_mtf;

BEAM_API beam_status beam_image_read_pgm(const char* path, beam_image** out);
BEAM_API beam_status beam_image_write_pgm(const beam_image* image, const char* path);
/* Slanted edge through the image center; angle in degrees from vertical.
 * Each pixel averages supersample x supersample point samples, so 1 gives a
 * hard point-sampled step and 4 the usual area-sampled edge. */
BEAM_API beam_status beam_image_slanted_edge(int width, int height, double angle_deg, int low, int high,
                                             int supersample, beam_image** out);
BEAM_API beam_status beam_image_blur(const beam_image* image, double sigma_px, beam_image** out);
BEAM_API int beam_image_width(const beam_image* image);
BEAM_API int beam_image_height(const beam_image* image);
BEAM_API void beam_image_destroy(beam_image* image);

/* Slanted-edge analysis of a region of interest; a zero width or height
 * selects the whole image. */
BEAM_API beam_status beam_mtf_analyze(const beam_image* image, int x, int y, int width, int height, beam_mtf** out);
/* Number of points up to 0.5 cycles per pixel. */
BEAM_API size_t beam_mtf_size(const beam_mtf* mtf);
BEAM_API beam_status beam_mtf_point(const beam_mtf* mtf, size_t index, double* freq_cypx, double* response);
BEAM_API beam_status beam_mtf_mtf50(const beam_mtf* mtf, double deg_per_px, double* cypx, double* cpd);
BEAM_API beam_status beam_mtf_write_csv(const beam_mtf* mtf, const char* path);
BEAM_API void beam_mtf_destroy(beam_mtf* mtf);

#ifdef __cplusplus
}
#endif

#endif /* BEAM_BEAM_H */
