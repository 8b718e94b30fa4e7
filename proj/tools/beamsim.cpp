// beamsim: design calculators, tracking-loop simulation, slanted-edge MTF and
// gray-code calibration on top of the beam C API.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "beam/beam.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitTrackingLost = 3;
constexpr int kExitAnalysis = 4;

constexpr double kPi = 3.14159265358979323846;

double deg(double d) { return d * kPi / 180.0; }

class CommandError : public std::runtime_error {
 public:
  CommandError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

int exit_code_for(beam_status s) {
  switch (s) {
    case BEAM_ERR_NO_EDGE_FOUND:
    case BEAM_ERR_PROFILE_TOO_SHORT:
    case BEAM_ERR_NO_HALF_CONTRAST_CROSSING:
      return kExitAnalysis;
    default:
      return kExitInput;
  }
}

void check(beam_status s, const std::string& context) {
  if (s == BEAM_OK) return;
  throw CommandError(exit_code_for(s), context + ": " + beam_last_error());
}

struct Global {
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string out;
  bool quiet = false;
};

void note(const Global& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << '\n';
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
  return buf;
}

// `start:stop:step` or a single value. The stop value is included when it
// lands on the grid (within a relative 1e-9 of a step).
std::vector<double> parse_range(const std::string& text, const std::string& name) {
  const auto bad = [&](const std::string& why) {
    return CommandError(kExitInput, "--" + name + " '" + text + "': " + why);
  };
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw bad("not a number");
    }
    if (used != item.size() || !std::isfinite(v)) throw bad("not a number");
    parts.push_back(v);
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw bad("expected start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0)) throw bad("step must be positive");
  if (stop < start) throw bad("stop is below start");
  const double span = (stop - start) / step;
  if (span > 1e6) throw bad("too many grid points");
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

std::filesystem::path out_file(const Global& g, const std::string& name) {
  std::filesystem::path dir(g.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw CommandError(kExitInput, "cannot create output directory '" + g.out + "': " + ec.message());
  return dir / name;
}

// Writes to <out>/<name> when --out is given, otherwise to standard output.
void emit(const Global& g, const std::string& name, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  const auto path = out_file(g, name);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  f.flush();
  if (!f) throw CommandError(kExitInput, "failed writing '" + path.string() + "'");
  note(g, "wrote " + path.string());
}

// ---------------------------------------------------------------------------
// design

struct DesignArgs {
  std::string d = "0.5:2.0:0.5";
  std::string aperture = "0.02:0.08:0.01";
  double lambda = 550e-9;
  std::string z = "1";
  std::string theta = "0:60:15";
  std::string dtheta = "0.1";
  std::string step = "0.1";
  std::string throw_m = "0.5:2.0:0.25";
  int pixels = 854;
};

std::string design_rayleigh(const DesignArgs& a) {
  std::string csv = "throw_m,aperture_m,wavelength_m,spot_um\n";
  for (double d : parse_range(a.d, "d")) {
    for (double ap : parse_range(a.aperture, "D")) {
      double spot = 0.0;
      check(beam_rayleigh_spot(d, ap, a.lambda, &spot), "rayleigh");
      csv += fmt(d) + "," + fmt(ap) + "," + fmt(a.lambda) + "," + fmt(spot * 1e6) + "\n";
    }
  }
  return csv;
}

std::string design_shift(const DesignArgs& a) {
  std::string csv = "z_m,theta_deg,dtheta_deg,shift_exact_mm,shift_approx_mm,approx_rel_error\n";
  for (double z : parse_range(a.z, "z")) {
    for (double th : parse_range(a.theta, "theta")) {
      for (double dth : parse_range(a.dtheta, "dtheta")) {
        double exact = 0.0, approx = 0.0;
        check(beam_image_shift_exact(z, deg(th), deg(dth), &exact), "shift");
        check(beam_image_shift_approx(z, deg(th), deg(dth), &approx), "shift");
        const double rel = exact != 0.0 ? std::abs(approx - exact) / std::abs(exact) : 0.0;
        csv += fmt(z) + "," + fmt(th) + "," + fmt(dth) + "," + fmt(exact * 1e3) + "," + fmt(approx * 1e3) + "," +
               fmt(rel) + "\n";
      }
    }
  }
  return csv;
}

std::string design_settle(const DesignArgs& a) {
  std::string csv = "step_deg,settle_s\n";
  for (double s : parse_range(a.step, "step")) {
    double t = 0.0;
    check(beam_settle_time(deg(s), &t), "settle");
    csv += fmt(s) + "," + fmt(t) + "\n";
  }
  return csv;
}

std::string design_fov(const DesignArgs& a) {
  std::string csv = "throw_m,fov_h_deg,fov_v_deg,deg_per_px\n";
  for (double d : parse_range(a.throw_m, "throw")) {
    double h = 0.0, v = 0.0, pitch = 0.0;
    check(beam_fov_at_throw(d, &h, &v), "fov");
    check(beam_angular_pixel_pitch(d, a.pixels, &pitch), "fov");
    csv += fmt(d) + "," + fmt(h) + "," + fmt(v) + "," + fmt(pitch) + "\n";
  }
  return csv;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string scenario;
  std::vector<std::string> overrides;
  bool no_warp = false;
  bool no_steer = false;
  bool no_refocus = false;
  double duration = 0.0;
  double stats_from = 0.0;
};

using ScenarioPtr = std::unique_ptr<beam_scenario, decltype(&beam_scenario_destroy)>;
using TracePtr = std::unique_ptr<beam_trace, decltype(&beam_trace_destroy)>;

int run_simulate(const Global& g, const SimulateArgs& a) {
  beam_scenario* raw = nullptr;
  check(beam_scenario_load(a.scenario.c_str(), &raw), a.scenario);
  ScenarioPtr scenario(raw, beam_scenario_destroy);

  const auto set = [&](const std::string& key, const std::string& value) {
    check(beam_scenario_set(scenario.get(), key.c_str(), value.c_str()), "override");
  };
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw CommandError(kExitInput, "--set expects key=value, got '" + kv + "'");
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.no_warp) set("toggle.warp", "false");
  if (a.no_steer) set("toggle.steer", "false");
  if (a.no_refocus) set("toggle.refocus", "false");
  if (a.duration > 0.0) set("duration_s", fmt(a.duration));
  if (g.seed_given) set("seed", std::to_string(g.seed));

  beam_trace* traw = nullptr;
  check(beam_simulate(scenario.get(), &traw), "simulate");
  TracePtr trace(traw, beam_trace_destroy);

  std::size_t length = 0;
  check(beam_trace_csv(trace.get(), nullptr, 0, &length), "trace");
  std::string csv(length + 1, '\0');
  check(beam_trace_csv(trace.get(), csv.data(), csv.size(), &length), "trace");
  csv.resize(length);
  emit(g, "trace.csv", csv);

  std::ostringstream block;
  const bool acquired = beam_trace_tracking_acquired(trace.get()) != 0;
  block << "tracking," << (acquired ? "acquired" : "lost") << '\n';
  block << "display_samples," << beam_trace_sample_count(trace.get()) << '\n';
  beam_trajectory_stats st{};
  const beam_status s = beam_trace_stats(trace.get(), a.stats_from, &st);
  if (s == BEAM_OK) {
    block << "centered_samples," << st.samples << '\n';
    block << "mean_offset_px," << fmt(st.mean_offset_px[0]) << ',' << fmt(st.mean_offset_px[1]) << '\n';
    block << "rms_jitter_px," << fmt(st.rms_jitter_px[0]) << ',' << fmt(st.rms_jitter_px[1]) << '\n';
    block << "max_excursion_px," << fmt(st.max_excursion_px[0]) << ',' << fmt(st.max_excursion_px[1]) << '\n';
    block << "mean_latency_s," << fmt(st.mean_latency_s) << '\n';
  } else if (s == BEAM_ERR_EMPTY_TRACE) {
    block << "centered_samples,0\n";
  } else {
    check(s, "stats");
  }
  // Trace CSV on stdout leaves the stats for stderr.
  (g.out.empty() ? std::cerr : std::cout) << block.str();
  if (!acquired) {
    std::cerr << "error: tracking was lost for the entire run\n";
    return kExitTrackingLost;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mtf

struct MtfArgs {
  std::string image;
  std::vector<int> roi;
  double pitch = 0.05;
};

int run_mtf(const Global& g, const MtfArgs& a) {
  beam_image* img = nullptr;
  check(beam_image_read_pgm(a.image.c_str(), &img), a.image);
  std::unique_ptr<beam_image, decltype(&beam_image_destroy)> image(img, beam_image_destroy);
  if (!a.roi.empty() && a.roi.size() != 4) throw CommandError(kExitInput, "--roi expects x,y,w,h");
  const int x = a.roi.empty() ? 0 : a.roi[0];
  const int y = a.roi.empty() ? 0 : a.roi[1];
  const int w = a.roi.empty() ? 0 : a.roi[2];
  const int h = a.roi.empty() ? 0 : a.roi[3];
  if (!a.roi.empty() && (w <= 0 || h <= 0)) throw CommandError(kExitInput, "--roi width and height must be positive");
  if (!(a.pitch > 0.0)) throw CommandError(kExitInput, "--pitch must be positive");

  beam_mtf* m = nullptr;
  check(beam_mtf_analyze(image.get(), x, y, w, h, &m), "mtf");
  std::unique_ptr<beam_mtf, decltype(&beam_mtf_destroy)> mtf(m, beam_mtf_destroy);
  double cypx = 0.0, cpd = 0.0;
  check(beam_mtf_mtf50(mtf.get(), a.pitch, &cypx, &cpd), "mtf50");

  if (!g.out.empty()) {
    const auto path = out_file(g, "mtf.csv");
    check(beam_mtf_write_csv(mtf.get(), path.string().c_str()), "mtf");
    note(g, "wrote " + path.string());
  }
  std::cout << "mtf50_cypx,mtf50_cpd\n" << fmt(cypx) << ',' << fmt(cpd) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
  int width = 854;
  int height = 480;
  std::vector<double> h0;
  bool random = false;
  double corrupt = 0.0;
};

// A plausible projector -> camera mapping: similarity plus mild perspective.
std::vector<double> random_mapping(std::uint64_t seed, int width, int height) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double s = 1.0 + 0.2 * u(rng);
  const double a = 0.1 * u(rng);
  const double tx = 50.0 * u(rng), ty = 50.0 * u(rng);
  const double px = 1e-5 * u(rng) * 854.0 / width, py = 1e-5 * u(rng) * 480.0 / height;
  return {s * std::cos(a), -s * std::sin(a), tx, s * std::sin(a), s * std::cos(a), ty, px, py, 1.0};
}

int run_calibrate(const Global& g, const CalibrateArgs& a) {
  std::vector<double> h0 = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  if (a.random && !a.h0.empty()) throw CommandError(kExitInput, "--h0 and --random are exclusive");
  if (a.random) h0 = random_mapping(g.seed, a.width, a.height);
  if (!a.h0.empty()) {
    if (a.h0.size() != 9) throw CommandError(kExitInput, "--h0 expects 9 comma-separated values");
    h0 = a.h0;
  }
  if (a.width < 2 || a.height < 2) throw CommandError(kExitInput, "resolution must be at least 2x2");

  beam_calibration_report r{};
  check(beam_calibrate_simulated(a.width, a.height, h0.data(), a.corrupt, g.seed, &r), "calibrate");

  // Agreement with the true mapping over the projector raster corners.
  double truth_error = 0.0;
  for (double cx : {0.0, a.width - 1.0}) {
    for (double cy : {0.0, a.height - 1.0}) {
      double ex = 0, ey = 0, tx = 0, ty = 0;
      check(beam_homography_apply(r.homography, cx, cy, &ex, &ey), "calibrate");
      check(beam_homography_apply(h0.data(), cx, cy, &tx, &ty), "calibrate");
      truth_error = std::max(truth_error, std::hypot(ex - tx, ey - ty));
    }
  }

  // Report with the bottom-right entry scaled to 1 when possible.
  const double scale = std::abs(r.homography[8]) > 1e-12 ? r.homography[8] : 1.0;
  for (double& v : r.homography) v /= scale;

  std::ostringstream rep;
  rep << "resolution," << a.width << ',' << a.height << '\n';
  rep << "pattern_pairs," << r.pattern_pairs << '\n';
  rep << "correspondences," << r.correspondences << '\n';
  for (int row = 0; row < 3; ++row) {
    rep << "h_row" << row;
    for (int c = 0; c < 3; ++c) rep << ',' << fmt(r.homography[3 * row + c]);
    rep << '\n';
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", r.max_reprojection_error_px);
  rep << "max_reprojection_error_px," << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.3e", truth_error);
  rep << "max_error_vs_truth_px," << buf << '\n';
  emit(g, "calibration.csv", rep.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steering-projector design calculators and tracking-loop simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  Global g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed (default 1)");
  app.add_option("--out", g.out, "Output directory; CSV goes to stdout when omitted");
  app.add_flag("--quiet", g.quiet, "Suppress informational messages");

  DesignArgs design;
  auto* design_cmd = app.add_subcommand("design", "Evaluate a design calculator on a grid (ranges are start:stop:step)");
  design_cmd->require_subcommand(1);
  auto* rayleigh = design_cmd->add_subcommand("rayleigh", "Diffraction-limited spot size grid");
  rayleigh->add_option("--d", design.d, "Throw distance range, m")->capture_default_str();
  rayleigh->add_option("--D", design.aperture, "Aperture diameter range, m")->capture_default_str();
  rayleigh->add_option("--lambda", design.lambda, "Wavelength, m")->capture_default_str();
  auto* shift = design_cmd->add_subcommand("shift", "Image shift caused by a mirror angle error");
  shift->add_option("--z", design.z, "Throw distance range, m")->capture_default_str();
  shift->add_option("--theta", design.theta, "Steering angle range, deg")->capture_default_str();
  shift->add_option("--dtheta", design.dtheta, "Angle error range, deg")->capture_default_str();
  auto* settle = design_cmd->add_subcommand("settle", "Mirror settle time per step size");
  settle->add_option("--step", design.step, "Step range, deg")->capture_default_str();
  auto* fov = design_cmd->add_subcommand("fov", "Eyepiece field of view per throw distance");
  fov->add_option("--throw", design.throw_m, "Throw distance range, m")->capture_default_str();
  fov->add_option("--pixels", design.pixels, "Horizontal pixels across the screen")->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the tracking loop on a scenario file");
  simulate->add_option("scenario", sim.scenario, "Scenario file (key = value)")->required();
  simulate->add_option("--set", sim.overrides, "Override a scenario key, key=value (repeatable)");
  simulate->add_flag("--no-warp", sim.no_warp, "Disable image warping");
  simulate->add_flag("--no-steer", sim.no_steer, "Disable mirror steering");
  simulate->add_flag("--no-refocus", sim.no_refocus, "Disable lens refocusing");
  simulate->add_option("--duration", sim.duration, "Simulated duration, s (overrides the scenario)");
  simulate->add_option("--stats-from", sim.stats_from, "Start time of the statistics window, s")->capture_default_str();

  MtfArgs mtf;
  auto* mtf_cmd = app.add_subcommand("mtf", "Slanted-edge MTF of a PGM image");
  mtf_cmd->add_option("image", mtf.image, "Binary PGM (P5) image")->required();
  mtf_cmd->add_option("--roi", mtf.roi, "Region of interest x,y,w,h")->delimiter(',')->expected(4);
  mtf_cmd->add_option("--pitch", mtf.pitch, "Angular pixel pitch, deg/px")->capture_default_str();

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "Gray-code calibration against a simulated mapping");
  calibrate->add_option("--width", cal.width, "Projector width, px")->capture_default_str();
  calibrate->add_option("--height", cal.height, "Projector height, px")->capture_default_str();
  calibrate->add_option("--h0", cal.h0, "True projector->camera homography, 9 values row-major")->delimiter(',');
  calibrate->add_flag("--random", cal.random, "Draw the true mapping from --seed");
  calibrate->add_option("--corrupt", cal.corrupt, "Fraction of camera samples with an ambiguous bit")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (design_cmd->parsed()) {
      std::string csv;
      std::string name;
      if (rayleigh->parsed()) csv = design_rayleigh(design), name = "design_rayleigh.csv";
      if (shift->parsed()) csv = design_shift(design), name = "design_shift.csv";
      if (settle->parsed()) csv = design_settle(design), name = "design_settle.csv";
      if (fov->parsed()) csv = design_fov(design), name = "design_fov.csv";
      emit(g, name, csv);
      return kExitOk;
    }
    if (simulate->parsed()) return run_simulate(g, sim);
    if (mtf_cmd->parsed()) return run_mtf(g, mtf);
    if (calibrate->parsed()) return run_calibrate(g, cal);
  } catch (const CommandError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
