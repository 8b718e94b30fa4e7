#include "beam/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "beam/error.hpp"

namespace beam::sim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view expected, std::string_view value) {
  fail(ErrorCode::ConfigInvalid,
       "key '" + std::string(key) + "': expected " + std::string(expected) + ", got '" + std::string(value) + "'");
}

double number(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(x)) bad_value(key, "a number", v);
  return x;
}

std::int64_t integer(std::string_view key, std::string_view v) {
  std::int64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, "an integer", v);
  return x;
}

int positive_int(std::string_view key, std::string_view v) {
  const auto x = integer(key, v);
  if (x <= 0 || x > 1'000'000) bad_value(key, "a positive integer", v);
  return static_cast<int>(x);
}

bool boolean(std::string_view key, std::string_view v) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  bad_value(key, "true/false", v);
}

// Values that combine several keys are gathered first and assembled last.
struct Assembly {
  Scenario s;
  Vec3 position{0.0, 0.0, 1.0};
  Vec3 ypr_deg = Vec3::Zero();
  double marker_size = 0.010;
  double marker_gap = 0.002;
};

using Setter = std::function<void(Assembly&, std::string_view key, std::string_view value)>;

const std::vector<std::pair<std::string_view, Setter>>& schema() {
  using A = Assembly;
  using K = std::string_view;
  static const std::vector<std::pair<std::string_view, Setter>> table = {
      {"duration_s", [](A& a, K k, K v) { a.s.duration = number(k, v); }},
      {"seed",
       [](A& a, K k, K v) {
         const auto x = integer(k, v);
         if (x < 0) bad_value(k, "a non-negative integer", v);
         a.s.pipeline.seed = static_cast<std::uint64_t>(x);
       }},
      {"toggle.warp", [](A& a, K k, K v) { a.s.toggles.warp = boolean(k, v); }},
      {"toggle.steer", [](A& a, K k, K v) { a.s.toggles.steer = boolean(k, v); }},
      {"toggle.refocus", [](A& a, K k, K v) { a.s.toggles.refocus = boolean(k, v); }},
      {"motion.kind",
       [](A& a, K k, K v) {
         try {
           a.s.motion.kind = motion_kind_from_string(v);
         } catch (const Error&) {
           bad_value(k, "static|slide_x|depth_z|yaw|pitch|roll", v);
         }
       }},
      {"motion.speed", [](A& a, K k, K v) { a.s.motion.speed = number(k, v); }},
      {"motion.extent", [](A& a, K k, K v) { a.s.motion.extent = number(k, v); }},
      {"motion.pivot_m", [](A& a, K k, K v) { a.s.motion.pivot_distance = number(k, v); }},
      {"headset.x_m", [](A& a, K k, K v) { a.position.x() = number(k, v); }},
      {"headset.y_m", [](A& a, K k, K v) { a.position.y() = number(k, v); }},
      {"headset.z_m", [](A& a, K k, K v) { a.position.z() = number(k, v); }},
      {"headset.yaw_deg", [](A& a, K k, K v) { a.ypr_deg.x() = number(k, v); }},
      {"headset.pitch_deg", [](A& a, K k, K v) { a.ypr_deg.y() = number(k, v); }},
      {"headset.roll_deg", [](A& a, K k, K v) { a.ypr_deg.z() = number(k, v); }},
      {"screen.width_m", [](A& a, K k, K v) { a.s.scene.headset.screen.screen_w = number(k, v); }},
      {"screen.height_m", [](A& a, K k, K v) { a.s.scene.headset.screen.screen_h = number(k, v); }},
      {"marker.size_m", [](A& a, K k, K v) { a.marker_size = number(k, v); }},
      {"marker.gap_m", [](A& a, K k, K v) { a.marker_gap = number(k, v); }},
      {"camera.width_px", [](A& a, K k, K v) { a.s.scene.camera.intrinsics.width = positive_int(k, v); }},
      {"camera.height_px", [](A& a, K k, K v) { a.s.scene.camera.intrinsics.height = positive_int(k, v); }},
      {"camera.fx_px", [](A& a, K k, K v) { a.s.scene.camera.intrinsics.fx = number(k, v); }},
      {"camera.fy_px", [](A& a, K k, K v) { a.s.scene.camera.intrinsics.fy = number(k, v); }},
      {"camera.cx_px", [](A& a, K k, K v) { a.s.scene.camera.intrinsics.cx = number(k, v); }},
      {"camera.cy_px", [](A& a, K k, K v) { a.s.scene.camera.intrinsics.cy = number(k, v); }},
      {"camera.frame_rate_hz", [](A& a, K k, K v) { a.s.scene.camera.frame_rate = number(k, v); }},
      {"camera.axial_offset_m", [](A& a, K k, K v) { a.s.scene.camera.axial_offset = number(k, v); }},
      {"camera.noise_px", [](A& a, K k, K v) { a.s.scene.camera.noise_sigma = number(k, v); }},
      {"projector.width_px", [](A& a, K k, K v) { a.s.scene.projector.width = positive_int(k, v); }},
      {"projector.height_px", [](A& a, K k, K v) { a.s.scene.projector.height = positive_int(k, v); }},
      {"projector.cone_deg", [](A& a, K k, K v) { a.s.scene.projector.cone_deg = number(k, v); }},
      {"lens.min_diopter", [](A& a, K k, K v) { a.s.scene.projector.lens.min_power = number(k, v); }},
      {"lens.max_diopter", [](A& a, K k, K v) { a.s.scene.projector.lens.max_power = number(k, v); }},
      {"lens.response_s", [](A& a, K k, K v) { a.s.scene.projector.lens.response_time = number(k, v); }},
      {"mirror.step_rad", [](A& a, K k, K v) { a.s.scene.projector.mirror.step_resolution = number(k, v); }},
      {"mirror.max_angle_deg",
       [](A& a, K k, K v) { a.s.scene.projector.mirror.max_angle = steering::deg_to_rad(number(k, v)); }},
      {"mirror.deflection_factor",
       [](A& a, K k, K v) { a.s.scene.projector.mirror.beam_deflection_factor = number(k, v); }},
      {"steer.deadband_px", [](A& a, K k, K v) { a.s.scene.deadband_px = number(k, v); }},
      {"steer.gain_rad_per_px", [](A& a, K k, K v) { a.s.scene.gain = number(k, v); }},
      {"pipeline.capture_hz", [](A& a, K k, K v) { a.s.pipeline.capture_rate = number(k, v); }},
      {"pipeline.detect_hz", [](A& a, K k, K v) { a.s.pipeline.detect_rate = number(k, v); }},
      {"pipeline.display_hz", [](A& a, K k, K v) { a.s.pipeline.display_rate = number(k, v); }},
      {"pipeline.capture_delay_s", [](A& a, K k, K v) { a.s.pipeline.capture_delay = number(k, v); }},
      {"pipeline.detect_delay_s", [](A& a, K k, K v) { a.s.pipeline.detect_delay = number(k, v); }},
      {"pipeline.display_delay_s", [](A& a, K k, K v) { a.s.pipeline.display_delay = number(k, v); }},
      {"pipeline.capture_phase_s", [](A& a, K k, K v) { a.s.pipeline.capture_phase = number(k, v); }},
      {"pipeline.detect_phase_s", [](A& a, K k, K v) { a.s.pipeline.detect_phase = number(k, v); }},
      {"pipeline.display_phase_s", [](A& a, K k, K v) { a.s.pipeline.display_phase = number(k, v); }},
      {"viewpoint.fx_px",
       [](A& a, K k, K v) {
         const double f = number(k, v);
         a.s.scene.viewpoint.intrinsics.fx = f;
         a.s.scene.viewpoint.intrinsics.fy = f;
       }},
      {"viewpoint.eye_distance_m", [](A& a, K k, K v) { a.s.scene.viewpoint.eye_distance = number(k, v); }},
      {"calibration.depth_m", [](A& a, K k, K v) { a.s.scene.calibration_depth = number(k, v); }},
  };
  return table;
}

const Setter* find_setter(std::string_view key) {
  for (const auto& [name, setter] : schema())
    if (name == key) return &setter;
  return nullptr;
}

void append_number(std::string& row, const std::optional<double>& v) {
  row += ',';
  if (!v) return;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", *v == 0.0 ? 0.0 : *v);
  row += buf;
}

}  // namespace

const std::vector<std::string_view>& ScenarioConfig::known_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> out;
    for (const auto& entry : schema()) out.push_back(entry.first);
    return out;
  }();
  return keys;
}

ScenarioConfig ScenarioConfig::parse(std::string_view text, std::string_view origin) {
  ScenarioConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::ConfigInvalid,
           std::string(origin) + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (cfg.entries_.count(key) != 0) {
      fail(ErrorCode::ConfigInvalid, std::string(origin) + ":" + std::to_string(line_no) + ": duplicate key '" +
                                         std::string(key) + "'");
    }
    cfg.set(key, trim(line.substr(eq + 1)));
  }
  return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void ScenarioConfig::set(std::string_view key, std::string_view value) {
  if (find_setter(key) == nullptr) fail(ErrorCode::ConfigInvalid, "unknown key '" + std::string(key) + "'");
  entries_.insert_or_assign(std::string(key), std::string(value));
}

Scenario ScenarioConfig::build() const {
  Assembly a;
  for (const auto& [key, value] : entries_) (*find_setter(key))(a, key, value);

  const Mat3 r = rot_y(steering::deg_to_rad(a.ypr_deg.x())) * rot_x(steering::deg_to_rad(a.ypr_deg.y())) *
                 rot_z(steering::deg_to_rad(a.ypr_deg.z()));
  const RigidTransform pose(r, a.position, Frame::Headset, Frame::World);
  a.s.motion.start_pose = pose;
  a.s.scene.headset.pose = pose;
  const auto& screen = a.s.scene.headset.screen;
  a.s.scene.headset.markers = MarkerLayout::around_screen(screen.screen_w, screen.screen_h, a.marker_size, a.marker_gap);
  a.s.validate();
  return a.s;
}

void write_trace_csv(std::ostream& out, const PipelineTrace& trace) {
  out << kTraceCsvHeader << '\n';
  std::string row;
  for (const auto& e : trace.events) {
    row.clear();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", e.t);
    row += buf;
    row += ',';
    row += to_string(e.stage);
    append_number(row, e.center_px ? std::optional(e.center_px->x()) : std::nullopt);
    append_number(row, e.center_px ? std::optional(e.center_px->y()) : std::nullopt);
    append_number(row, e.offset_px ? std::optional(e.offset_px->x()) : std::nullopt);
    append_number(row, e.offset_px ? std::optional(e.offset_px->y()) : std::nullopt);
    append_number(row, e.theta);
    append_number(row, e.phi);
    append_number(row, e.lens_diopters);
    row += ',';
    if (e.markers_visible) row += *e.markers_visible ? "1" : "0";
    append_number(row, e.latency);
    out << row << '\n';
  }
}

std::string trace_csv(const PipelineTrace& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

}  // namespace beam::sim
