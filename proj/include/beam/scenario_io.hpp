#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "beam/pipeline.hpp"

namespace beam::sim {

// Flat `key = value` scenario description. Lines starting with '#' (and
// anything after a '#' on a line) are comments. Keys are validated against a
// fixed schema as soon as they are set; values are validated by build().
class ScenarioConfig {
 public:
  static ScenarioConfig parse(std::string_view text, std::string_view origin = "<string>");
  static ScenarioConfig load(const std::filesystem::path& path);

  // Throws ConfigInvalid naming the key if it is not part of the schema.
  void set(std::string_view key, std::string_view value);
  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

  Scenario build() const;

  static const std::vector<std::string_view>& known_keys();

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

inline Scenario load_scenario(const std::filesystem::path& path) { return ScenarioConfig::load(path).build(); }

inline constexpr std::string_view kTraceCsvHeader =
    "t_s,stage,center_x_px,center_y_px,dx_px,dy_px,theta_rad,phi_rad,lens_diopter,markers_visible,latency_s";

// One row per trace event, header first; missing values are empty fields.
void write_trace_csv(std::ostream& out, const PipelineTrace& trace);
std::string trace_csv(const PipelineTrace& trace);

}  // namespace beam::sim
