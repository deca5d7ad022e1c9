#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "marinetrack/pipeline.hpp"
#include "marinetrack/simulator.hpp"

namespace marinetrack {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : "config field '" + field + "': " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct RunConfig {
  ScenarioConfig scenario;
  PipelineParams params;
  std::string text;
  std::uint64_t hash{fnv1a64("")};

  void validate() const {
    scenario.validate();
    params.validate(scenario.n_drones);
  }
};

namespace detail {

using nlohmann::json;

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    read(*it, field(key), out);
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    const auto it = j_.find(key);
    return Section(it == j_.end() ? empty : *it, field(key));
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const std::string& path_field() const { return path_; }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.contains(k)) throw ConfigError(field(k), "unknown field");
    }
  }

 private:
  static void read(const json& v, const std::string& f, double& out) {
    if (!v.is_number()) throw ConfigError(f, "expected a number");
    out = v.get<double>();
  }
  static void read(const json& v, const std::string& f, int& out) {
    if (!v.is_number_integer()) throw ConfigError(f, "expected an integer");
    out = v.get<int>();
  }
  static void read(const json& v, const std::string& f, std::uint64_t& out) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError(f, "expected a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }
  static void read(const json& v, const std::string& f, std::string& out) {
    if (!v.is_string()) throw ConfigError(f, "expected a string");
    out = v.get<std::string>();
  }
  static void read(const json& v, const std::string& f, std::vector<double>& out) {
    if (!v.is_array()) throw ConfigError(f, "expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(f + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
void checked(const std::string& field, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }

  RunConfig rc;
  rc.text = text;
  rc.hash = fnv1a64(text);
  detail::Section top(root, "");

  {
    detail::Section s = top.sub("scenario");
    ScenarioConfig& sc = rc.scenario;
    std::string category = to_string(sc.category);
    s.get("category", category);
    const auto cat = category_from_string(category);
    if (!cat) throw ConfigError(s.field("category"), "unknown category '" + category + "'");
    sc = ScenarioConfig::for_category(*cat);
    s.get("n_robots", sc.n_robots);
    s.get("n_drones", sc.n_drones);
    s.get("course_length", sc.course_length);
    s.get("robot_speed", sc.robot_speed);
    s.get("frame_rate", sc.frame_rate);
    s.get("truth_rate", sc.truth_rate);
    s.get("seed", sc.seed);
    std::vector<double> origin{sc.origin.lat, sc.origin.lon};
    s.get("origin", origin);
    if (origin.size() != 2) throw ConfigError(s.field("origin"), "expected [lat, lon]");
    sc.origin = {origin[0], origin[1]};
    if (!is_valid(sc.origin)) throw ConfigError(s.field("origin"), "not a valid latitude/longitude");
    s.get("robot_spacing", sc.robot_spacing);
    s.get("robot_size", sc.robot_size);
    s.get("linear_drift_deg", sc.linear_drift_deg);
    s.get("waypoint_spacing", sc.waypoint_spacing);
    s.get("waypoint_offset_min", sc.waypoint_offset_min);
    s.get("waypoint_offset_max", sc.waypoint_offset_max);
    s.get("u_turns", sc.u_turns);
    s.get("u_turn_radius", sc.u_turn_radius);
    s.get("drone_altitudes", sc.drone_altitudes);
    s.get("drone_lateral_offsets", sc.drone_lateral_offsets);
    s.get("drone_tilt_deg", sc.drone_tilt_deg);
    s.get("heading_window_s", sc.heading_window_s);
    s.get("heading_rate_limit_dps", sc.heading_rate_limit_dps);
    {
      detail::Section c = s.sub("camera");
      int width = sc.camera.image_width;
      int height = sc.camera.image_height;
      double hfov = 60.0;
      double focal = sc.camera.focal_length;
      c.get("width", width);
      c.get("height", height);
      c.get("hfov_deg", hfov);
      c.get("focal_length_mm", focal);
      if (!(hfov > 0.0 && hfov < 180.0)) throw ConfigError(c.field("hfov_deg"), "must lie in (0, 180)");
      sc.camera = CameraIntrinsics::from_horizontal_fov(width, height, hfov, focal);
      detail::checked(c.field("width"), [&] { sc.camera.validate(); });
      c.finish();
    }
    s.finish();
  }

  {
    detail::Section s = top.sub("noise");
    NoiseModel& n = rc.scenario.noise;
    s.get("pixel_sigma", n.pixel_sigma);
    std::vector<double> range{n.confidence_lo, n.confidence_hi};
    s.get("confidence_range", range);
    if (range.size() != 2) throw ConfigError(s.field("confidence_range"), "expected [lo, hi]");
    n.confidence_lo = range[0];
    n.confidence_hi = range[1];
    s.get("dropout_prob", n.dropout_prob);
    s.get("gnss_drone_sigma", n.gnss_drone_sigma);
    s.get("altitude_sigma", n.altitude_sigma);
    s.get("heading_sigma", n.heading_sigma);
    s.get("timestamp_jitter", n.timestamp_jitter);
    {
      detail::Section t = s.sub("turbulence");
      t.get("shake_sigma_px", n.turbulence.shake_sigma_px);
      t.get("gust_prob", n.turbulence.gust_prob);
      t.get("gust_frames", n.turbulence.gust_frames);
      t.finish();
    }
    detail::checked(s.path_field(), [&] { n.validate(); });
    s.finish();
  }

  {
    detail::Section s = top.sub("tracker");
    MatchWeights& w = rc.params.tracker;
    s.get("w_iou", w.w_iou);
    s.get("w_geo", w.w_geo);
    s.get("d_max", w.d_max);
    s.get("tau_high", w.tau_high);
    s.get("tau_low", w.tau_low);
    s.get("track_buffer", w.track_buffer);
    s.get("min_score", w.min_score);
    s.get("low_iou_min", w.low_iou_min);
    s.get("tentative_min", w.tentative_min);
    s.get("confirm_hits", w.confirm_hits);
    detail::checked(s.path_field(), [&] { w.validate(); });
    s.finish();
  }

  {
    detail::Section s = top.sub("alignment");
    s.get("max_distance", rc.params.alignment.max_distance);
    s.get("new_id_confidence", rc.params.alignment.new_id_confidence);
    s.get("reference_drone", rc.params.reference_drone);
    detail::checked(s.path_field(), [&] { rc.params.alignment.validate(); });
    s.finish();
  }

  {
    detail::Section s = top.sub("ekf");
    EkfParams& e = rc.params.ekf;
    s.get("dt", e.dt);
    s.get("q_acc", e.q_acc);
    s.get("r_meas", e.r_meas);
    s.get("init_position_var", e.init_position_var);
    s.get("init_velocity_var", e.init_velocity_var);
    s.get("coast_limit", e.coast_limit);
    detail::checked(s.path_field(), [&] { e.validate(); });
    s.finish();
  }

  {
    detail::Section s = top.sub("icp");
    IcpParams& p = rc.params.icp;
    s.get("max_iterations", p.max_iterations);
    s.get("convergence_epsilon", p.convergence_epsilon);
    std::string mode = p.correspondence == Correspondence::NearestSegment ? "segment" : "vertex";
    s.get("correspondence", mode);
    if (mode == "segment") p.correspondence = Correspondence::NearestSegment;
    else if (mode == "vertex") p.correspondence = Correspondence::NearestVertex;
    else throw ConfigError(s.field("correspondence"), "expected \"segment\" or \"vertex\"");
    detail::checked(s.path_field(), [&] { p.validate(); });
    s.finish();
  }
  top.finish();

  detail::checked("scenario", [&] { rc.scenario.validate(); });
  detail::checked("alignment.reference_drone", [&] { rc.params.validate(rc.scenario.n_drones); });
  if (std::abs(rc.params.ekf.dt * rc.scenario.frame_rate - 1.0) > 1e-9) {
    throw ConfigError("ekf.dt", "must equal 1 / scenario.frame_rate");
  }
  return rc;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Parameter snapshot in the same layout the parser reads.
inline nlohmann::ordered_json params_to_json(const RunConfig& rc) {
  nlohmann::ordered_json j;
  const ScenarioConfig& s = rc.scenario;
  j["scenario"] = {{"category", to_string(s.category)},
                   {"n_robots", s.n_robots},
                   {"n_drones", s.n_drones},
                   {"course_length", s.course_length},
                   {"robot_speed", s.robot_speed},
                   {"frame_rate", s.frame_rate},
                   {"truth_rate", s.truth_rate},
                   {"seed", s.seed},
                   {"origin", {s.origin.lat, s.origin.lon}},
                   {"robot_spacing", s.robot_spacing},
                   {"robot_size", s.robot_size},
                   {"linear_drift_deg", s.linear_drift_deg},
                   {"waypoint_spacing", s.waypoint_spacing},
                   {"waypoint_offset_min", s.waypoint_offset_min},
                   {"waypoint_offset_max", s.waypoint_offset_max},
                   {"u_turns", s.u_turns},
                   {"u_turn_radius", s.u_turn_radius},
                   {"drone_altitudes", s.drone_altitudes},
                   {"drone_lateral_offsets", s.drone_lateral_offsets},
                   {"drone_tilt_deg", s.drone_tilt_deg},
                   {"heading_window_s", s.heading_window_s},
                   {"heading_rate_limit_dps", s.heading_rate_limit_dps},
                   {"camera",
                    {{"width", s.camera.image_width},
                     {"height", s.camera.image_height},
                     {"hfov_deg", rad2deg(2.0 * std::atan(s.camera.sensor_width / (2.0 * s.camera.focal_length)))},
                     {"focal_length_mm", s.camera.focal_length}}}};
  const NoiseModel& n = s.noise;
  j["noise"] = {{"pixel_sigma", n.pixel_sigma},
                {"confidence_range", {n.confidence_lo, n.confidence_hi}},
                {"dropout_prob", n.dropout_prob},
                {"gnss_drone_sigma", n.gnss_drone_sigma},
                {"altitude_sigma", n.altitude_sigma},
                {"heading_sigma", n.heading_sigma},
                {"timestamp_jitter", n.timestamp_jitter},
                {"turbulence",
                 {{"shake_sigma_px", n.turbulence.shake_sigma_px},
                  {"gust_prob", n.turbulence.gust_prob},
                  {"gust_frames", n.turbulence.gust_frames}}}};
  const MatchWeights& w = rc.params.tracker;
  j["tracker"] = {{"w_iou", w.w_iou},         {"w_geo", w.w_geo},
                  {"d_max", w.d_max},         {"tau_high", w.tau_high},
                  {"tau_low", w.tau_low},     {"track_buffer", w.track_buffer},
                  {"min_score", w.min_score}, {"low_iou_min", w.low_iou_min},
                  {"tentative_min", w.tentative_min}, {"confirm_hits", w.confirm_hits}};
  j["alignment"] = {{"max_distance", rc.params.alignment.max_distance},
                    {"new_id_confidence", rc.params.alignment.new_id_confidence},
                    {"reference_drone", rc.params.reference_drone}};
  const EkfParams& e = rc.params.ekf;
  j["ekf"] = {{"dt", e.dt},
              {"q_acc", e.q_acc},
              {"r_meas", e.r_meas},
              {"init_position_var", e.init_position_var},
              {"init_velocity_var", e.init_velocity_var},
              {"coast_limit", e.coast_limit}};
  j["icp"] = {{"max_iterations", rc.params.icp.max_iterations},
              {"convergence_epsilon", rc.params.icp.convergence_epsilon},
              {"correspondence",
               rc.params.icp.correspondence == Correspondence::NearestSegment ? "segment" : "vertex"}};
  return j;
}

}  // namespace marinetrack
