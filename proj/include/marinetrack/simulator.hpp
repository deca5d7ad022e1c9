#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "marinetrack/evaluation.hpp"
#include "marinetrack/geodesy.hpp"
#include "marinetrack/projection.hpp"
#include "marinetrack/random.hpp"

namespace marinetrack {

enum class Category { Linear3, Linear2, Linear1, NonLinear3, HardTurns3 };

inline const char* to_string(Category c) {
  switch (c) {
    case Category::Linear3: return "Linear3";
    case Category::Linear2: return "Linear2";
    case Category::Linear1: return "Linear1";
    case Category::NonLinear3: return "NonLinear3";
    case Category::HardTurns3: return "HardTurns3";
  }
  return "?";
}

inline std::optional<Category> category_from_string(const std::string& s) {
  for (Category c : {Category::Linear3, Category::Linear2, Category::Linear1, Category::NonLinear3,
                     Category::HardTurns3}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

struct TurbulenceModel {
  double shake_sigma_px{0.0};
  double gust_prob{0.0};  // chance per calm frame that a gust starts
  int gust_frames{5};     // frames a gust holds its image offset
};

struct NoiseModel {
  double pixel_sigma{0.0};
  double confidence_lo{0.6};
  double confidence_hi{0.95};
  double dropout_prob{0.0};
  TurbulenceModel turbulence;
  double gnss_drone_sigma{0.0};  // meters
  double altitude_sigma{0.0};    // meters
  double heading_sigma{0.0};     // degrees
  double timestamp_jitter{0.0};  // seconds, truth receiver delay upper bound

  void validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!(pixel_sigma >= 0.0) || !(gnss_drone_sigma >= 0.0) || !(altitude_sigma >= 0.0) ||
        !(heading_sigma >= 0.0) || !(turbulence.shake_sigma_px >= 0.0)) {
      throw std::invalid_argument("noise sigmas must be >= 0");
    }
    if (!prob(dropout_prob) || !prob(turbulence.gust_prob)) {
      throw std::invalid_argument("noise probabilities must lie in [0, 1]");
    }
    if (!prob(confidence_lo) || !prob(confidence_hi) || confidence_lo > confidence_hi) {
      throw std::invalid_argument("confidence range must satisfy 0 <= lo <= hi <= 1");
    }
    if (turbulence.gust_frames < 1) throw std::invalid_argument("gust_frames must be >= 1");
    if (!(timestamp_jitter >= 0.0 && timestamp_jitter <= 0.02)) {
      throw std::invalid_argument("timestamp_jitter must lie in [0, 0.02] s");
    }
  }
};

struct ScenarioConfig {
  Category category{Category::Linear3};
  int n_robots{2};
  int n_drones{3};
  double course_length{600.0};  // meters
  double robot_speed{1.5};      // m/s
  double frame_rate{10.0};      // Hz
  double truth_rate{1.0};       // Hz
  NoiseModel noise;
  std::uint64_t seed{1};

  GeoPoint origin{45.5, -73.6};
  double robot_spacing{8.0};  // lateral distance between neighbouring robots, meters
  double robot_size{1.5};     // meters
  double linear_drift_deg{2.0};
  double waypoint_spacing{60.0};
  double waypoint_offset_min{10.0};
  double waypoint_offset_max{20.0};
  int u_turns{3};
  double u_turn_radius{3.0};

  CameraIntrinsics camera{CameraIntrinsics::from_horizontal_fov(640, 640, 60.0)};
  std::vector<double> drone_altitudes{40.0, 60.0, 80.0};  // index 0 is the reference drone
  std::vector<double> drone_lateral_offsets{0.0, 6.0, -6.0};
  double drone_tilt_deg{30.0};
  double heading_window_s{10.0};
  double heading_rate_limit_dps{20.0};

  static ScenarioConfig for_category(Category c) {
    ScenarioConfig cfg;
    cfg.category = c;
    switch (c) {
      case Category::Linear3: break;
      case Category::Linear2: cfg.n_drones = 2; break;
      case Category::Linear1: cfg.n_drones = 1; break;
      case Category::NonLinear3: break;
      case Category::HardTurns3:
        cfg.n_robots = 1;
        cfg.course_length = 210.0;
        break;
    }
    return cfg;
  }

  double duration() const {
    // Whole truth periods, so the last tick carries a truth sample.
    return std::ceil(course_length / robot_speed * truth_rate - 1e-9) / truth_rate;
  }
  long n_ticks() const { return std::lround(duration() * frame_rate) + 1; }

  void validate() const {
    if (n_drones < 1 || n_drones > 3) throw std::invalid_argument("n_drones must be 1, 2 or 3");
    if (n_robots < 1) throw std::invalid_argument("n_robots must be >= 1");
    if (!(course_length > 0.0)) throw std::invalid_argument("course_length must be > 0");
    if (!(robot_speed > 0.0) || !(frame_rate > 0.0) || !(truth_rate > 0.0)) {
      throw std::invalid_argument("robot_speed, frame_rate and truth_rate must be > 0");
    }
    if (static_cast<int>(drone_altitudes.size()) < n_drones ||
        static_cast<int>(drone_lateral_offsets.size()) < n_drones) {
      throw std::invalid_argument("need an altitude and a lateral offset for every drone");
    }
    for (int d = 0; d < n_drones; ++d) {
      if (!(drone_altitudes[d] > 0.0)) throw std::invalid_argument("drone altitudes must be > 0");
      if (d > 0 && !(drone_altitudes[d] > drone_altitudes[d - 1])) {
        throw std::invalid_argument("drone altitudes must be strictly increasing");
      }
    }
    if (!(drone_tilt_deg >= 0.0 && drone_tilt_deg < 90.0)) {
      throw std::invalid_argument("drone_tilt_deg must lie in [0, 90)");
    }
    if (!(u_turn_radius > 0.0 && u_turn_radius <= 3.0) || u_turns < 1) {
      throw std::invalid_argument("hard turns need u_turns >= 1 and 0 < u_turn_radius <= 3");
    }
    if (!(waypoint_spacing > 0.0) || !(waypoint_offset_min >= 0.0) ||
        waypoint_offset_min > waypoint_offset_max) {
      throw std::invalid_argument("invalid waypoint parameters");
    }
    if (!(std::abs(linear_drift_deg) <= 5.0)) throw std::invalid_argument("linear_drift_deg must be <= 5");
    camera.validate();
    noise.validate();
  }
};

/// Arc-length parametrized ENU polyline.
class RobotPath {
 public:
  RobotPath() = default;
  explicit RobotPath(std::vector<EnuPoint> pts) : pts_(std::move(pts)) {
    if (pts_.empty()) throw std::invalid_argument("RobotPath: no points");
    arc_.assign(pts_.size(), 0.0);
    for (std::size_t i = 1; i < pts_.size(); ++i) arc_[i] = arc_[i - 1] + norm(pts_[i] - pts_[i - 1]);
  }

  double length() const { return arc_.empty() ? 0.0 : arc_.back(); }
  const std::vector<EnuPoint>& points() const { return pts_; }

  /// Position after travelling s meters; clamps at both ends.
  EnuPoint at(double s) const {
    if (s <= 0.0 || pts_.size() == 1) return pts_.front();
    if (s >= length()) return pts_.back();
    const auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
    const auto i = static_cast<std::size_t>(it - arc_.begin());
    const double seg = arc_[i] - arc_[i - 1];
    const double t = seg > 0.0 ? (s - arc_[i - 1]) / seg : 0.0;
    return pts_[i - 1] + t * (pts_[i] - pts_[i - 1]);
  }

  /// Resample to uniform spacing `ds` and cut at `max_length`.
  RobotPath resampled(double ds, double max_length) const {
    const double total = std::min(length(), max_length);
    std::vector<EnuPoint> out;
    const auto n = static_cast<long>(std::floor(total / ds));
    out.reserve(static_cast<std::size_t>(n) + 2);
    for (long k = 0; k <= n; ++k) out.push_back(at(static_cast<double>(k) * ds));
    if (total - static_cast<double>(n) * ds > 1e-9) out.push_back(at(total));
    return RobotPath(std::move(out));
  }

 private:
  std::vector<EnuPoint> pts_;
  std::vector<double> arc_;
};

namespace detail {

constexpr double kPathStep = 0.1;  // meters between dense path vertices

inline EnuPoint heading_unit(double heading_rad) { return {std::sin(heading_rad), std::cos(heading_rad)}; }
// Unit vector 90 degrees clockwise of the heading.
inline EnuPoint right_unit(double heading_rad) { return {std::cos(heading_rad), -std::sin(heading_rad)}; }

inline std::vector<EnuPoint> linear_centerline(const ScenarioConfig& cfg, double h0, double drift) {
  const double length = cfg.course_length;
  const auto n = static_cast<long>(std::ceil(length / kPathStep));
  std::vector<EnuPoint> pts{{0.0, 0.0}};
  EnuPoint p;
  for (long k = 0; k < n; ++k) {
    const double s_mid = (static_cast<double>(k) + 0.5) * kPathStep;
    p = p + kPathStep * heading_unit(h0 + drift * s_mid / length);
    pts.push_back(p);
  }
  return pts;
}

inline EnuPoint catmull_rom(const EnuPoint& p0, const EnuPoint& p1, const EnuPoint& p2,
                            const EnuPoint& p3, double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double a = -0.5 * t3 + t2 - 0.5 * t;
  const double b = 1.5 * t3 - 2.5 * t2 + 1.0;
  const double c = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
  const double d = 0.5 * t3 - 0.5 * t2;
  return a * p0 + b * p1 + c * p2 + d * p3;
}

inline std::vector<EnuPoint> spline_centerline(const ScenarioConfig& cfg, double h0, Rng& rng) {
  const EnuPoint fwd = heading_unit(h0);
  const EnuPoint right = right_unit(h0);
  std::vector<EnuPoint> way{{0.0, 0.0}};
  double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
  const auto n_way = static_cast<long>(std::ceil(1.3 * cfg.course_length / cfg.waypoint_spacing)) + 1;
  for (long k = 1; k <= n_way; ++k) {
    const double off = sign * rng.uniform(cfg.waypoint_offset_min, cfg.waypoint_offset_max);
    sign = -sign;
    way.push_back(static_cast<double>(k) * cfg.waypoint_spacing * fwd + off * right);
  }
  // Phantom end points keep the first and last pieces well defined.
  std::vector<EnuPoint> ctrl;
  ctrl.push_back(way[0] - (way[1] - way[0]));
  ctrl.insert(ctrl.end(), way.begin(), way.end());
  ctrl.push_back(way.back() + (way.back() - way[way.size() - 2]));

  std::vector<EnuPoint> pts;
  constexpr int kSub = 400;
  for (std::size_t i = 1; i + 2 < ctrl.size(); ++i) {
    for (int j = 0; j < kSub; ++j) {
      pts.push_back(catmull_rom(ctrl[i - 1], ctrl[i], ctrl[i + 1], ctrl[i + 2],
                                static_cast<double>(j) / kSub));
    }
  }
  pts.push_back(ctrl[ctrl.size() - 2]);
  return RobotPath(std::move(pts)).resampled(kPathStep, cfg.course_length).points();
}

inline std::vector<EnuPoint> hard_turn_centerline(const ScenarioConfig& cfg, double h0, Rng& rng) {
  const double r = cfg.u_turn_radius;
  const double leg =
      (cfg.course_length - cfg.u_turns * std::numbers::pi * r) / static_cast<double>(cfg.u_turns + 1);
  if (!(leg > 2.0 * r)) throw std::invalid_argument("course_length too short for the requested U-turns");
  double side = rng.bernoulli(0.5) ? 1.0 : -1.0;  // +1 turns right
  double heading = h0;
  EnuPoint p;
  std::vector<EnuPoint> pts{p};
  auto straight = [&](double len) {
    const auto n = static_cast<long>(std::ceil(len / kPathStep));
    for (long k = 1; k <= n; ++k) pts.push_back(p + (len * k / n) * heading_unit(heading));
    p = pts.back();
  };
  for (int turn = 0; turn <= cfg.u_turns; ++turn) {
    straight(leg);
    if (turn == cfg.u_turns) break;
    const EnuPoint center = p + side * r * right_unit(heading);
    const EnuPoint radial = p - center;
    const double arc = std::numbers::pi * r;
    const auto n = static_cast<long>(std::ceil(arc / kPathStep));
    for (long k = 1; k <= n; ++k) {
      // Rotate the radius vector by side * phi (clockwise for right turns).
      const double phi = side * std::numbers::pi * k / n;
      const double c = std::cos(phi);
      const double s = std::sin(phi);
      pts.push_back(center + EnuPoint{c * radial.east + s * radial.north, -s * radial.east + c * radial.north});
    }
    p = pts.back();
    heading += std::numbers::pi;
    side = -side;
  }
  return pts;
}

// Offsets a dense polyline sideways by `offset` meters (positive to the right).
inline std::vector<EnuPoint> offset_polyline(const std::vector<EnuPoint>& c, double offset) {
  if (offset == 0.0 || c.size() < 2) return c;
  std::vector<EnuPoint> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const EnuPoint a = c[i == 0 ? 0 : i - 1];
    const EnuPoint b = c[i + 1 < c.size() ? i + 1 : i];
    const double h = std::atan2(b.east - a.east, b.north - a.north);
    out[i] = c[i] + offset * right_unit(h);
  }
  return out;
}

}  // namespace detail

/// Dense ENU path (about cfg.origin) of robot `robot`. Robots share one
/// course, spaced sideways by robot_spacing.
inline RobotPath generate_robot_path(const ScenarioConfig& cfg, int robot) {
  Rng rng(derive_seed(cfg.seed, 1));
  const double h0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<EnuPoint> center;
  switch (cfg.category) {
    case Category::Linear3:
    case Category::Linear2:
    case Category::Linear1: {
      const double drift = deg2rad(cfg.linear_drift_deg) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
      center = detail::linear_centerline(cfg, h0, drift);
      break;
    }
    case Category::NonLinear3: center = detail::spline_centerline(cfg, h0, rng); break;
    case Category::HardTurns3: center = detail::hard_turn_centerline(cfg, h0, rng); break;
  }
  const double offset = (robot - 0.5 * (cfg.n_robots - 1)) * cfg.robot_spacing;
  return RobotPath(detail::offset_polyline(center, offset));
}

inline double tick_time(const ScenarioConfig& cfg, long tick) { return static_cast<double>(tick) / cfg.frame_rate; }

/// Robot position at every frame tick, ENU about cfg.origin.
inline std::vector<EnuPoint> robot_positions(const ScenarioConfig& cfg, const RobotPath& path) {
  std::vector<EnuPoint> out(static_cast<std::size_t>(cfg.n_ticks()));
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = path.at(cfg.robot_speed * tick_time(cfg, static_cast<long>(k)));
  }
  return out;
}

/// Ground-truth receiver log for one robot, sampled at truth_rate with the
/// receiver's clock delay applied to the timestamps.
inline GeoTrajectory generate_robot_trajectory(const ScenarioConfig& cfg, int robot) {
  cfg.validate();
  const RobotPath path = generate_robot_path(cfg, robot);
  Rng rng(derive_seed(cfg.seed, 2, static_cast<std::uint64_t>(robot)));
  const auto n = std::lround(cfg.duration() * cfg.truth_rate);
  std::vector<TimedGeo> samples;
  samples.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / cfg.truth_rate;
    const double delay = rng.uniform(0.0, cfg.noise.timestamp_jitter);
    samples.push_back({t + delay, from_enu(path.at(cfg.robot_speed * t), cfg.origin)});
  }
  return GeoTrajectory(std::move(samples), cfg.truth_rate);
}

/// True drone poses per drone per tick. Each drone keeps the robots' centroid
/// at the image centre and turns with the centroid's direction of travel.
inline std::vector<std::vector<DronePose>> generate_drone_paths(
    const ScenarioConfig& cfg, const std::vector<std::vector<EnuPoint>>& robots) {
  if (robots.empty()) throw std::invalid_argument("generate_drone_paths: no robots");
  const std::size_t ticks = robots.front().size();
  std::vector<EnuPoint> centroid(ticks);
  for (std::size_t k = 0; k < ticks; ++k) {
    EnuPoint c;
    for (const auto& r : robots) c = c + r.at(k);
    centroid[k] = (1.0 / static_cast<double>(robots.size())) * c;
  }

  const auto half = static_cast<long>(std::lround(0.5 * cfg.heading_window_s * cfg.frame_rate));
  const double max_step = deg2rad(cfg.heading_rate_limit_dps) / cfg.frame_rate;
  std::vector<double> heading(ticks, 0.0);
  double h = 0.0;
  bool have = false;
  for (std::size_t k = 0; k < ticks; ++k) {
    const auto lo = static_cast<std::size_t>(std::max(0L, static_cast<long>(k) - half));
    const auto hi = static_cast<std::size_t>(std::min(static_cast<long>(ticks) - 1, static_cast<long>(k) + half));
    const EnuPoint dir = centroid[hi] - centroid[lo];
    if (norm(dir) > 0.5) {
      const double want = std::atan2(dir.east, dir.north);
      if (!have) {
        h = want;
        have = true;
      } else {
        const double diff = std::remainder(want - h, 2.0 * std::numbers::pi);
        h += std::clamp(diff, -max_step, max_step);
      }
    }
    heading[k] = h;
  }

  const double tilt = cfg.drone_tilt_deg;
  std::vector<std::vector<DronePose>> out(static_cast<std::size_t>(cfg.n_drones));
  for (int d = 0; d < cfg.n_drones; ++d) {
    const double alt = cfg.drone_altitudes[static_cast<std::size_t>(d)];
    const double lateral = cfg.drone_lateral_offsets[static_cast<std::size_t>(d)];
    auto& poses = out[static_cast<std::size_t>(d)];
    poses.reserve(ticks);
    for (std::size_t k = 0; k < ticks; ++k) {
      const double hk = heading[k];
      const EnuPoint pos = centroid[k] - alt * std::tan(deg2rad(tilt)) * detail::heading_unit(hk) +
                           lateral * detail::right_unit(hk);
      double hdeg = std::fmod(rad2deg(hk), 360.0);
      if (hdeg < 0.0) hdeg += 360.0;
      if (hdeg >= 360.0) hdeg = 0.0;
      poses.push_back({from_enu(pos, cfg.origin), alt, hdeg, tilt});
    }
  }
  return out;
}

struct DroneObservation {
  int drone_id{0};
  DronePose reported_pose;        // pose as the drone's own sensors report it
  std::vector<Detection> detections;
  std::vector<int> truth_labels;  // robot index per detection
};

struct FrameBundle {
  long tick{0};
  double timestamp{0.0};
  std::vector<DroneObservation> drones;
  std::vector<GeoPoint> robots;  // ground truth
};

/// Stateful frame synthesizer. Each drone draws from its own stream in a
/// fixed order, so the output depends only on (config, seed).
class FrameRenderer {
 public:
  explicit FrameRenderer(const ScenarioConfig& cfg) : cfg_(cfg) {
    for (int d = 0; d < cfg.n_drones; ++d) {
      rngs_.emplace_back(derive_seed(cfg.seed, 3, static_cast<std::uint64_t>(d)));
      gusts_.push_back({});
    }
  }

  FrameBundle render(long tick, const std::vector<GeoPoint>& robots,
                     const std::vector<DronePose>& poses) {
    const NoiseModel& nm = cfg_.noise;
    const CameraIntrinsics& cam = cfg_.camera;
    FrameBundle fb;
    fb.tick = tick;
    fb.timestamp = tick_time(cfg_, tick);
    fb.robots = robots;
    for (int d = 0; d < cfg_.n_drones; ++d) {
      Rng& rng = rngs_[static_cast<std::size_t>(d)];
      Gust& gust = gusts_[static_cast<std::size_t>(d)];
      const DronePose& truth = poses.at(static_cast<std::size_t>(d));

      DroneObservation obs;
      obs.drone_id = d;
      obs.reported_pose = truth;
      const EnuPoint gnss{rng.normal(0.0, nm.gnss_drone_sigma), rng.normal(0.0, nm.gnss_drone_sigma)};
      obs.reported_pose.position = from_enu(gnss, truth.position);
      obs.reported_pose.altitude = std::max(1.0, truth.altitude + rng.normal(0.0, nm.altitude_sigma));
      double hdg = std::fmod(truth.heading + rng.normal(0.0, nm.heading_sigma), 360.0);
      if (hdg < 0.0) hdg += 360.0;
      obs.reported_pose.heading = hdg >= 360.0 ? 0.0 : hdg;

      if (gust.remaining == 0 && rng.bernoulli(nm.turbulence.gust_prob)) {
        gust.remaining = nm.turbulence.gust_frames;
        gust.dx = rng.normal(0.0, nm.turbulence.shake_sigma_px);
        gust.dy = rng.normal(0.0, nm.turbulence.shake_sigma_px);
      }
      const double shake_x = gust.remaining > 0 ? gust.dx : 0.0;
      const double shake_y = gust.remaining > 0 ? gust.dy : 0.0;
      if (gust.remaining > 0) --gust.remaining;

      for (std::size_t r = 0; r < robots.size(); ++r) {
        // Every draw happens whether or not the robot is visible.
        const bool dropped = rng.bernoulli(nm.dropout_prob);
        const double jx = rng.normal(0.0, nm.pixel_sigma);
        const double jy = rng.normal(0.0, nm.pixel_sigma);
        const double conf = rng.uniform(nm.confidence_lo, nm.confidence_hi);
        if (dropped) continue;
        const auto px = geo_to_pixel(robots[r], truth, cam);
        if (!px) continue;
        const double cx = px->x + jx + shake_x;
        const double cy = px->y + jy + shake_y;
        if (cx < 0.0 || cx > cam.image_width || cy < 0.0 || cy > cam.image_height) continue;
        const auto [w, h] = box_size(robots[r], truth);
        obs.detections.push_back({{cx, cy, w, h}, conf, tick, fb.timestamp});
        obs.truth_labels.push_back(static_cast<int>(r));
      }
      fb.drones.push_back(std::move(obs));
    }
    return fb;
  }

 private:
  struct Gust {
    int remaining{0};
    double dx{0.0};
    double dy{0.0};
  };

  // Apparent size from slant range, foreshortened along the viewing direction.
  std::pair<double, double> box_size(const GeoPoint& robot, const DronePose& pose) const {
    const CameraIntrinsics& cam = cfg_.camera;
    const double ground = norm(to_enu(robot, pose.position));
    const double slant = std::hypot(ground, pose.altitude);
    const double w = cfg_.robot_size * cam.image_width * cam.focal_length / (cam.sensor_width * slant);
    const double h = cfg_.robot_size * cam.image_height * cam.focal_length / (cam.sensor_height * slant) *
                     (pose.altitude / slant);
    return {std::max(w, 2.0), std::max(h, 2.0)};
  }

  ScenarioConfig cfg_;
  std::vector<Rng> rngs_;
  std::vector<Gust> gusts_;
};

/// Everything the pipeline needs to replay one scenario.
struct Scenario {
  ScenarioConfig config;
  std::vector<RobotPath> paths;
  std::vector<std::vector<GeoPoint>> robot_ticks;  // [robot][tick]
  std::vector<GeoTrajectory> truth;                // [robot]
  std::vector<std::vector<DronePose>> drones;      // [drone][tick]

  long n_ticks() const { return robot_ticks.empty() ? 0 : static_cast<long>(robot_ticks.front().size()); }

  std::vector<GeoPoint> robots_at(long tick) const {
    std::vector<GeoPoint> out;
    for (const auto& r : robot_ticks) out.push_back(r.at(static_cast<std::size_t>(tick)));
    return out;
  }
  std::vector<DronePose> drones_at(long tick) const {
    std::vector<DronePose> out;
    for (const auto& d : drones) out.push_back(d.at(static_cast<std::size_t>(tick)));
    return out;
  }
  double truth_path_length() const {
    double total = 0.0;
    for (const auto& t : truth) total += t.path_length();
    return total;
  }
};

inline Scenario build_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Scenario sc;
  sc.config = cfg;
  std::vector<std::vector<EnuPoint>> enu;
  for (int r = 0; r < cfg.n_robots; ++r) {
    sc.paths.push_back(generate_robot_path(cfg, r));
    enu.push_back(robot_positions(cfg, sc.paths.back()));
    std::vector<GeoPoint> geo;
    geo.reserve(enu.back().size());
    for (const EnuPoint& e : enu.back()) geo.push_back(from_enu(e, cfg.origin));
    sc.robot_ticks.push_back(std::move(geo));
    sc.truth.push_back(generate_robot_trajectory(cfg, r));
  }
  sc.drones = generate_drone_paths(cfg, enu);
  return sc;
}

}  // namespace marinetrack
