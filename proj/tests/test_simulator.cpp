#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "marinetrack/simulator.hpp"
#include "oracles/projection_oracle.hpp"

using namespace marinetrack;
using Catch::Approx;

namespace {

std::vector<FrameBundle> render_all(const Scenario& sc) {
  FrameRenderer r(sc.config);
  std::vector<FrameBundle> out;
  for (long t = 0; t < sc.n_ticks(); ++t) out.push_back(r.render(t, sc.robots_at(t), sc.drones_at(t)));
  return out;
}

bool same_frames(const std::vector<FrameBundle>& a, const std::vector<FrameBundle>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t d = 0; d < a[k].drones.size(); ++d) {
      const auto& x = a[k].drones[d];
      const auto& y = b[k].drones[d];
      if (x.detections.size() != y.detections.size()) return false;
      if (x.reported_pose.position.lat != y.reported_pose.position.lat) return false;
      if (x.reported_pose.heading != y.reported_pose.heading) return false;
      for (std::size_t i = 0; i < x.detections.size(); ++i) {
        const auto& p = x.detections[i];
        const auto& q = y.detections[i];
        if (p.bbox.cx != q.bbox.cx || p.bbox.cy != q.bbox.cy || p.bbox.width != q.bbox.width ||
            p.confidence != q.confidence)
          return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("straight course length and duration") {
  const ScenarioConfig cfg = ScenarioConfig::for_category(Category::Linear3);
  CHECK(cfg.duration() == Approx(400.0));
  CHECK(cfg.n_ticks() == 4001);
  for (int r = 0; r < cfg.n_robots; ++r) {
    const RobotPath p = generate_robot_path(cfg, r);
    CHECK(p.length() == Approx(600.0).margin(0.5));
    const double chord = norm(p.points().back() - p.points().front());
    CHECK(chord == Approx(600.0).epsilon(0.01));
  }
}

TEST_CASE("hard turns double back") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    ScenarioConfig cfg = ScenarioConfig::for_category(Category::HardTurns3);
    cfg.seed = seed;
    const RobotPath p = generate_robot_path(cfg, 0);
    const double net = norm(p.points().back() - p.points().front());
    CHECK(net < 0.25 * p.length());
  }
}

TEST_CASE("curved course bends") {
  ScenarioConfig cfg = ScenarioConfig::for_category(Category::NonLinear3);
  const RobotPath p = generate_robot_path(cfg, 0);
  CHECK(p.length() == Approx(cfg.course_length).margin(0.5));
  double max_dev = 0.0;
  const EnuPoint a = p.points().front(), b = p.points().back();
  const EnuPoint ab = b - a;
  for (const EnuPoint& q : p.points()) {
    const EnuPoint aq = q - a;
    max_dev = std::max(max_dev, std::abs(ab.east * aq.north - ab.north * aq.east) / norm(ab));
  }
  CHECK(max_dev > 5.0);
}

TEST_CASE("same seed gives identical frames, another seed does not") {
  ScenarioConfig cfg = ScenarioConfig::for_category(Category::NonLinear3);
  cfg.course_length = 60;
  cfg.noise.pixel_sigma = 3;
  cfg.noise.gnss_drone_sigma = 0.5;
  cfg.noise.dropout_prob = 0.1;
  cfg.noise.turbulence = {20, 0.1, 5};
  cfg.seed = 77;
  const auto a = render_all(build_scenario(cfg));
  const auto b = render_all(build_scenario(cfg));
  CHECK(same_frames(a, b));
  cfg.seed = 78;
  CHECK_FALSE(same_frames(a, render_all(build_scenario(cfg))));
}

TEST_CASE("drone altitudes are strictly increasing") {
  const Scenario sc = build_scenario(ScenarioConfig::for_category(Category::Linear3));
  for (long t = 0; t < sc.n_ticks(); t += 97) {
    const auto poses = sc.drones_at(t);
    for (std::size_t d = 1; d < poses.size(); ++d) CHECK(poses[d].altitude > poses[d - 1].altitude);
  }
  ScenarioConfig bad;
  bad.drone_altitudes = {60, 40, 80};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("robots stay in view of every drone") {
  for (Category c : {Category::Linear3, Category::NonLinear3, Category::HardTurns3}) {
    const Scenario sc = build_scenario(ScenarioConfig::for_category(c));
    for (std::size_t d = 0; d < sc.drones.size(); ++d) {
      for (std::size_t r = 0; r < sc.robot_ticks.size(); ++r) {
        long in_view = 0;
        for (long t = 0; t < sc.n_ticks(); ++t) {
          const auto& pose = sc.drones[d][static_cast<std::size_t>(t)];
          if (geo_to_pixel(sc.robot_ticks[r][static_cast<std::size_t>(t)], pose, sc.config.camera)) ++in_view;
        }
        INFO(to_string(c) << " drone " << d << " robot " << r);
        CHECK(static_cast<double>(in_view) >= 0.99 * static_cast<double>(sc.n_ticks()));
      }
    }
  }
}

TEST_CASE("a nearly static robot is seen every frame") {
  ScenarioConfig cfg = ScenarioConfig::for_category(Category::Linear3);
  cfg.n_robots = 1;
  cfg.course_length = 0.5;
  const Scenario sc = build_scenario(cfg);
  for (const auto& fb : render_all(sc)) {
    for (const auto& obs : fb.drones) CHECK(obs.detections.size() == 1);
  }
}

TEST_CASE("noiseless pixels project back onto the truth") {
  ScenarioConfig cfg = ScenarioConfig::for_category(Category::NonLinear3);
  cfg.course_length = 100;
  const Scenario sc = build_scenario(cfg);
  for (const auto& fb : render_all(sc)) {
    for (const auto& obs : fb.drones) {
      for (std::size_t i = 0; i < obs.detections.size(); ++i) {
        const auto t = project_detection(obs.detections[i], obs.reported_pose, cfg.camera);
        CHECK(haversine_distance(t.estimate, fb.robots[static_cast<std::size_t>(obs.truth_labels[i])]) < 1e-6);
      }
    }
  }
}

TEST_CASE("full dropout empties every frame") {
  ScenarioConfig cfg = ScenarioConfig::for_category(Category::Linear3);
  cfg.course_length = 30;
  cfg.noise.dropout_prob = 1.0;
  for (const auto& fb : render_all(build_scenario(cfg))) {
    for (const auto& obs : fb.drones) CHECK(obs.detections.empty());
  }
}

TEST_CASE("turbulence shifts every detection of a frame alike") {
  ScenarioConfig cfg = ScenarioConfig::for_category(Category::Linear3);
  cfg.course_length = 80;
  cfg.noise.turbulence = {15, 0.3, 3};
  const Scenario sc = build_scenario(cfg);
  FrameRenderer r(cfg);
  int shaken = 0;
  for (long t = 0; t < sc.n_ticks(); ++t) {
    const auto poses = sc.drones_at(t);
    const FrameBundle fb = r.render(t, sc.robots_at(t), poses);
    for (std::size_t d = 0; d < fb.drones.size(); ++d) {
      const auto& obs = fb.drones[d];
      if (obs.detections.size() < 2) continue;
      std::vector<PixelPoint> offs;
      for (std::size_t i = 0; i < obs.detections.size(); ++i) {
        const auto px = geo_to_pixel(fb.robots[static_cast<std::size_t>(obs.truth_labels[i])], poses[d], cfg.camera);
        REQUIRE(px);
        offs.push_back({obs.detections[i].bbox.cx - px->x, obs.detections[i].bbox.cy - px->y});
      }
      for (const auto& o : offs) {
        CHECK(o.x == Approx(offs[0].x).margin(1e-9));
        CHECK(o.y == Approx(offs[0].y).margin(1e-9));
      }
      if (std::abs(offs[0].x) > 1e-9) ++shaken;
    }
  }
  CHECK(shaken > 0);
}

TEST_CASE("confidences stay in the configured range") {
  ScenarioConfig cfg = ScenarioConfig::for_category(Category::Linear3);
  cfg.course_length = 30;
  cfg.noise.confidence_lo = 0.3;
  cfg.noise.confidence_hi = 0.4;
  for (const auto& fb : render_all(build_scenario(cfg))) {
    for (const auto& obs : fb.drones) {
      for (const auto& d : obs.detections) {
        CHECK(d.confidence >= 0.3);
        CHECK(d.confidence <= 0.4);
      }
    }
  }
}

TEST_CASE("truth timestamps carry at most the configured delay") {
  ScenarioConfig cfg = ScenarioConfig::for_category(Category::Linear3);
  cfg.noise.timestamp_jitter = 0.02;
  const GeoTrajectory t = generate_robot_trajectory(cfg, 0);
  CHECK(t.size() == 401);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double lag = t.samples()[k].timestamp - static_cast<double>(k);
    CHECK(lag >= 0.0);
    CHECK(lag <= 0.02);
  }
  cfg.noise.timestamp_jitter = 0.05;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("pixel noise error matches a Monte Carlo through the projection") {
  ScenarioConfig cfg = ScenarioConfig::for_category(Category::Linear1);
  cfg.n_robots = 1;
  cfg.drone_altitudes = {100.0};
  cfg.drone_lateral_offsets = {0.0};
  cfg.drone_tilt_deg = 30.0;
  cfg.noise.pixel_sigma = 2.0;
  cfg.seed = 5;
  const Scenario sc = build_scenario(cfg);
  double sum = 0.0;
  long n = 0;
  for (const auto& fb : render_all(sc)) {
    const auto& obs = fb.drones[0];
    for (const auto& d : obs.detections) {
      sum += haversine_distance(project_detection(d, obs.reported_pose, cfg.camera).estimate, fb.robots[0]);
      ++n;
    }
  }
  REQUIRE(n > 3000);
  const double observed = sum / static_cast<double>(n);

  const CameraIntrinsics& cam = cfg.camera;
  std::mt19937 gen(2024);
  std::normal_distribution<double> px(0.0, 2.0);
  double n0, e0;
  oracle::ground_offset(0, 0, cam.image_width, cam.image_height, cam.focal_length, cam.sensor_width,
                        cam.sensor_height, 100.0, 30.0, n0, e0);
  double acc = 0.0;
  const int samples = 200000;
  for (int i = 0; i < samples; ++i) {
    double nn, ee;
    oracle::ground_offset(px(gen), px(gen), cam.image_width, cam.image_height, cam.focal_length,
                          cam.sensor_width, cam.sensor_height, 100.0, 30.0, nn, ee);
    acc += std::hypot(nn - n0, ee - e0);
  }
  const double expected = acc / samples;
  INFO("observed " << observed << " expected " << expected);
  CHECK(std::abs(observed - expected) <= 0.05 * expected);
}

TEST_CASE("category names round trip") {
  for (Category c : {Category::Linear3, Category::Linear2, Category::Linear1, Category::NonLinear3,
                     Category::HardTurns3}) {
    CHECK(category_from_string(to_string(c)) == c);
  }
  CHECK_FALSE(category_from_string("Spiral"));
}
