#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "marinetrack/fusion.hpp"
#include "oracles/kf_oracle.hpp"

using namespace marinetrack;
using Catch::Approx;

namespace {

const GeoPoint kOrigin{45.5, -73.6};

GeoPoint at(double e, double n) { return from_enu({e, n}, kOrigin); }

bool close(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("single estimate passes through") {
  const std::vector<WeightedGeo> one{{at(3, 4), 0.4, 0}};
  const GeoPoint f = confidence_weighted_fuse(one);
  CHECK(f.lat == one[0].position.lat);
  CHECK(f.lon == one[0].position.lon);
}

TEST_CASE("equal confidences give the midpoint") {
  const std::vector<WeightedGeo> two{{at(0, 0), 0.7, 0}, {at(10, -4), 0.7, 1}};
  const EnuPoint m = to_enu(confidence_weighted_fuse(two), kOrigin);
  CHECK(m.east == Approx(5.0).margin(1e-9));
  CHECK(m.north == Approx(-2.0).margin(1e-9));
}

TEST_CASE("three confidences weight the east coordinate") {
  const std::vector<WeightedGeo> three{{at(0, 0), 0.9, 0}, {at(1, 0), 0.6, 1}, {at(2, 0), 0.3, 2}};
  const EnuPoint m = to_enu(confidence_weighted_fuse(three), kOrigin);
  CHECK(m.east == Approx(1.2 / 1.8).margin(1e-9));
  CHECK(m.north == Approx(0.0).margin(1e-9));
}

TEST_CASE("fusion is scale invariant and stays inside the inputs' box") {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> pos(-50, 50), c(0.05, 1), k(0.1, 10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WeightedGeo> v;
    for (int i = 0; i < 4; ++i) v.push_back({at(pos(gen), pos(gen)), c(gen), i});
    const GeoPoint f = confidence_weighted_fuse(v);
    const double s = k(gen);
    std::vector<WeightedGeo> scaled = v;
    for (auto& e : scaled) e.confidence *= s;
    const GeoPoint g = confidence_weighted_fuse(scaled);
    CHECK(g.lat == Approx(f.lat).epsilon(1e-12));
    CHECK(g.lon == Approx(f.lon).epsilon(1e-12));
    double lo_lat = 90, hi_lat = -90, lo_lon = 180, hi_lon = -180;
    for (const auto& e : v) {
      lo_lat = std::min(lo_lat, e.position.lat);
      hi_lat = std::max(hi_lat, e.position.lat);
      lo_lon = std::min(lo_lon, e.position.lon);
      hi_lon = std::max(hi_lon, e.position.lon);
    }
    CHECK(f.lat >= lo_lat - 1e-12);
    CHECK(f.lat <= hi_lat + 1e-12);
    CHECK(f.lon >= lo_lon - 1e-12);
    CHECK(f.lon <= hi_lon + 1e-12);
  }
}

TEST_CASE("zero or negative confidence") {
  const std::vector<WeightedGeo> zero{{at(0, 0), 0.0, 0}, {at(1, 1), 0.0, 1}};
  CHECK_THROWS_AS(confidence_weighted_fuse(zero), AllZeroConfidence);
  CHECK_THROWS_AS(confidence_weighted_fuse(std::vector<WeightedGeo>{}), AllZeroConfidence);
  const std::vector<WeightedGeo> neg{{at(0, 0), -0.1, 0}};
  CHECK_THROWS_AS(confidence_weighted_fuse(neg), std::invalid_argument);
}

TEST_CASE("static noiseless prediction changes nothing") {
  EkfParams p;
  p.q_acc = 0.0;
  EkfState s = ekf_initialize(kOrigin, p);
  s.x << 2.0, -1.0, 0.0, 0.0;
  s.covariance = Eigen::Vector4d(25, 25, 0, 0).asDiagonal();
  const EkfState n = ekf_predict(s, p);
  CHECK(n.x == s.x);
  CHECK(n.covariance == s.covariance);
}

TEST_CASE("prediction advances by v dt") {
  EkfParams p;
  EkfState s = ekf_initialize(kOrigin, p);
  s.x << 0.0, 0.0, 1.0, 0.0;
  const EkfState n = ekf_predict(s, p);
  CHECK(n.x(0) == Approx(0.1));
  CHECK(n.x(1) == 0.0);
}

TEST_CASE("update at the predicted position keeps the mean") {
  EkfParams p;
  EkfState s = ekf_initialize(kOrigin, p);
  s.x << 4.0, -3.0, 1.0, 0.5;
  const EkfState pred = ekf_predict(s, p);
  const EkfState u = ekf_update(pred, pred.geo(), p);
  CHECK(u.x(0) == Approx(pred.x(0)).margin(1e-9));
  CHECK(u.x(1) == Approx(pred.x(1)).margin(1e-9));
  CHECK(u.x(2) == Approx(pred.x(2)).margin(1e-9));
}

TEST_CASE("huge measurement noise leaves the prediction") {
  EkfParams p;
  p.r_meas = 1e12;
  EkfState s = ekf_initialize(kOrigin, p);
  s.x << 4.0, -3.0, 1.0, 0.5;
  const EkfState pred = ekf_predict(s, p);
  const EkfState u = ekf_update(pred, at(500, 500), p);
  CHECK(u.x(0) == Approx(pred.x(0)).margin(1e-6));
  CHECK(u.x(1) == Approx(pred.x(1)).margin(1e-6));
}

TEST_CASE("recursion matches the dense oracle") {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> noise(0.0, 1.5);
  std::uniform_real_distribution<double> vel(-3, 3);
  const EkfParams p;
  for (int seq = 0; seq < 20; ++seq) {
    const double ve = vel(gen), vn = vel(gen);
    EkfState s = ekf_initialize(kOrigin, p);
    oracle::Kf ref(0, 0, p.init_position_var, p.init_velocity_var, p.dt, p.q_acc, p.r_meas);
    for (int k = 1; k <= 200; ++k) {
      const double ze = ve * k * p.dt + noise(gen), zn = vn * k * p.dt + noise(gen);
      s = ekf_update(ekf_predict(s, p), at(ze, zn), p);
      const EnuPoint z = to_enu(at(ze, zn), kOrigin);
      ref.predict();
      ref.update(z.east, z.north);
    }
    for (int i = 0; i < 4; ++i) {
      CHECK(close(s.x(i), ref.x[static_cast<std::size_t>(i)]));
      for (int j = 0; j < 4; ++j) CHECK(close(s.covariance(i, j), ref.p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
    }
    CHECK((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("repeated identical measurements converge") {
  const EkfParams p;
  const GeoPoint z = at(12.0, -7.0);
  std::map<long, FusionTrack> states;
  for (long k = 0; k < 100; ++k) fuse_tick({{1, {{z, 0.8, 0}}}}, states, p, k);
  CHECK(haversine_distance(states.at(1).state.geo(), z) < 1e-3);

  // started 3 m off
  EkfState s = ekf_initialize(at(9.0, -7.0), p);
  for (int k = 0; k < 100; ++k) s = ekf_update(ekf_predict(s, p), z, p);
  CHECK(haversine_distance(s.geo(), z) < 1e-3);
}

TEST_CASE("coasting ids drift within the kinematic bound and then expire") {
  EkfParams p;
  std::map<long, FusionTrack> states;
  const double v = 1.5;
  for (long tick = 0; tick < 100; ++tick) {
    std::map<long, std::vector<WeightedGeo>> groups{{1, {{at(v * tick * p.dt, 0), 0.9, 0}}}};
    fuse_tick(groups, states, p, tick);
  }
  const double initial = std::abs(states.at(1).state.x(0) - v * 99 * p.dt);
  long tick = 100;
  for (; tick < 110; ++tick) fuse_tick({}, states, p, tick);
  const double truth = v * 109 * p.dt;
  CHECK(std::abs(states.at(1).state.x(0) - truth) < v * 10 * p.dt + initial);
  CHECK(states.at(1).coasting == 10);
  for (; tick < 150; ++tick) fuse_tick({}, states, p, tick);
  CHECK(states.contains(1));
  const auto r = fuse_tick({}, states, p, tick);
  CHECK_FALSE(states.contains(1));
  CHECK(r.estimates.empty());
}

TEST_CASE("fuse tick reports raw values only when measured") {
  EkfParams p;
  std::map<long, FusionTrack> states;
  std::map<long, std::vector<WeightedGeo>> groups{{3, {{at(0, 0), 0.8, 2}, {at(2, 0), 0.8, 0}}},
                                                  {5, {{at(40, 0), 0.0, 1}}}};
  const auto r = fuse_tick(groups, states, p, 0);
  REQUIRE(r.estimates.size() == 1);
  CHECK(r.estimates[0].global_id == 3);
  CHECK(r.estimates[0].raw_fused.has_value());
  CHECK(r.estimates[0].total_confidence == Approx(1.6));
  CHECK(r.estimates[0].contributing_drones == std::vector<int>{0, 2});
  CHECK(r.zero_confidence_ids == std::vector<long>{5});
  const auto next = fuse_tick({}, states, p, 1);
  REQUIRE(next.estimates.size() == 1);
  CHECK_FALSE(next.estimates[0].raw_fused.has_value());
}

TEST_CASE("invalid filter parameters") {
  EkfParams p;
  p.dt = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.r_meas = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
