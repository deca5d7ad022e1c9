#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "marinetrack/geodesy.hpp"

namespace marinetrack {

struct EkfParams {
  double dt{0.1};                // seconds
  double q_acc{1.0};             // (m/s^2)^2
  double r_meas{3.0};            // m^2
  double init_position_var{25.0};
  double init_velocity_var{4.0};
  int coast_limit{50};           // predict-only ticks before an ID goes stale

  void validate() const {
    if (!(dt > 0.0) || !(q_acc >= 0.0) || !(r_meas > 0.0) || !(init_position_var > 0.0) ||
        !(init_velocity_var > 0.0) || coast_limit < 0) {
      throw std::invalid_argument("invalid EKF parameters");
    }
  }
};

/// 2-D constant velocity in a local East-North frame. State is
/// (east, north, v_east, v_north); the measurement is position.
struct ConstantVelocity2D {
  using State = Eigen::Vector4d;
  using Cov = Eigen::Matrix4d;
  using Meas = Eigen::Vector2d;
  using MeasJacobian = Eigen::Matrix<double, 2, 4>;

  static State transition(const State& x, double dt) {
    State out = x;
    out(0) += dt * x(2);
    out(1) += dt * x(3);
    return out;
  }
  static Cov transition_jacobian(const State&, double dt) {
    Cov f = Cov::Identity();
    f(0, 2) = dt;
    f(1, 3) = dt;
    return f;
  }
  // White acceleration noise entering through G = [dt^2/2 I; dt I].
  static Cov process_noise(const State&, double dt, double q_acc) {
    Eigen::Matrix<double, 4, 2> g = Eigen::Matrix<double, 4, 2>::Zero();
    g(0, 0) = g(1, 1) = 0.5 * dt * dt;
    g(2, 0) = g(3, 1) = dt;
    return q_acc * g * g.transpose();
  }
  static Meas measure(const State& x) { return x.head<2>(); }
  static MeasJacobian measurement_jacobian(const State&) {
    MeasJacobian h = MeasJacobian::Zero();
    h(0, 0) = h(1, 1) = 1.0;
    return h;
  }
};

struct EkfState {
  Eigen::Vector4d x = Eigen::Vector4d::Zero();  // local ENU position and velocity
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Identity();
  GeoPoint anchor;  // origin of the local frame

  EnuPoint position() const { return {x(0), x(1)}; }
  GeoPoint geo(const GeodesyParams& geo = {}) const { return from_enu(position(), anchor, geo); }
};

inline EkfState ekf_initialize(const GeoPoint& at, const EkfParams& p) {
  EkfState s;
  s.anchor = at;
  s.covariance = Eigen::Vector4d(p.init_position_var, p.init_position_var, p.init_velocity_var,
                                 p.init_velocity_var)
                     .asDiagonal();
  return s;
}

template <typename Model = ConstantVelocity2D>
EkfState ekf_predict(const EkfState& s, const EkfParams& p) {
  EkfState out = s;
  const auto f = Model::transition_jacobian(s.x, p.dt);
  out.x = Model::transition(s.x, p.dt);
  out.covariance = f * s.covariance * f.transpose() + Model::process_noise(s.x, p.dt, p.q_acc);
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

template <typename Model = ConstantVelocity2D>
EkfState ekf_update(const EkfState& s, const GeoPoint& z, const EkfParams& p,
                    const GeodesyParams& geo = {}) {
  const EnuPoint local = to_enu(z, s.anchor, geo);
  const Eigen::Vector2d meas(local.east, local.north);
  const auto h = Model::measurement_jacobian(s.x);
  const Eigen::Matrix2d r = p.r_meas * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d innov_cov = h * s.covariance * h.transpose() + r;
  const Eigen::Matrix<double, 4, 2> gain = s.covariance * h.transpose() * innov_cov.inverse();

  EkfState out = s;
  out.x = s.x + gain * (meas - Model::measure(s.x));
  // Joseph form keeps the covariance positive semidefinite.
  const Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity() - gain * h;
  out.covariance = ikh * s.covariance * ikh.transpose() + gain * r * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

struct WeightedGeo {
  GeoPoint position;
  double confidence{0.0};
  int drone_id{-1};
};

class AllZeroConfidence : public std::domain_error {
 public:
  AllZeroConfidence() : std::domain_error("confidence_weighted_fuse: confidences sum to zero") {}
};

/// Confidence-weighted mean of position estimates, computed in a local
/// frame about the group centroid.
inline GeoPoint confidence_weighted_fuse(std::span<const WeightedGeo> estimates,
                                         const GeodesyParams& geo = {}) {
  double total = 0.0;
  for (const auto& e : estimates) {
    if (!(e.confidence >= 0.0)) throw std::invalid_argument("negative or NaN confidence");
    total += e.confidence;
  }
  if (estimates.empty() || !(total > 0.0)) throw AllZeroConfidence();
  if (estimates.size() == 1) return estimates.front().position;

  double lat = 0.0;
  double lon = 0.0;
  for (const auto& e : estimates) {
    lat += e.position.lat;
    lon += e.position.lon;
  }
  const auto n = static_cast<double>(estimates.size());
  const GeoPoint centroid{lat / n, lon / n};
  EnuPoint acc;
  for (const auto& e : estimates) {
    const EnuPoint local = to_enu(e.position, centroid, geo);
    acc.east += e.confidence * local.east;
    acc.north += e.confidence * local.north;
  }
  return from_enu({acc.east / total, acc.north / total}, centroid, geo);
}

struct FusedEstimate {
  long global_id{0};
  long tick{0};
  std::optional<GeoPoint> raw_fused;  // absent while coasting
  GeoPoint filtered;
  double total_confidence{0.0};
  std::vector<int> contributing_drones;
};

struct FusionTrack {
  EkfState state;
  int coasting{0};
};

struct FuseTickResult {
  std::vector<FusedEstimate> estimates;  // ascending global_id
  std::vector<long> zero_confidence_ids;
};

/// One fusion tick: each ID's estimates are merged by confidence and run
/// through predict + update. IDs without estimates coast on prediction and
/// are dropped once they have coasted longer than `coast_limit` ticks.
inline FuseTickResult fuse_tick(const std::map<long, std::vector<WeightedGeo>>& groups,
                                std::map<long, FusionTrack>& states, const EkfParams& p,
                                long tick, const GeodesyParams& geo = {}) {
  FuseTickResult result;
  std::map<long, std::pair<GeoPoint, const std::vector<WeightedGeo>*>> measured;
  for (const auto& [id, group] : groups) {
    try {
      measured.emplace(id, std::pair{confidence_weighted_fuse(group, geo), &group});
    } catch (const AllZeroConfidence&) {
      result.zero_confidence_ids.push_back(id);
    }
  }

  for (const auto& [id, m] : measured) {
    if (!states.contains(id)) states.emplace(id, FusionTrack{ekf_initialize(m.first, p), 0});
    else {
      FusionTrack& ft = states.at(id);
      ft.state = ekf_update(ekf_predict(ft.state, p), m.first, p, geo);
      ft.coasting = 0;
    }
  }

  for (auto it = states.begin(); it != states.end();) {
    const long id = it->first;
    FusionTrack& ft = it->second;
    FusedEstimate est;
    est.global_id = id;
    est.tick = tick;
    if (auto m = measured.find(id); m != measured.end()) {
      est.raw_fused = m->second.first;
      for (const auto& e : *m->second.second) {
        est.total_confidence += e.confidence;
        if (e.drone_id >= 0 && std::find(est.contributing_drones.begin(),
                                         est.contributing_drones.end(),
                                         e.drone_id) == est.contributing_drones.end()) {
          est.contributing_drones.push_back(e.drone_id);
        }
      }
      std::sort(est.contributing_drones.begin(), est.contributing_drones.end());
    } else {
      ft.state = ekf_predict(ft.state, p);
      if (++ft.coasting > p.coast_limit) {
        it = states.erase(it);
        continue;
      }
    }
    est.filtered = ft.state.geo(geo);
    result.estimates.push_back(std::move(est));
    ++it;
  }
  return result;
}

}  // namespace marinetrack
