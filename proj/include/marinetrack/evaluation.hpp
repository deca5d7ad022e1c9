#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "marinetrack/geodesy.hpp"
#include "marinetrack/kdtree.hpp"

namespace marinetrack {

struct TimedGeo {
  double timestamp{0.0};  // seconds
  GeoPoint point;
};

class GeoTrajectory {
 public:
  GeoTrajectory() = default;
  GeoTrajectory(std::vector<TimedGeo> samples, double sample_rate_hz)
      : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
    for (std::size_t i = 1; i < samples_.size(); ++i) {
      if (!(samples_[i].timestamp > samples_[i - 1].timestamp)) {
        throw std::invalid_argument("GeoTrajectory: timestamps must be strictly increasing (index " +
                                    std::to_string(i) + ")");
      }
    }
  }

  const std::vector<TimedGeo>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double sample_rate_hz() const { return sample_rate_hz_; }

  std::vector<GeoPoint> points() const {
    std::vector<GeoPoint> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) out.push_back(s.point);
    return out;
  }

  double path_length(const GeodesyParams& geo = {}) const {
    double total = 0.0;
    for (std::size_t i = 1; i < samples_.size(); ++i) {
      total += haversine_distance(samples_[i - 1].point, samples_[i].point, geo);
    }
    return total;
  }

 private:
  std::vector<TimedGeo> samples_;
  double sample_rate_hz_{0.0};
};

/// How an estimated point is paired with the truth line.
enum class Correspondence {
  NearestVertex,   // nearest truth sample
  NearestSegment,  // closest point on the truth polyline
};

struct IcpParams {
  int max_iterations{300};
  double convergence_epsilon{1e-6};  // meters
  Correspondence correspondence{Correspondence::NearestSegment};

  void validate() const {
    if (max_iterations < 1 || !(convergence_epsilon > 0.0)) {
      throw std::invalid_argument("ICP needs max_iterations >= 1 and convergence_epsilon > 0");
    }
  }
};

struct ErrorReport {
  double mean_error{0.0};
  double std_error{0.0};
  std::vector<double> per_point_errors;
  EnuPoint applied_translation;
  int iterations_used{0};
};

/// Linear-scan reference lives in the tests; this is the indexed query.
inline std::size_t nearest_neighbor_index(const EnuPoint& query, std::span<const EnuPoint> points) {
  if (points.empty()) throw std::invalid_argument("nearest_neighbor_index: empty point set");
  return KdTree2D(points).nearest(query);
}

/// Closest-point queries against a polyline, indexed by a k-d tree over its vertices.
class PolylineMatcher {
 public:
  PolylineMatcher(std::vector<EnuPoint> vertices, Correspondence mode)
      : vertices_(std::move(vertices)), tree_(vertices_), mode_(mode) {
    if (vertices_.empty()) throw std::invalid_argument("PolylineMatcher: empty polyline");
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
      max_segment_ = std::max(max_segment_, norm(vertices_[i] - vertices_[i - 1]));
    }
  }

  EnuPoint closest(const EnuPoint& q) const {
    const std::size_t v = tree_.nearest(q);
    if (mode_ == Correspondence::NearestVertex || vertices_.size() == 1) return vertices_[v];

    // Any segment passing within d of q has an endpoint within d + L/2 of q.
    const double d = norm(vertices_[v] - q);
    EnuPoint best = vertices_[v];
    double best_d2 = d * d;
    for (std::size_t i : tree_.within(q, d + 0.5 * max_segment_ + 1e-9)) {
      for (std::size_t s : {i, i + 1}) {
        if (s == 0 || s >= vertices_.size()) continue;
        const EnuPoint c = closest_on_segment(q, vertices_[s - 1], vertices_[s]);
        const EnuPoint diff = c - q;
        const double d2 = diff.east * diff.east + diff.north * diff.north;
        if (d2 < best_d2) {
          best_d2 = d2;
          best = c;
        }
      }
    }
    return best;
  }

  double distance(const EnuPoint& q) const { return norm(closest(q) - q); }

 private:
  static EnuPoint closest_on_segment(const EnuPoint& q, const EnuPoint& a, const EnuPoint& b) {
    const EnuPoint ab = b - a;
    const double len2 = ab.east * ab.east + ab.north * ab.north;
    if (len2 <= 0.0) return a;
    const EnuPoint aq = q - a;
    const double t = std::clamp((aq.east * ab.east + aq.north * ab.north) / len2, 0.0, 1.0);
    return a + t * ab;
  }

  std::vector<EnuPoint> vertices_;
  KdTree2D tree_;
  Correspondence mode_;
  double max_segment_{0.0};
};

namespace detail {

inline GeoPoint joint_mean(const GeoTrajectory& a, const GeoTrajectory& b) {
  std::vector<GeoPoint> all = a.points();
  const auto more = b.points();
  all.insert(all.end(), more.begin(), more.end());
  return mean_location(all);
}

inline std::vector<EnuPoint> project_all(const GeoTrajectory& t, const GeoPoint& origin,
                                         const GeodesyParams& geo) {
  std::vector<EnuPoint> out;
  out.reserve(t.size());
  for (const auto& s : t.samples()) out.push_back(to_enu(s.point, origin, geo));
  return out;
}

}  // namespace detail

struct IcpResult {
  GeoTrajectory aligned;
  EnuPoint translation;
  int iterations{0};
};

/// Translation-only ICP of `estimated` onto `truth`. Both are projected about
/// their joint mean; each iteration pairs every estimated point with the truth
/// line and shifts by the difference of the matched centroids. Descends from
/// zero; when the centroid offset already scores a lower mean squared residual
/// than that result, also descends from there and keeps the better of the two.
inline IcpResult icp_translate(const GeoTrajectory& estimated, const GeoTrajectory& truth,
                               const IcpParams& p = {}, const GeodesyParams& geo = {}) {
  p.validate();
  if (estimated.empty() || truth.empty()) throw std::invalid_argument("icp_translate: empty trajectory");
  const GeoPoint origin = detail::joint_mean(estimated, truth);
  const std::vector<EnuPoint> est = detail::project_all(estimated, origin, geo);
  const std::vector<EnuPoint> ref = detail::project_all(truth, origin, geo);
  const PolylineMatcher matcher(ref, p.correspondence);
  const auto n = static_cast<double>(est.size());

  auto cost = [&](const EnuPoint& t) {
    double c = 0.0;
    for (const EnuPoint& e : est) {
      const double r = norm(matcher.closest(e + t) - (e + t));
      c += r * r / n;
    }
    return c;
  };
  struct Descent {
    EnuPoint total;
    int iterations{0};
    double cost{0.0};
  };
  auto descend = [&](EnuPoint total) {
    Descent d;
    for (int it = 1; it <= p.max_iterations; ++it) {
      d.iterations = it;
      EnuPoint src_sum;
      EnuPoint dst_sum;
      for (const EnuPoint& e : est) {
        const EnuPoint moved = e + total;
        src_sum = src_sum + moved;
        dst_sum = dst_sum + matcher.closest(moved);
      }
      const EnuPoint step = (1.0 / n) * (dst_sum - src_sum);
      total = total + step;
      if (norm(step) < p.convergence_epsilon) break;
    }
    d.total = total;
    d.cost = cost(total);
    return d;
  };

  EnuPoint est_mean, ref_mean;
  for (const EnuPoint& e : est) est_mean = est_mean + (1.0 / n) * e;
  for (const EnuPoint& r : ref) ref_mean = ref_mean + (1.0 / static_cast<double>(ref.size())) * r;
  Descent best = descend({});
  const EnuPoint offset = ref_mean - est_mean;
  if (norm(offset - best.total) >= p.convergence_epsilon && cost(offset) < best.cost) {
    const Descent alt = descend(offset);
    if (alt.cost < best.cost - 1e-9 * std::max(1.0, best.cost)) best = alt;
  }
  const EnuPoint total = best.total;
  const int iterations = best.iterations;

  std::vector<TimedGeo> aligned;
  aligned.reserve(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    aligned.push_back({estimated.samples()[i].timestamp, from_enu(est[i] + total, origin, geo)});
  }
  return {GeoTrajectory(std::move(aligned), estimated.sample_rate_hz()), total, iterations};
}

/// Distance from each estimated point to the truth line, in a frame about the
/// joint mean of both trajectories.
inline ErrorReport compute_errors(const GeoTrajectory& aligned, const GeoTrajectory& truth,
                                  Correspondence mode = Correspondence::NearestSegment,
                                  const GeodesyParams& geo = {}) {
  ErrorReport r;
  if (aligned.empty()) return r;
  if (truth.empty()) throw std::invalid_argument("compute_errors: empty truth trajectory");
  const GeoPoint origin = detail::joint_mean(aligned, truth);
  const PolylineMatcher matcher(detail::project_all(truth, origin, geo), mode);
  r.per_point_errors.reserve(aligned.size());
  double sum = 0.0;
  for (const auto& s : aligned.samples()) {
    const double e = matcher.distance(to_enu(s.point, origin, geo));
    r.per_point_errors.push_back(e);
    sum += e;
  }
  const auto n = static_cast<double>(r.per_point_errors.size());
  r.mean_error = sum / n;
  double var = 0.0;
  for (double e : r.per_point_errors) var += (e - r.mean_error) * (e - r.mean_error);
  r.std_error = std::sqrt(var / n);
  return r;
}

/// ICP alignment followed by error statistics.
inline ErrorReport evaluate_trajectory(const GeoTrajectory& estimated, const GeoTrajectory& truth,
                                       const IcpParams& p = {}, const GeodesyParams& geo = {}) {
  const IcpResult icp = icp_translate(estimated, truth, p, geo);
  ErrorReport r = compute_errors(icp.aligned, truth, p.correspondence, geo);
  r.applied_translation = icp.translation;
  r.iterations_used = icp.iterations;
  return r;
}

/// Pools per-point errors of several reports into one summary.
inline ErrorReport merge_reports(std::span<const ErrorReport> reports) {
  ErrorReport out;
  for (const auto& r : reports) {
    out.per_point_errors.insert(out.per_point_errors.end(), r.per_point_errors.begin(),
                                r.per_point_errors.end());
    out.iterations_used = std::max(out.iterations_used, r.iterations_used);
  }
  if (out.per_point_errors.empty()) return out;
  double sum = 0.0;
  for (double e : out.per_point_errors) sum += e;
  const auto n = static_cast<double>(out.per_point_errors.size());
  out.mean_error = sum / n;
  double var = 0.0;
  for (double e : out.per_point_errors) var += (e - out.mean_error) * (e - out.mean_error);
  out.std_error = std::sqrt(var / n);
  return out;
}

/// One reported association: on `drone` at `tick`, the detection of truth
/// robot `robot` carried `global_id`.
struct IdObservation {
  long tick{0};
  int drone{0};
  int robot{0};
  long global_id{0};
};

struct IdSwitchReport {
  std::map<int, long> switches_per_drone;
  long total_switches{0};
  double path_length_m{0.0};
  double switches_per_drone_per_500m{0.0};
};

/// A switch is counted whenever a robot's reported ID on a drone differs from
/// the ID last reported for it on that drone. Frames without a report do not
/// reset the memory. The rate is averaged over `n_drones` and normalized by
/// total ground-truth travel.
inline IdSwitchReport count_id_switches(std::span<const IdObservation> log, int n_drones,
                                        double path_length_m) {
  IdSwitchReport r;
  r.path_length_m = path_length_m;
  for (int d = 0; d < n_drones; ++d) r.switches_per_drone[d] = 0;

  std::vector<IdObservation> sorted(log.begin(), log.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const IdObservation& a, const IdObservation& b) { return a.tick < b.tick; });
  std::map<std::pair<int, int>, long> last;
  for (const auto& o : sorted) {
    const auto key = std::pair{o.drone, o.robot};
    auto it = last.find(key);
    if (it != last.end() && it->second != o.global_id) {
      ++r.switches_per_drone[o.drone];
      ++r.total_switches;
    }
    last[key] = o.global_id;
  }
  if (n_drones > 0 && path_length_m > 0.0) {
    r.switches_per_drone_per_500m =
        static_cast<double>(r.total_switches) / n_drones / (path_length_m / 500.0);
  }
  return r;
}

}  // namespace marinetrack
