#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "marinetrack/assignment.hpp"
#include "marinetrack/geodesy.hpp"
#include "marinetrack/projection.hpp"

namespace marinetrack {

enum class TrackState { Tentative, Active, Lost, Removed };

inline const char* to_string(TrackState s) {
  switch (s) {
    case TrackState::Tentative: return "Tentative";
    case TrackState::Active: return "Active";
    case TrackState::Lost: return "Lost";
    case TrackState::Removed: return "Removed";
  }
  return "?";
}

inline bool is_legal_transition(TrackState from, TrackState to) {
  if (from == to) return true;
  switch (from) {
    case TrackState::Tentative: return to == TrackState::Active || to == TrackState::Removed;
    case TrackState::Active: return to == TrackState::Lost;
    case TrackState::Lost: return to == TrackState::Active || to == TrackState::Removed;
    case TrackState::Removed: return false;
  }
  return false;
}

/// Hands out global track IDs. Shared by every drone tracker of a pipeline;
/// IDs are never reused.
class IdAllocator {
 public:
  explicit IdAllocator(long first = 1) : next_(first) {}
  long next() { return next_.fetch_add(1, std::memory_order_relaxed); }
  long peek() const { return next_.load(std::memory_order_relaxed); }

 private:
  std::atomic<long> next_;
};

/// Constant-velocity Kalman filter on (cx, cy, w, h) with noise scaled by box size.
class BoxKalmanFilter {
 public:
  using State = Eigen::Matrix<double, 8, 1>;
  using Cov = Eigen::Matrix<double, 8, 8>;

  static constexpr double kStdPosition = 1.0 / 20.0;
  static constexpr double kStdVelocity = 1.0 / 160.0;

  BoxKalmanFilter() = default;
  explicit BoxKalmanFilter(const BBox& box) { initiate(box); }

  void initiate(const BBox& box) {
    mean_.setZero();
    mean_.head<4>() << box.cx, box.cy, box.width, box.height;
    const double w = box.width;
    const double h = box.height;
    State std_dev;
    std_dev << 2 * kStdPosition * w, 2 * kStdPosition * h, 2 * kStdPosition * w,
        2 * kStdPosition * h, 10 * kStdVelocity * w, 10 * kStdVelocity * h, 10 * kStdVelocity * w,
        10 * kStdVelocity * h;
    cov_ = std_dev.array().square().matrix().asDiagonal();
  }

  void predict() {
    const double w = std::max(mean_(2), 1e-3);
    const double h = std::max(mean_(3), 1e-3);
    State std_dev;
    std_dev << kStdPosition * w, kStdPosition * h, kStdPosition * w, kStdPosition * h,
        kStdVelocity * w, kStdVelocity * h, kStdVelocity * w, kStdVelocity * h;
    const Cov q = std_dev.array().square().matrix().asDiagonal();
    mean_ = transition() * mean_;
    cov_ = transition() * cov_ * transition().transpose() + q;
  }

  void update(const BBox& box) {
    const double w = std::max(mean_(2), 1e-3);
    const double h = std::max(mean_(3), 1e-3);
    Eigen::Vector4d r;
    r << kStdPosition * w, kStdPosition * h, kStdPosition * w, kStdPosition * h;
    const Eigen::Matrix4d noise = r.array().square().matrix().asDiagonal();
    Eigen::Vector4d z;
    z << box.cx, box.cy, box.width, box.height;

    const Eigen::Matrix<double, 4, 8> obs = observation();
    const Eigen::Matrix4d s = obs * cov_ * obs.transpose() + noise;
    const Eigen::Matrix<double, 8, 4> gain = cov_ * obs.transpose() * s.inverse();
    mean_ += gain * (z - obs * mean_);
    cov_ = (Cov::Identity() - gain * obs) * cov_;
    cov_ = 0.5 * (cov_ + cov_.transpose());
  }

  BBox box() const {
    return {mean_(0), mean_(1), std::max(mean_(2), 1e-3), std::max(mean_(3), 1e-3)};
  }
  const State& mean() const { return mean_; }
  const Cov& covariance() const { return cov_; }

 private:
  static Cov transition() {
    Cov f = Cov::Identity();
    for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
    return f;
  }
  static Eigen::Matrix<double, 4, 8> observation() {
    Eigen::Matrix<double, 4, 8> h = Eigen::Matrix<double, 4, 8>::Zero();
    h.leftCols<4>().setIdentity();
    return h;
  }

  State mean_ = State::Zero();
  Cov cov_ = Cov::Identity();
};

/// Association parameters. Stage one ranks pairs by
/// w_iou * IOU + w_geo * max(0, 1 - dist / d_max).
struct MatchWeights {
  double w_iou{0.7};
  double w_geo{0.3};
  double d_max{10.0};          // meters
  double tau_high{0.5};        // first-association detection threshold
  double tau_low{0.1};         // floor for the low-confidence association
  int track_buffer{30};        // frames a lost track is kept
  double min_score{0.2};       // stage-one gate
  double low_iou_min{0.5};     // stage-two gate
  double tentative_min{0.2};   // gate for confirming tentative tracks
  int confirm_hits{2};

  static MatchWeights iou_only() {
    MatchWeights w;
    w.w_iou = 1.0;
    w.w_geo = 0.0;
    return w;
  }

  void validate() const {
    if (w_iou < 0.0 || w_geo < 0.0 || std::abs(w_iou + w_geo - 1.0) > 1e-9) {
      throw std::invalid_argument("match weights must be non-negative and sum to 1");
    }
    if (!(d_max > 0.0)) throw std::invalid_argument("d_max must be positive");
    if (!(tau_high > tau_low && tau_low > 0.0)) {
      throw std::invalid_argument("thresholds must satisfy tau_high > tau_low > 0");
    }
    if (track_buffer < 0 || confirm_hits < 1) {
      throw std::invalid_argument("track_buffer must be >= 0 and confirm_hits >= 1");
    }
  }
};

struct Track {
  long global_id{0};
  int drone_id{0};
  TrackState state{TrackState::Tentative};
  BoxKalmanFilter filter;
  double last_confidence{0.0};
  GeoPoint filtered_geo;     // fused estimate for this ID, fed back by the pipeline
  GeoPoint last_geo;         // projection of the last matched detection
  int frames_since_seen{0};
  int hits{0};               // consecutive matched frames
  bool matched{false};       // matched on the latest step
  bool aligned{true};        // ID agreed with the reference drone

  BBox predicted_bbox() const { return filter.box(); }
  bool alive() const { return state != TrackState::Removed; }
  bool reportable() const { return state == TrackState::Active && matched && aligned; }
};

inline double iou(const BBox& a, const BBox& b) {
  const double w = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double h = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  const double inter = w * h;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

inline double geo_similarity(const GeoPoint& a, const GeoPoint& b, double d_max,
                             const GeodesyParams& geo = {}) {
  return std::max(0.0, 1.0 - haversine_distance(a, b, geo) / d_max);
}

inline double hybrid_score(const Track& t, const Detection& d, const GeoPoint& d_geo,
                           const MatchWeights& w, const GeodesyParams& geo = {}) {
  double s = w.w_iou * iou(t.predicted_bbox(), d.bbox);
  if (w.w_geo > 0.0) s += w.w_geo * geo_similarity(t.filtered_geo, d_geo, w.d_max, geo);
  return std::clamp(s, 0.0, 1.0);
}

struct StepResult {
  std::vector<long> det_track;       // per detection: index into tracks(), or -1
  std::vector<std::size_t> spawned;  // indices of tracks created this step
};

/// Two-stage tracker for a single drone. High-confidence detections are
/// associated with active and lost tracks on the hybrid score; the leftover
/// active tracks then get a chance at low-confidence detections on IOU alone;
/// tentative tracks take what remains.
class DroneTracker {
 public:
  DroneTracker(int drone_id, MatchWeights weights, IdAllocator& ids,
               bool requires_alignment = false, GeodesyParams geo = {})
      : drone_id_(drone_id),
        weights_(weights),
        ids_(&ids),
        requires_alignment_(requires_alignment),
        geo_(geo) {
    weights_.validate();
  }

  StepResult step(std::span<const Detection> dets, std::span<const GeoPoint> geos) {
    if (dets.size() != geos.size()) {
      throw std::invalid_argument("DroneTracker::step: " + std::to_string(dets.size()) +
                                  " detections but " + std::to_string(geos.size()) +
                                  " projected positions");
    }
    std::erase_if(tracks_, [](const Track& t) { return t.state == TrackState::Removed; });

    StepResult result;
    result.det_track.assign(dets.size(), -1);
    for (Track& t : tracks_) {
      t.filter.predict();
      t.matched = false;
    }

    std::vector<std::size_t> high;
    std::vector<std::size_t> low;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const double c = dets[i].confidence;
      if (c >= weights_.tau_high) {
        high.push_back(i);
      } else if (c >= weights_.tau_low) {
        low.push_back(i);
      }
    }

    std::vector<std::size_t> pool;
    std::vector<std::size_t> tentative;
    for (std::size_t k = 0; k < tracks_.size(); ++k) {
      const TrackState s = tracks_[k].state;
      if (s == TrackState::Active || s == TrackState::Lost) pool.push_back(k);
      if (s == TrackState::Tentative) tentative.push_back(k);
    }

    auto hybrid = [&](std::size_t k, std::size_t i) {
      return hybrid_score(tracks_[k], dets[i], geos[i], weights_, geo_);
    };
    auto overlap = [&](std::size_t k, std::size_t i) {
      return iou(tracks_[k].predicted_bbox(), dets[i].bbox);
    };

    // Stage 1: high-confidence detections against active and lost tracks.
    auto [pool_left, high_left] = associate(pool, high, hybrid, weights_.min_score, dets, geos, result);

    // Stage 2: tracks that were active last frame against low-confidence detections.
    std::vector<std::size_t> active_left;
    for (std::size_t k : pool_left) {
      if (tracks_[k].state == TrackState::Active) active_left.push_back(k);
    }
    auto [active_unmatched, low_left] =
        associate(active_left, low, overlap, weights_.low_iou_min, dets, geos, result);
    (void)low_left;

    // Stage 3: tentative tracks against the remaining high-confidence detections.
    auto [tentative_left, fresh] =
        associate(tentative, high_left, hybrid, weights_.tentative_min, dets, geos, result);

    for (std::size_t k : tentative_left) tracks_[k].state = TrackState::Removed;
    for (std::size_t k : pool_left) {
      Track& t = tracks_[k];
      if (t.matched) continue;
      t.state = TrackState::Lost;
      t.hits = 0;
      ++t.frames_since_seen;
      if (t.frames_since_seen > weights_.track_buffer) t.state = TrackState::Removed;
    }

    for (std::size_t i : fresh) {
      Track t;
      t.global_id = ids_->next();
      t.drone_id = drone_id_;
      t.state = TrackState::Tentative;
      t.filter.initiate(dets[i].bbox);
      t.last_confidence = dets[i].confidence;
      t.filtered_geo = geos[i];
      t.last_geo = geos[i];
      t.hits = 1;
      t.matched = true;
      t.aligned = !requires_alignment_;
      if (weights_.confirm_hits <= 1) t.state = TrackState::Active;
      result.det_track[i] = static_cast<long>(tracks_.size());
      result.spawned.push_back(tracks_.size());
      tracks_.push_back(t);
    }
    return result;
  }

  /// Gives track `index` the ID `new_id`. A lost track of this drone already
  /// holding that ID is retired in its favour.
  void relabel(std::size_t index, long new_id) {
    Track& target = tracks_.at(index);
    for (std::size_t k = 0; k < tracks_.size(); ++k) {
      Track& other = tracks_[k];
      if (k == index || !other.alive() || other.global_id != new_id) continue;
      if (other.state != TrackState::Lost) {
        throw std::logic_error("relabel: ID " + std::to_string(new_id) +
                               " is held by a live track on drone " + std::to_string(drone_id_));
      }
      other.state = TrackState::Removed;
    }
    target.global_id = new_id;
    target.aligned = true;
  }

  /// Pushes the fused position for `global_id` into every track carrying it.
  void set_filtered_geo(long global_id, const GeoPoint& p) {
    for (Track& t : tracks_) {
      if (t.alive() && t.global_id == global_id) t.filtered_geo = p;
    }
  }

  std::vector<Track>& tracks() { return tracks_; }
  const std::vector<Track>& tracks() const { return tracks_; }
  int drone_id() const { return drone_id_; }
  const MatchWeights& weights() const { return weights_; }
  bool requires_alignment() const { return requires_alignment_; }

 private:
  struct Leftovers {
    std::vector<std::size_t> tracks;
    std::vector<std::size_t> dets;
  };

  template <typename Score>
  Leftovers associate(const std::vector<std::size_t>& track_ids,
                      const std::vector<std::size_t>& det_ids, Score&& score, double min_score,
                      std::span<const Detection> dets, std::span<const GeoPoint> geos,
                      StepResult& result) {
    Leftovers left;
    if (track_ids.empty() || det_ids.empty()) {
      left.tracks = track_ids;
      left.dets = det_ids;
      return left;
    }
    CostMatrix cost(static_cast<Eigen::Index>(track_ids.size()),
                    static_cast<Eigen::Index>(det_ids.size()));
    for (std::size_t r = 0; r < track_ids.size(); ++r) {
      for (std::size_t c = 0; c < det_ids.size(); ++c) {
        cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            1.0 - score(track_ids[r], det_ids[c]);
      }
    }
    const AssignmentResult a = linear_assignment(cost, 1.0 - min_score);
    for (auto [r, c] : a.matches) {
      const std::size_t k = track_ids[r];
      const std::size_t i = det_ids[c];
      apply_match(tracks_[k], dets[i], geos[i]);
      result.det_track[i] = static_cast<long>(k);
    }
    for (std::size_t r : a.unmatched_rows) left.tracks.push_back(track_ids[r]);
    for (std::size_t c : a.unmatched_cols) left.dets.push_back(det_ids[c]);
    return left;
  }

  void apply_match(Track& t, const Detection& d, const GeoPoint& g) {
    t.filter.update(d.bbox);
    t.last_confidence = d.confidence;
    t.last_geo = g;
    t.frames_since_seen = 0;
    t.matched = true;
    ++t.hits;
    if (t.state == TrackState::Lost) {
      t.state = TrackState::Active;
    } else if (t.state == TrackState::Tentative && t.hits >= weights_.confirm_hits) {
      t.state = TrackState::Active;
    }
  }

  int drone_id_;
  MatchWeights weights_;
  IdAllocator* ids_;
  bool requires_alignment_;
  GeodesyParams geo_;
  std::vector<Track> tracks_;
};

}  // namespace marinetrack
