#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "marinetrack/alignment.hpp"
#include "marinetrack/evaluation.hpp"
#include "marinetrack/fusion.hpp"
#include "marinetrack/projection.hpp"
#include "marinetrack/simulator.hpp"
#include "marinetrack/tracker.hpp"

namespace marinetrack {

struct PipelineParams {
  MatchWeights tracker;
  AlignmentParams alignment;
  EkfParams ekf;
  IcpParams icp;
  int reference_drone{0};

  void validate(int n_drones) const {
    tracker.validate();
    alignment.validate();
    ekf.validate();
    icp.validate();
    if (reference_drone < 0 || reference_drone >= n_drones) {
      throw std::invalid_argument("reference_drone must name one of the scenario's drones");
    }
  }
};

struct EstimateRow {
  long tick{0};
  int drone_id{0};
  long global_id{0};
  GeoPoint position;
  double confidence{0.0};
};

struct TickOutput {
  std::vector<EstimateRow> estimates;
  FuseTickResult fused;
  std::vector<IdObservation> ids;
  long dropped_projections{0};
};

struct StageTimings {
  double simulate{0.0};
  double project{0.0};
  double track{0.0};
  double align{0.0};
  double fuse{0.0};
  double evaluate{0.0};
  double write{0.0};

  double sum() const { return simulate + project + track + align + fuse + evaluate + write; }
};

namespace detail {

class StageClock {
 public:
  StageClock() : last_(std::chrono::steady_clock::now()) {}
  // Seconds since the previous lap (or construction).
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_;
};

}  // namespace detail

/// Per-frame processing after detection: project, track per drone, align
/// IDs against the reference drone, fuse.
class Pipeline {
 public:
  Pipeline(int n_drones, CameraIntrinsics camera, PipelineParams params, GeodesyParams geo = {})
      : camera_(camera), params_(params), geo_(geo) {
    camera_.validate();
    params_.validate(n_drones);
    for (int d = 0; d < n_drones; ++d) {
      trackers_.emplace_back(d, params_.tracker, ids_, d != params_.reference_drone, geo_);
    }
  }

  TickOutput process(const FrameBundle& fb, StageTimings* timings = nullptr) {
    detail::StageClock clock;
    TickOutput out;
    const std::size_t n = trackers_.size();
    if (fb.drones.size() != n) throw std::invalid_argument("frame has the wrong number of drones");

    // Projection.
    std::vector<std::vector<Detection>> dets(n);
    std::vector<std::vector<GeoPoint>> geos(n);
    std::vector<std::vector<int>> labels(n);
    for (std::size_t d = 0; d < n; ++d) {
      const DroneObservation& obs = fb.drones[d];
      for (std::size_t i = 0; i < obs.detections.size(); ++i) {
        try {
          const ProjectionTrace tr = project_detection(obs.detections[i], obs.reported_pose, camera_, geo_);
          dets[d].push_back(obs.detections[i]);
          geos[d].push_back(tr.estimate);
          labels[d].push_back(i < obs.truth_labels.size() ? obs.truth_labels[i] : -1);
        } catch (const std::domain_error&) {
          ++out.dropped_projections;
        }
      }
    }
    if (timings) timings->project += clock.lap();

    // Tracking, reference drone first.
    std::vector<StepResult> steps(n);
    const auto ref = static_cast<std::size_t>(params_.reference_drone);
    steps[ref] = trackers_[ref].step(dets[ref], geos[ref]);
    for (std::size_t d = 0; d < n; ++d) {
      if (d != ref) steps[d] = trackers_[d].step(dets[d], geos[d]);
    }
    if (timings) timings->track += clock.lap();

    // Alignment: fresh reference tracks first, then the other drones.
    adopt_known_ids(trackers_[ref]);
    const std::vector<ReferenceTrack> reference = reference_tracks(trackers_[ref].tracks());
    std::set<long> reference_ids;
    for (const auto& r : reference) reference_ids.insert(r.global_id);
    // IDs known from other drones but not from the reference are matchable too.
    std::vector<ReferenceTrack> secondary;
    for (const auto& [id, ft] : states_) {
      if (!reference_ids.contains(id)) secondary.push_back({id, ft.state.geo(geo_)});
    }
    for (std::size_t d = 0; d < n; ++d) {
      if (d != ref) align_drone(trackers_[d], reference, reference_ids, secondary);
    }
    if (timings) timings->align += clock.lap();

    // Fusion.
    std::map<long, std::vector<WeightedGeo>> groups;
    for (std::size_t d = 0; d < n; ++d) {
      const auto& tracks = trackers_[d].tracks();
      for (std::size_t i = 0; i < dets[d].size(); ++i) {
        const long k = steps[d].det_track[i];
        if (k < 0) continue;
        const Track& t = tracks[static_cast<std::size_t>(k)];
        if (!t.reportable()) continue;
        groups[t.global_id].push_back({t.last_geo, t.last_confidence, static_cast<int>(d)});
        out.estimates.push_back({fb.tick, static_cast<int>(d), t.global_id, t.last_geo, t.last_confidence});
        out.ids.push_back({fb.tick, static_cast<int>(d), labels[d][i], t.global_id});
      }
    }
    out.fused = fuse_tick(groups, states_, params_.ekf, fb.tick, geo_);
    for (const FusedEstimate& e : out.fused.estimates) {
      for (DroneTracker& tr : trackers_) tr.set_filtered_geo(e.global_id, e.filtered);
    }
    // Tracks without a fused state follow their own latest projection.
    for (DroneTracker& tr : trackers_) {
      for (Track& t : tr.tracks()) {
        if (t.matched && !states_.contains(t.global_id)) t.filtered_geo = t.last_geo;
      }
    }
    if (timings) timings->fuse += clock.lap();
    return out;
  }

  const std::vector<DroneTracker>& trackers() const { return trackers_; }
  const std::map<long, FusionTrack>& fusion_states() const { return states_; }
  const PipelineParams& params() const { return params_; }

 private:
  // A reference track spawned where another drone already reports a robot
  // takes over that robot's ID instead of introducing a new one.
  void adopt_known_ids(DroneTracker& ref) {
    auto& tracks = ref.tracks();
    std::vector<std::size_t> fresh;
    std::set<long> held;
    for (std::size_t k = 0; k < tracks.size(); ++k) {
      const Track& t = tracks[k];
      if (!t.alive()) continue;
      held.insert(t.global_id);
      if (t.state == TrackState::Tentative && t.matched && !states_.contains(t.global_id)) fresh.push_back(k);
    }
    if (fresh.empty()) return;
    std::vector<std::pair<long, GeoPoint>> known;
    for (const auto& [id, ft] : states_) {
      if (!held.contains(id)) known.emplace_back(id, ft.state.geo(geo_));
    }
    if (known.empty()) return;
    CostMatrix cost(static_cast<Eigen::Index>(fresh.size()), static_cast<Eigen::Index>(known.size()));
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      for (std::size_t j = 0; j < known.size(); ++j) {
        cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            haversine_distance(tracks[fresh[i]].last_geo, known[j].second, geo_);
      }
    }
    for (auto [i, j] : linear_assignment(cost, params_.alignment.max_distance).matches) {
      ref.relabel(fresh[i], known[j].first);
    }
  }

  // Re-syncs matched active tracks whose ID the reference drone does not hold.
  // IDs issued here are appended to `secondary` for the drones that follow.
  void align_drone(DroneTracker& tracker, const std::vector<ReferenceTrack>& reference,
                   const std::set<long>& reference_ids, std::vector<ReferenceTrack>& secondary) {
    auto& tracks = tracker.tracks();
    std::vector<std::size_t> candidates;
    std::set<long> held;
    std::set<long> own;
    for (std::size_t k = 0; k < tracks.size(); ++k) {
      const Track& t = tracks[k];
      if (!t.alive()) continue;
      own.insert(t.global_id);
      if (t.matched && t.state == TrackState::Active &&
          (!t.aligned || !reference_ids.contains(t.global_id))) {
        candidates.push_back(k);
      } else if (t.state != TrackState::Lost) {
        held.insert(t.global_id);
      }
    }
    if (candidates.empty()) return;

    std::vector<ReferenceTrack> free_refs;
    for (const auto& r : reference) {
      if (!held.contains(r.global_id)) free_refs.push_back(r);
    }
    for (const auto& r : secondary) {
      if (!own.contains(r.global_id)) free_refs.push_back(r);
    }
    std::vector<std::vector<GeoObservation>> obs(1);
    for (std::size_t k : candidates) {
      // A track that already owns an ID must not be issued another one.
      const double c = tracks[k].aligned ? 0.0 : tracks[k].last_confidence;
      obs[0].push_back({tracks[k].last_geo, c});
    }

    const IdMapping m = align_ids(free_refs, obs, params_.alignment, ids_, geo_);
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const std::size_t k = candidates[j];
      const auto& id = m.ids[0][j];
      // Without a match an already aligned track keeps its own ID.
      if (id) tracker.relabel(k, *id);
    }
    for (long id : m.new_ids) {
      for (std::size_t k : candidates) {
        if (tracks[k].global_id == id) secondary.push_back({id, tracks[k].last_geo});
      }
    }
  }

  CameraIntrinsics camera_;
  PipelineParams params_;
  GeodesyParams geo_;
  IdAllocator ids_;
  std::vector<DroneTracker> trackers_;
  std::map<long, FusionTrack> states_;
};

struct RobotError {
  int robot{0};
  ErrorReport report;
  std::size_t points{0};
};

struct EvaluationSummary {
  ErrorReport overall;
  std::vector<RobotError> per_robot;
  std::map<long, int> id_to_robot;
  IdSwitchReport switches;
};

/// Labels each global ID with the robot it was most often reported on, then
/// builds one trajectory per robot from the most confident fused estimate of
/// each tick and scores it against the truth after ICP.
inline EvaluationSummary evaluate_run(const Scenario& sc, const std::vector<FusedEstimate>& fused,
                                      const std::vector<IdObservation>& ids, const IcpParams& icp) {
  EvaluationSummary s;
  std::map<long, std::map<int, long>> votes;
  for (const auto& o : ids) {
    if (o.robot >= 0) ++votes[o.global_id][o.robot];
  }
  for (const auto& [id, v] : votes) {
    int best = -1;
    long count = -1;
    for (const auto& [robot, c] : v) {
      if (c > count) {
        best = robot;
        count = c;
      }
    }
    s.id_to_robot[id] = best;
  }

  const int n_robots = sc.config.n_robots;
  // [robot] -> tick -> chosen estimate
  std::vector<std::map<long, const FusedEstimate*>> chosen(static_cast<std::size_t>(n_robots));
  for (const auto& e : fused) {
    const auto it = s.id_to_robot.find(e.global_id);
    if (it == s.id_to_robot.end()) continue;
    auto& slot = chosen[static_cast<std::size_t>(it->second)][e.tick];
    if (!slot || e.total_confidence > slot->total_confidence ||
        (e.total_confidence == slot->total_confidence && e.global_id < slot->global_id)) {
      slot = &e;
    }
  }

  std::vector<ErrorReport> reports;
  for (int r = 0; r < n_robots; ++r) {
    const auto& picks = chosen[static_cast<std::size_t>(r)];
    if (picks.empty()) continue;
    std::vector<TimedGeo> pts;
    pts.reserve(picks.size());
    for (const auto& [tick, e] : picks) pts.push_back({tick_time(sc.config, tick), e->filtered});
    const GeoTrajectory est(std::move(pts), sc.config.frame_rate);
    ErrorReport rep = evaluate_trajectory(est, sc.truth[static_cast<std::size_t>(r)], icp);
    s.per_robot.push_back({r, rep, est.size()});
    reports.push_back(std::move(rep));
  }
  s.overall = merge_reports(reports);
  s.switches = count_id_switches(ids, sc.config.n_drones, sc.truth_path_length());
  return s;
}

struct RunResult {
  Scenario scenario;
  std::vector<EstimateRow> estimates;
  std::vector<FusedEstimate> fused;
  std::vector<IdObservation> ids;
  EvaluationSummary evaluation;
  StageTimings timings;
  long dropped_projections{0};
};

/// Simulates the scenario and runs every stage over it.
inline RunResult run_pipeline(const ScenarioConfig& cfg, const PipelineParams& params) {
  detail::StageClock clock;
  RunResult rr;
  rr.scenario = build_scenario(cfg);
  const Scenario& sc = rr.scenario;
  FrameRenderer renderer(cfg);
  Pipeline pipe(cfg.n_drones, cfg.camera, params);
  rr.timings.simulate += clock.lap();

  for (long tick = 0; tick < sc.n_ticks(); ++tick) {
    const FrameBundle fb = renderer.render(tick, sc.robots_at(tick), sc.drones_at(tick));
    rr.timings.simulate += clock.lap();
    TickOutput out = pipe.process(fb, &rr.timings);
    rr.estimates.insert(rr.estimates.end(), out.estimates.begin(), out.estimates.end());
    rr.ids.insert(rr.ids.end(), out.ids.begin(), out.ids.end());
    for (auto& e : out.fused.estimates) rr.fused.push_back(std::move(e));
    rr.dropped_projections += out.dropped_projections;
    clock.lap();  // process() timed its own stages
  }
  rr.evaluation = evaluate_run(sc, rr.fused, rr.ids, params.icp);
  rr.timings.evaluate += clock.lap();
  return rr;
}

}  // namespace marinetrack
