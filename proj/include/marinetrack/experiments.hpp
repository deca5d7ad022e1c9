#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "marinetrack/io.hpp"

namespace marinetrack {

struct MatcherRow {
  std::string matcher;
  double switches_per_500m{0.0};
  double mean_error_m{0.0};
};

inline std::string matcher_table(const std::vector<MatcherRow>& rows) {
  std::ostringstream o;
  o << "matcher,switches_per_500m,mean_error_m\n";
  for (const auto& r : rows) {
    o << r.matcher << ',' << detail::fmt("%.6f", r.switches_per_500m) << ','
      << detail::fmt("%.6f", r.mean_error_m) << '\n';
  }
  return o.str();
}

/// Runs one scenario with IOU-only and with hybrid association, same seed.
inline std::vector<MatcherRow> compare_matchers(const RunConfig& rc, const fs::path& out_dir, bool force) {
  std::vector<MatcherRow> rows;
  for (const auto& [name, w_iou, w_geo] :
       {std::tuple{"iou", 1.0, 0.0}, std::tuple{"hybrid", 0.7, 0.3}}) {
    RunConfig variant = rc;
    variant.params.tracker.w_iou = w_iou;
    variant.params.tracker.w_geo = w_geo;
    const RunResult rr = run_scenario(variant, out_dir / name, force);
    rows.push_back({name, rr.evaluation.switches.switches_per_drone_per_500m, rr.evaluation.overall.mean_error});
  }
  detail::write_text(out_dir / "compare.csv", matcher_table(rows));
  return rows;
}

struct SweepRow {
  int n_drones{0};
  double mean_error_m{0.0};  // average over seeds of the per-run mean
  double std_error_m{0.0};   // average over seeds of the per-run std
  int seeds{0};
};

inline std::string sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream o;
  o << "n_drones,mean_error_m,std_error_m,seeds\n";
  for (const auto& r : rows) {
    o << r.n_drones << ',' << detail::fmt("%.6f", r.mean_error_m) << ','
      << detail::fmt("%.6f", r.std_error_m) << ',' << r.seeds << '\n';
  }
  return o.str();
}

/// Seed-averaged error for three, two and one drones on the straight course.
/// `out_dir` empty skips file output.
inline std::vector<SweepRow> sweep_drones(const RunConfig& rc, int n_seeds, const fs::path& out_dir,
                                          bool force) {
  if (n_seeds < 1) throw ConfigError("--seeds", "must be >= 1");
  std::vector<SweepRow> rows;
  for (const auto& [cat, n] :
       {std::pair{Category::Linear3, 3}, std::pair{Category::Linear2, 2}, std::pair{Category::Linear1, 1}}) {
    SweepRow row;
    row.n_drones = n;
    for (int k = 0; k < n_seeds; ++k) {
      RunConfig variant = rc;
      variant.scenario.category = cat;
      variant.scenario.n_drones = n;
      variant.scenario.seed = rc.scenario.seed + static_cast<std::uint64_t>(k);
      if (variant.params.reference_drone >= n) variant.params.reference_drone = 0;
      const RunResult rr =
          out_dir.empty()
              ? run_pipeline(variant.scenario, variant.params)
              : run_scenario(variant, out_dir / ("drones_" + std::to_string(n)) / ("seed_" + std::to_string(variant.scenario.seed)), force);
      row.mean_error_m += rr.evaluation.overall.mean_error;
      row.std_error_m += rr.evaluation.overall.std_error;
    }
    row.mean_error_m /= n_seeds;
    row.std_error_m /= n_seeds;
    row.seeds = n_seeds;
    rows.push_back(row);
  }
  if (!out_dir.empty()) detail::write_text(out_dir / "sweep.csv", sweep_table(rows));
  return rows;
}

/// ICP evaluation of an estimated trajectory file against a truth file. Each
/// estimated ID is attributed to the truth robot it lies closest to on average.
inline ErrorReport evaluate_files(const fs::path& estimated, const fs::path& truth, const IcpParams& icp,
                                  double frame_rate) {
  const auto truth_trajs = group_trajectories(read_points(truth, frame_rate), 1.0);
  if (truth_trajs.empty()) throw ConfigError(truth.string(), "no truth rows");
  const auto est_pts = read_points(estimated, frame_rate);

  std::map<long, std::vector<LabeledPoint>> by_id;
  for (const auto& p : est_pts) by_id[p.id].push_back(p);

  std::map<long, std::vector<LabeledPoint>> per_robot;
  for (const auto& [id, pts] : by_id) {
    long best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [robot, traj] : truth_trajs) {
      const GeoPoint origin = traj.samples().front().point;
      std::vector<EnuPoint> verts;
      for (const auto& s : traj.samples()) verts.push_back(to_enu(s.point, origin));
      const KdTree2D tree(verts);
      double sum = 0.0;
      for (const auto& p : pts) {
        const EnuPoint q = to_enu(p.point, origin);
        sum += norm(tree.point(tree.nearest(q)) - q);
      }
      const double d = sum / static_cast<double>(pts.size());
      if (d < best_d) {
        best_d = d;
        best = robot;
      }
    }
    auto& dst = per_robot[best];
    dst.insert(dst.end(), pts.begin(), pts.end());
  }

  std::vector<ErrorReport> reports;
  for (auto& [robot, pts] : per_robot) {
    for (auto& p : pts) p.id = robot;
    const auto trajs = group_trajectories(pts, frame_rate);
    reports.push_back(evaluate_trajectory(trajs.at(robot), truth_trajs.at(robot), icp));
  }
  ErrorReport merged = merge_reports(reports);
  if (reports.size() == 1) {
    merged.applied_translation = reports.front().applied_translation;
  }
  return merged;
}

}  // namespace marinetrack
