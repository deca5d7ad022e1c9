#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "marinetrack/config.hpp"
#include "marinetrack/evaluation.hpp"
#include "marinetrack/pipeline.hpp"

namespace marinetrack {

namespace fs = std::filesystem;

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string deg(double v) { return fmt("%.9f", v); }

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw OutputError("write failed for '" + path.string() + "'");
}

}  // namespace detail

inline std::string truth_csv(const Scenario& sc) {
  std::ostringstream o;
  o << "tick,robot_id,lat,lon,timestamp_s\n";
  const double ticks_per_sample = sc.config.frame_rate / sc.config.truth_rate;
  for (std::size_t r = 0; r < sc.truth.size(); ++r) {
    const auto& samples = sc.truth[r].samples();
    for (std::size_t k = 0; k < samples.size(); ++k) {
      o << std::lround(static_cast<double>(k) * ticks_per_sample) << ',' << r << ','
        << detail::deg(samples[k].point.lat) << ',' << detail::deg(samples[k].point.lon) << ','
        << detail::fmt("%.6f", samples[k].timestamp) << '\n';
    }
  }
  return o.str();
}

inline std::string estimates_csv(const std::vector<EstimateRow>& rows) {
  std::ostringstream o;
  o << "tick,drone_id,global_id,lat,lon,confidence\n";
  for (const auto& r : rows) {
    o << r.tick << ',' << r.drone_id << ',' << r.global_id << ',' << detail::deg(r.position.lat) << ','
      << detail::deg(r.position.lon) << ',' << detail::fmt("%.6f", r.confidence) << '\n';
  }
  return o.str();
}

inline std::string fused_csv(const std::vector<FusedEstimate>& rows) {
  std::ostringstream o;
  o << "tick,global_id,lat,lon,raw_lat,raw_lon,total_confidence\n";
  for (const auto& e : rows) {
    o << e.tick << ',' << e.global_id << ',' << detail::deg(e.filtered.lat) << ','
      << detail::deg(e.filtered.lon) << ',';
    if (e.raw_fused) o << detail::deg(e.raw_fused->lat) << ',' << detail::deg(e.raw_fused->lon);
    else o << ',';
    o << ',' << detail::fmt("%.6f", e.total_confidence) << '\n';
  }
  return o.str();
}

inline nlohmann::ordered_json error_json(const ErrorReport& r) {
  return {{"mean_error_m", r.mean_error},
          {"std_error_m", r.std_error},
          {"points", r.per_point_errors.size()},
          {"applied_translation_m", {r.applied_translation.east, r.applied_translation.north}},
          {"iterations_used", r.iterations_used}};
}

inline nlohmann::ordered_json report_json(const RunResult& rr) {
  const EvaluationSummary& e = rr.evaluation;
  nlohmann::ordered_json j;
  j["mean_error_m"] = e.overall.mean_error;
  j["std_error_m"] = e.overall.std_error;
  j["points"] = e.overall.per_point_errors.size();
  j["per_robot"] = nlohmann::ordered_json::array();
  for (const auto& r : e.per_robot) {
    auto item = error_json(r.report);
    item["robot_id"] = r.robot;
    j["per_robot"].push_back(item);
  }
  nlohmann::ordered_json per_drone = nlohmann::ordered_json::object();
  for (const auto& [d, n] : e.switches.switches_per_drone) per_drone[std::to_string(d)] = n;
  j["id_switches"] = {{"total", e.switches.total_switches},
                      {"per_drone", per_drone},
                      {"truth_path_length_m", e.switches.path_length_m},
                      {"switches_per_drone_per_500m", e.switches.switches_per_drone_per_500m}};
  j["frames"] = rr.scenario.n_ticks();
  j["dropped_projections"] = rr.dropped_projections;
  return j;
}

struct OutputPaths {
  fs::path truth, estimates, fused, report, manifest;

  explicit OutputPaths(const fs::path& dir)
      : truth(dir / "truth.csv"),
        estimates(dir / "estimates.csv"),
        fused(dir / "fused.csv"),
        report(dir / "report.json"),
        manifest(dir / "manifest.json") {}

  std::vector<fs::path> all() const { return {truth, estimates, fused, report, manifest}; }
};

/// Creates `dir`, refusing to clobber earlier outputs unless `force` is set.
inline void prepare_output_dir(const fs::path& dir, bool force) {
  const OutputPaths paths(dir);
  if (!force) {
    for (const auto& p : paths.all()) {
      if (fs::exists(p)) {
        throw ConfigError("--out", "'" + p.string() + "' already exists (use --force to overwrite)");
      }
    }
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create '" + dir.string() + "': " + ec.message());
}

inline nlohmann::ordered_json manifest_json(const RunConfig& rc, const OutputPaths& paths,
                                            const StageTimings& t, double total_s) {
  nlohmann::ordered_json j;
  j["config_hash"] = "fnv1a64:" + hex64(rc.hash);
  j["seed"] = rc.scenario.seed;
  j["parameters"] = params_to_json(rc);
  j["outputs"] = {{"truth", paths.truth.filename().string()},
                  {"estimates", paths.estimates.filename().string()},
                  {"fused", paths.fused.filename().string()},
                  {"report", paths.report.filename().string()}};
  j["timings_s"] = {{"simulate", t.simulate}, {"project", t.project}, {"track", t.track},
                    {"align", t.align},       {"fuse", t.fuse},       {"evaluate", t.evaluate},
                    {"write", t.write},       {"total", total_s}};
  return j;
}

/// Full run with every output file. The manifest is written last so its
/// timings cover the other writes.
inline RunResult run_scenario(const RunConfig& rc, const fs::path& out_dir, bool force) {
  const auto start = std::chrono::steady_clock::now();
  prepare_output_dir(out_dir, force);
  RunResult rr = run_pipeline(rc.scenario, rc.params);

  detail::StageClock clock;
  const OutputPaths paths(out_dir);
  detail::write_text(paths.truth, truth_csv(rr.scenario));
  detail::write_text(paths.estimates, estimates_csv(rr.estimates));
  detail::write_text(paths.fused, fused_csv(rr.fused));
  detail::write_text(paths.report, report_json(rr).dump(2) + "\n");
  rr.timings.write += clock.lap();
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::write_text(paths.manifest, manifest_json(rc, paths, rr.timings, total).dump(2) + "\n");
  return rr;
}

// ---- reading trajectories back -------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

inline CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read '" + path.string() + "'");
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  if (!std::getline(in, line)) throw ConfigError("", "'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    t.rows.push_back(split(line));
  }
  return t;
}

struct LabeledPoint {
  long id{0};
  double time{0.0};
  GeoPoint point;
  double weight{0.0};
};

/// Reads (id, time, lat, lon) rows from a truth.csv or fused.csv style file.
/// The id column is robot_id or global_id; time is timestamp_s when present,
/// else tick / frame_rate.
inline std::vector<LabeledPoint> read_points(const fs::path& path, double frame_rate) {
  const CsvTable t = read_csv(path);
  int id = t.column("robot_id");
  if (id < 0) id = t.column("global_id");
  const int lat = t.column("lat");
  const int lon = t.column("lon");
  const int ts = t.column("timestamp_s");
  const int tick = t.column("tick");
  const int w = t.column("total_confidence");
  if (id < 0 || lat < 0 || lon < 0 || (ts < 0 && tick < 0)) {
    throw ConfigError(path.string(), "needs robot_id or global_id, lat, lon and tick or timestamp_s columns");
  }
  std::vector<LabeledPoint> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    try {
      LabeledPoint p;
      p.id = std::stol(row.at(static_cast<std::size_t>(id)));
      p.time = ts >= 0 ? std::stod(row.at(static_cast<std::size_t>(ts)))
                       : std::stod(row.at(static_cast<std::size_t>(tick))) / frame_rate;
      p.point = {std::stod(row.at(static_cast<std::size_t>(lat))), std::stod(row.at(static_cast<std::size_t>(lon)))};
      p.weight = w >= 0 ? std::stod(row.at(static_cast<std::size_t>(w))) : 1.0;
      out.push_back(p);
    } catch (const std::exception&) {
      throw ConfigError(path.string(), "malformed row " + std::to_string(r + 2));
    }
  }
  return out;
}

/// Groups points by id into trajectories; equal timestamps keep the heaviest point.
inline std::map<long, GeoTrajectory> group_trajectories(const std::vector<LabeledPoint>& pts, double rate) {
  std::map<long, std::map<double, LabeledPoint>> by_id;
  for (const auto& p : pts) {
    auto& slot = by_id[p.id];
    auto it = slot.find(p.time);
    if (it == slot.end() || p.weight > it->second.weight) slot[p.time] = p;
  }
  std::map<long, GeoTrajectory> out;
  for (const auto& [id, m] : by_id) {
    std::vector<TimedGeo> s;
    for (const auto& [t, p] : m) s.push_back({t, p.point});
    out.emplace(id, GeoTrajectory(std::move(s), rate));
  }
  return out;
}

}  // namespace marinetrack
