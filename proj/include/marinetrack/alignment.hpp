#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "marinetrack/assignment.hpp"
#include "marinetrack/geodesy.hpp"
#include "marinetrack/tracker.hpp"

namespace marinetrack {

struct AlignmentParams {
  double max_distance{30.0};   // meters; pairs farther apart are never matched
  double new_id_confidence{0.6};

  void validate() const {
    if (!(max_distance > 0.0)) throw std::invalid_argument("alignment max_distance must be > 0");
    if (!(new_id_confidence >= 0.0 && new_id_confidence <= 1.0)) {
      throw std::invalid_argument("alignment new_id_confidence must lie in [0, 1]");
    }
  }
};

/// A reference-drone track as seen by the aligner.
struct ReferenceTrack {
  long global_id{0};
  GeoPoint position;  // filtered GNSS position
};

struct GeoObservation {
  GeoPoint position;
  double confidence{0.0};
};

struct IdMapping {
  // per drone, per detection: adopted global ID, or nullopt when none was given
  std::vector<std::vector<std::optional<long>>> ids;
  std::vector<long> new_ids;
};

inline std::vector<ReferenceTrack> reference_tracks(std::span<const Track> tracks) {
  std::vector<ReferenceTrack> out;
  for (const Track& t : tracks) {
    if (t.alive()) out.push_back({t.global_id, t.filtered_geo});
  }
  return out;
}

/// Cross-drone ID alignment. For each drone, detections are matched to the
/// reference tracks by thresholded linear assignment on great-circle
/// distance; matched detections adopt the reference ID. Unmatched detections
/// get a fresh ID from `ids` only when their confidence exceeds the threshold,
/// and otherwise stay unassigned for this round.
inline IdMapping align_ids(std::span<const ReferenceTrack> reference,
                           std::span<const std::vector<GeoObservation>> drones,
                           const AlignmentParams& p, IdAllocator& ids,
                           const GeodesyParams& geo = {}) {
  p.validate();
  IdMapping mapping;
  mapping.ids.reserve(drones.size());
  for (const auto& detections : drones) {
    std::vector<std::optional<long>> assigned(detections.size());
    CostMatrix cost(static_cast<Eigen::Index>(detections.size()),
                    static_cast<Eigen::Index>(reference.size()));
    for (std::size_t j = 0; j < detections.size(); ++j) {
      for (std::size_t k = 0; k < reference.size(); ++k) {
        cost(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
            haversine_distance(reference[k].position, detections[j].position, geo);
      }
    }
    const AssignmentResult a = linear_assignment(cost, p.max_distance);
    for (auto [j, k] : a.matches) assigned[j] = reference[k].global_id;
    for (std::size_t j : a.unmatched_rows) {
      if (detections[j].confidence > p.new_id_confidence) {
        const long id = ids.next();
        assigned[j] = id;
        mapping.new_ids.push_back(id);
      }
    }
    mapping.ids.push_back(std::move(assigned));
  }
  return mapping;
}

}  // namespace marinetrack
