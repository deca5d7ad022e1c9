#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace marinetrack {

struct GeoPoint {
  double lat{0.0};  // degrees
  double lon{0.0};  // degrees

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct EnuPoint {
  double east{0.0};   // meters
  double north{0.0};  // meters

  friend bool operator==(const EnuPoint&, const EnuPoint&) = default;
};

inline EnuPoint operator+(EnuPoint a, EnuPoint b) { return {a.east + b.east, a.north + b.north}; }
inline EnuPoint operator-(EnuPoint a, EnuPoint b) { return {a.east - b.east, a.north - b.north}; }
inline EnuPoint operator*(double s, EnuPoint a) { return {s * a.east, s * a.north}; }
inline double norm(EnuPoint a) { return std::hypot(a.east, a.north); }

class GeodesyError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kFeetToMeters = 0.3048;

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Spherical earth model. The angular conversion factors of the equirectangular
/// projection follow from the radius: one degree of latitude spans R*pi/180
/// meters, one degree of longitude that times cos(lat).
struct GeodesyParams {
  double earth_radius{6'371'000.0};
  double feet_to_meters{kFeetToMeters};

  double meters_per_degree_lat() const { return earth_radius * std::numbers::pi / 180.0; }
  double meters_per_degree_lon(double lat_deg) const {
    return meters_per_degree_lat() * std::cos(deg2rad(lat_deg));
  }
  /// The same factors expressed in feet per degree.
  double feet_per_degree_lat() const { return meters_per_degree_lat() / feet_to_meters; }
  double feet_per_degree_lon(double lat_deg) const {
    return meters_per_degree_lon(lat_deg) / feet_to_meters;
  }

  void validate() const {
    if (!(earth_radius > 0.0) || !(feet_to_meters > 0.0)) {
      throw GeodesyError("geodesy parameters must be strictly positive");
    }
  }
};

inline bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

inline bool is_valid(const EnuPoint& e) { return std::isfinite(e.east) && std::isfinite(e.north); }

inline void require_valid(const GeoPoint& p, const char* what) {
  if (!is_valid(p)) {
    throw GeodesyError(std::string(what) + ": latitude/longitude out of range or not finite");
  }
}

/// Great-circle distance in meters.
inline double haversine_distance(const GeoPoint& a, const GeoPoint& b,
                                 const GeodesyParams& params = {}) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dphi = phi2 - phi1;
  const double dlambda = deg2rad(b.lon - a.lon);
  const double s_phi = std::sin(dphi / 2.0);
  const double s_lambda = std::sin(dlambda / 2.0);
  double h = s_phi * s_phi + std::cos(phi1) * std::cos(phi2) * s_lambda * s_lambda;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * params.earth_radius * std::asin(std::sqrt(h));
}

/// Equirectangular projection about `origin`. Only valid for small areas,
/// separations of a degree or more are rejected.
inline EnuPoint to_enu(const GeoPoint& p, const GeoPoint& origin, const GeodesyParams& params = {}) {
  const double dlat = p.lat - origin.lat;
  const double dlon = p.lon - origin.lon;
  if (!(std::abs(dlat) < 1.0) || !(std::abs(dlon) < 1.0)) {
    throw GeodesyError("to_enu: point is a degree or more from the projection origin");
  }
  return {dlon * params.meters_per_degree_lon(origin.lat), dlat * params.meters_per_degree_lat()};
}

/// Linear offsets to angular shifts: the exact inverse of to_enu at the same origin.
inline GeoPoint from_enu(const EnuPoint& e, const GeoPoint& origin, const GeodesyParams& params = {}) {
  if (!is_valid(e) || std::abs(e.east) >= 100'000.0 || std::abs(e.north) >= 100'000.0) {
    throw GeodesyError("from_enu: offset must be finite and below 100 km");
  }
  return {origin.lat + e.north / params.meters_per_degree_lat(),
          origin.lon + e.east / params.meters_per_degree_lon(origin.lat)};
}

/// Arithmetic mean of latitudes and longitudes; the projection origin for a point set.
template <typename Range>
GeoPoint mean_location(const Range& points) {
  double lat = 0.0;
  double lon = 0.0;
  std::size_t n = 0;
  for (const GeoPoint& p : points) {
    lat += p.lat;
    lon += p.lon;
    ++n;
  }
  if (n == 0) throw GeodesyError("mean_location: empty point set");
  return {lat / static_cast<double>(n), lon / static_cast<double>(n)};
}

}  // namespace marinetrack
