#pragma once

// Straight-line scalar reference for pixel -> ground -> lat/lon. Written
// without the library on purpose: its own constants, its own trig forms.

#include <cmath>

namespace oracle {

struct ProjectionInput {
  double x, y;              // pixel
  double w, h;              // image size, pixels
  double f, sx, sy;         // focal length, sensor size, mm
  double altitude;          // m
  double tilt_deg;
  double heading_deg;
  double lat0, lon0;        // drone position, degrees
  double radius = 6371000.0;
};

struct ProjectionSteps {
  double dx, dy;
  double tx, ty;
  double d, dlat;   // ground distance along heading, lateral distance
  double beta;
  double dr;
  double north, east;
  double lat, lon;
};

inline ProjectionSteps project(const ProjectionInput& in) {
  const double pi = 3.14159265358979323846;
  const double rad = pi / 180.0;
  ProjectionSteps s{};
  s.dx = in.x - 0.5 * in.w;
  s.dy = in.y - 0.5 * in.h;
  s.tx = std::atan2(s.dx * in.sx, in.w * in.f);
  s.ty = std::atan2(s.dy * in.sy, in.h * in.f);
  const double dep = in.tilt_deg * rad + s.ty;
  s.d = in.altitude * std::sin(dep) / std::cos(dep);
  // sqrt(A^2 + D^2) == A / cos(dep) for dep below the horizon
  s.dlat = in.altitude / std::cos(dep) * std::tan(s.tx);
  s.beta = s.d > 0.0 ? std::atan(s.dlat / s.d) : std::atan2(s.dlat, s.d);
  s.dr = std::sqrt(s.d * s.d + s.dlat * s.dlat);
  const double psi = in.heading_deg * rad;
  // cos/sin of a sum, expanded
  s.north = s.dr * (std::cos(psi) * std::cos(s.beta) - std::sin(psi) * std::sin(s.beta));
  s.east = s.dr * (std::sin(psi) * std::cos(s.beta) + std::cos(psi) * std::sin(s.beta));
  const double m_per_deg = in.radius * rad;
  s.lat = in.lat0 + s.north / m_per_deg;
  s.lon = in.lon0 + s.east / (m_per_deg * std::cos(in.lat0 * rad));
  return s;
}

// Ground offset (north, east) only, for Monte Carlo use.
inline void ground_offset(double dx, double dy, double w, double h, double f, double sx, double sy,
                          double altitude, double tilt_deg, double& north, double& east) {
  ProjectionInput in{dx + 0.5 * w, dy + 0.5 * h, w, h, f, sx, sy, altitude, tilt_deg, 0.0, 0.0, 0.0};
  const ProjectionSteps s = project(in);
  north = s.north;
  east = s.east;
}

}  // namespace oracle
