#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "marinetrack/geodesy.hpp"

namespace marinetrack {

struct CameraIntrinsics {
  int image_width{640};         // pixels
  int image_height{640};        // pixels
  double focal_length{4.5};     // mm
  double sensor_width{5.196};   // mm
  double sensor_height{5.196};  // mm

  /// Square sensor sized so the horizontal field of view spans `hfov_deg`,
  /// under the full-width offset normalization used by angular_displacement.
  static CameraIntrinsics from_horizontal_fov(int width, int height, double hfov_deg,
                                              double focal_mm = 4.5) {
    const double sensor = 2.0 * focal_mm * std::tan(deg2rad(hfov_deg) / 2.0);
    return {width, height, focal_mm, sensor, sensor};
  }

  void validate() const {
    if (image_width <= 0 || image_height <= 0 || !(focal_length > 0.0) || !(sensor_width > 0.0) ||
        !(sensor_height > 0.0)) {
      throw std::invalid_argument("camera intrinsics must be strictly positive");
    }
  }
};

struct DronePose {
  GeoPoint position;
  double altitude{0.0};  // meters above the water surface
  double heading{0.0};   // degrees clockwise from true north, [0, 360)
  double tilt{0.0};      // effective camera tilt from vertical incl. pitch, degrees, [0, 90)

  void validate() const {
    if (!is_valid(position) || !(altitude > 0.0) || !(tilt >= 0.0 && tilt < 90.0) ||
        !(heading >= 0.0 && heading < 360.0)) {
      throw std::invalid_argument("drone pose out of range");
    }
  }
};

struct PixelPoint {
  double x{0.0};
  double y{0.0};
};

struct BBox {
  double cx{0.0};  // center, pixels
  double cy{0.0};
  double width{0.0};
  double height{0.0};

  double left() const { return cx - width / 2.0; }
  double right() const { return cx + width / 2.0; }
  double top() const { return cy - height / 2.0; }
  double bottom() const { return cy + height / 2.0; }
  double area() const { return width * height; }
  PixelPoint center() const { return {cx, cy}; }
};

struct Detection {
  BBox bbox;
  double confidence{0.0};
  long frame_index{0};
  double timestamp{0.0};  // seconds
};

/// Every intermediate of the pixel-to-GNSS chain.
struct ProjectionTrace {
  double dx{0.0};                // pixel offset from image center
  double dy{0.0};
  double theta_x{0.0};           // radians
  double theta_y{0.0};
  double ground_distance{0.0};   // D, along the heading
  double lateral_distance{0.0};  // D_x
  double bearing_offset{0.0};    // beta, radians, relative to heading
  double radial_distance{0.0};   // D_r
  double north{0.0};
  double east{0.0};
  GeoPoint estimate;
};

/// The viewing ray never reaches the surface.
class HorizonError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The viewing ray meets the surface behind the nadir point.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct PixelOffsets {
  double dx{0.0};
  double dy{0.0};
};

struct AngularOffsets {
  double theta_x{0.0};
  double theta_y{0.0};
};

inline PixelOffsets pixel_offsets(const BBox& bbox, const CameraIntrinsics& cam) {
  return {bbox.cx - cam.image_width / 2.0, bbox.cy - cam.image_height / 2.0};
}

// Offsets are normalized by the full image dimension, not the half-width.
inline AngularOffsets angular_displacement(double dx, double dy, const CameraIntrinsics& cam) {
  return {std::atan((dx / cam.image_width) * (cam.sensor_width / cam.focal_length)),
          std::atan((dy / cam.image_height) * (cam.sensor_height / cam.focal_length))};
}

inline ProjectionTrace project_detection(const BBox& bbox, const DronePose& pose,
                                         const CameraIntrinsics& cam,
                                         const GeodesyParams& geo = {}) {
  ProjectionTrace t;
  const auto [dx, dy] = pixel_offsets(bbox, cam);
  t.dx = dx;
  t.dy = dy;
  const auto [theta_x, theta_y] = angular_displacement(dx, dy, cam);
  t.theta_x = theta_x;
  t.theta_y = theta_y;

  const double depression = deg2rad(pose.tilt) + theta_y;
  if (depression >= std::numbers::pi / 2.0) {
    throw HorizonError("project_detection: ray at or above the horizon");
  }
  if (depression < 0.0) {
    throw DegenerateError("project_detection: ray meets the surface behind the nadir");
  }
  const double altitude = pose.altitude;
  t.ground_distance = altitude * std::tan(depression);
  t.lateral_distance =
      std::sqrt(altitude * altitude + t.ground_distance * t.ground_distance) * std::tan(theta_x);
  // atan2 completes atan(D_x / D) continuously through D = 0.
  t.bearing_offset = std::atan2(t.lateral_distance, t.ground_distance);
  t.radial_distance = std::hypot(t.ground_distance, t.lateral_distance);

  const double azimuth = deg2rad(pose.heading) + t.bearing_offset;
  t.north = t.radial_distance * std::cos(azimuth);
  t.east = t.radial_distance * std::sin(azimuth);
  t.estimate = from_enu({t.east, t.north}, pose.position, geo);
  return t;
}

inline ProjectionTrace project_detection(const Detection& det, const DronePose& pose,
                                         const CameraIntrinsics& cam,
                                         const GeodesyParams& geo = {}) {
  return project_detection(det.bbox, pose, cam, geo);
}

/// Inverse of project_detection: where `target` appears in the image, or
/// nullopt when it is behind the drone or outside the frame.
inline std::optional<PixelPoint> geo_to_pixel(const GeoPoint& target, const DronePose& pose,
                                              const CameraIntrinsics& cam,
                                              const GeodesyParams& geo = {}) {
  const EnuPoint offset = to_enu(target, pose.position, geo);
  const double radial = norm(offset);
  const double azimuth = std::atan2(offset.east, offset.north);
  const double beta = azimuth - deg2rad(pose.heading);
  const double ground = radial * std::cos(beta);
  const double lateral = radial * std::sin(beta);
  if (ground < 0.0) return std::nullopt;

  const double altitude = pose.altitude;
  const double theta_y = std::atan(ground / altitude) - deg2rad(pose.tilt);
  const double theta_x = std::atan(lateral / std::sqrt(altitude * altitude + ground * ground));
  const double dx = std::tan(theta_x) * cam.image_width * cam.focal_length / cam.sensor_width;
  const double dy = std::tan(theta_y) * cam.image_height * cam.focal_length / cam.sensor_height;
  const PixelPoint px{dx + cam.image_width / 2.0, dy + cam.image_height / 2.0};
  if (!(px.x >= 0.0 && px.x <= cam.image_width && px.y >= 0.0 && px.y <= cam.image_height)) {
    return std::nullopt;
  }
  return px;
}

}  // namespace marinetrack
