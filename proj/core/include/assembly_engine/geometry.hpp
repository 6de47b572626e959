#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ae {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Pinhole camera with square pixels and a single horizontal field of view.
///
/// The camera frame is x right, y down, z forward (optical axis). `orientation`
/// rotates camera-frame vectors into the world frame. Pixel (0,0) is the top-left
/// image corner and (width, height) the bottom-right corner.
struct CameraPose {
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
  double hfov = 1.0;
  int width = 640;
  int height = 480;

  /// Camera at `eye` with its optical axis through `target`. Image "up" follows
  /// `up` projected onto the image plane; a near-vertical view falls back to +y.
  static CameraPose look_at(const Vec3& eye, const Vec3& target, double hfov, int width,
                            int height, const Vec3& up = Vec3::UnitZ());

  /// Camera on a sphere around `target`: azimuth about +z from +x, elevation above
  /// the xy plane, both in radians.
  static CameraPose orbit(const Vec3& target, double azimuth, double elevation,
                          double distance, double hfov, int width, int height);

  double focal_px() const;
  Mat3 rotation() const { return orientation.toRotationMatrix(); }
  Vec3 forward() const { return rotation().col(2); }

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

struct Ray {
  Vec3 origin;
  Vec3 direction;
};

struct BBox2D {
  Vec2 min = Vec2::Zero();
  Vec2 max = Vec2::Zero();

  Vec2 center() const { return 0.5 * (min + max); }
  BBox2D clamped(int width, int height) const;
  std::array<Vec2, 4> corners() const;
};

/// Box resting on (or floating above) the work plane. `yaw` rotates the box about
/// the world z axis; half_extents are expressed in the box's own frame.
struct FootprintBox3D {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Zero();
  double yaw = 0.0;

  FootprintBox3D inflated(double margin) const;
};

struct WorkPlane {
  Vec3 origin = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();

  /// Orthonormal in-plane axes (e1, e2) with e1 x e2 = normal. For the default
  /// z-up plane these are world x and y.
  std::pair<Vec3, Vec3> basis() const;
  Vec2 to_plane(const Vec3& p) const;
  Vec3 from_plane(const Vec2& q) const;
  void validate() const;
};

Ray pixel_ray(const CameraPose& camera, const Vec2& pixel);

Vec3 intersect_plane(const Ray& ray, const WorkPlane& plane);

/// World point to pixel. Empty when the point is not in front of the camera.
std::optional<Vec2> project_point(const CameraPose& camera, const Vec3& world);

/// Plane intersections of the four bbox corners, in BBox2D::corners() order.
std::array<Vec3, 4> project_bbox_corners(const CameraPose& camera, const BBox2D& bbox,
                                         const WorkPlane& plane);

/// Footprint of a detection on the work plane.
///
/// The footprint is centred where the ray through the bbox centre meets the
/// plane and its in-plane half extents cover all four projected corners, so it
/// is axis-aligned with the plane basis and rests on the plane with vertical
/// half extent `component_height / 2`.
FootprintBox3D project_bbox(const CameraPose& camera, const BBox2D& bbox,
                            const WorkPlane& plane, double component_height);

/// 3x3 map from homogeneous pixels to homogeneous plane coordinates (e1, e2, 1).
/// A mapped point with non-positive third coordinate lies behind the camera.
Mat3 plane_homography(const CameraPose& camera, const WorkPlane& plane);

/// Plane coordinates of a pixel under `homography`; empty when behind the camera.
std::optional<Vec2> apply_homography(const Mat3& homography, const Vec2& pixel);

bool point_in_box(const Vec3& p, const FootprintBox3D& box);

/// Closed-box overlap test. Exact when both yaws are multiples of pi/2,
/// separating-axis test in the plane otherwise.
bool boxes_intersect(const FootprintBox3D& a, const FootprintBox3D& b);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

} // namespace ae
