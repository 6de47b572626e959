#include "assembly_engine/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "assembly_engine/errors.hpp"

namespace ae {

namespace {

constexpr double kParallelEps = 1e-9;
constexpr double kQuarterTurnEps = 1e-12;

// Quarter-turn index when yaw is a multiple of pi/2, otherwise -1.
int exact_quarter_turn(double yaw) {
  const double q = yaw / (std::numbers::pi / 2.0);
  const double r = std::round(q);
  if (std::abs(q - r) > kQuarterTurnEps) {
    return -1;
  }
  return static_cast<int>(((static_cast<long long>(r) % 4) + 4) % 4);
}

// In-plane half extents in world axes for a right-angle yaw.
Vec2 axis_aligned_half(const FootprintBox3D& b, int quarter) {
  return (quarter % 2 == 0) ? Vec2(b.half_extents.x(), b.half_extents.y())
                            : Vec2(b.half_extents.y(), b.half_extents.x());
}

} // namespace

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

CameraPose CameraPose::look_at(const Vec3& eye, const Vec3& target, double hfov, int width,
                               int height, const Vec3& up) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 up_hint = up.normalized();
  if (std::abs(forward.dot(up_hint)) > 1.0 - 1e-9) {
    up_hint = Vec3::UnitY();
  }
  const Vec3 right = forward.cross(up_hint).normalized();
  const Vec3 down = forward.cross(right);

  Mat3 r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;

  CameraPose pose;
  pose.position = eye;
  pose.orientation = Eigen::Quaterniond(r).normalized();
  pose.hfov = hfov;
  pose.width = width;
  pose.height = height;
  return pose;
}

CameraPose CameraPose::orbit(const Vec3& target, double azimuth, double elevation,
                             double distance, double hfov, int width, int height) {
  const Vec3 offset(std::cos(elevation) * std::cos(azimuth),
                    std::cos(elevation) * std::sin(azimuth), std::sin(elevation));
  return look_at(target + distance * offset, target, hfov, width, height);
}

double CameraPose::focal_px() const { return 0.5 * width / std::tan(0.5 * hfov); }

void CameraPose::validate() const {
  if (std::abs(orientation.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("camera orientation is not a unit quaternion");
  }
  if (!(hfov > 0.0 && hfov < std::numbers::pi)) {
    throw std::invalid_argument("camera hfov must lie in (0, pi)");
  }
  if (width < 1 || height < 1) {
    throw std::invalid_argument("camera image size must be at least 1x1");
  }
}

BBox2D BBox2D::clamped(int width, int height) const {
  BBox2D out;
  out.min = Vec2(std::clamp(min.x(), 0.0, double(width)), std::clamp(min.y(), 0.0, double(height)));
  out.max = Vec2(std::clamp(max.x(), 0.0, double(width)), std::clamp(max.y(), 0.0, double(height)));
  return out;
}

std::array<Vec2, 4> BBox2D::corners() const {
  return {Vec2(min.x(), min.y()), Vec2(max.x(), min.y()), Vec2(max.x(), max.y()),
          Vec2(min.x(), max.y())};
}

FootprintBox3D FootprintBox3D::inflated(double margin) const {
  FootprintBox3D out = *this;
  out.half_extents.array() += margin;
  return out;
}

std::pair<Vec3, Vec3> WorkPlane::basis() const {
  const Vec3 n = normal.normalized();
  // Project world x into the plane unless the plane is nearly x-facing.
  Vec3 ref = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (ref - n * n.dot(ref)).normalized();
  const Vec3 e2 = n.cross(e1);
  return {e1, e2};
}

Vec2 WorkPlane::to_plane(const Vec3& p) const {
  const auto [e1, e2] = basis();
  const Vec3 d = p - origin;
  return {d.dot(e1), d.dot(e2)};
}

Vec3 WorkPlane::from_plane(const Vec2& q) const {
  const auto [e1, e2] = basis();
  return origin + q.x() * e1 + q.y() * e2;
}

void WorkPlane::validate() const {
  if (std::abs(normal.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("work plane normal must be unit length");
  }
}

Ray pixel_ray(const CameraPose& camera, const Vec2& pixel) {
  if (!(pixel.x() >= 0.0 && pixel.x() <= camera.width && pixel.y() >= 0.0 &&
        pixel.y() <= camera.height)) {
    fail(ErrorCode::PixelOutOfBounds);
  }
  // Normalised image coordinates scaled so the horizontal image edge sits at
  // tan(hfov / 2).
  const double half_w = 0.5 * camera.width;
  const double t = std::tan(0.5 * camera.hfov);
  const Vec3 dir_cam((pixel.x() - half_w) / half_w * t,
                     (pixel.y() - 0.5 * camera.height) / half_w * t, 1.0);
  return Ray{camera.position, (camera.orientation * dir_cam).normalized()};
}

Vec3 intersect_plane(const Ray& ray, const WorkPlane& plane) {
  const double denom = ray.direction.dot(plane.normal);
  if (std::abs(denom) <= kParallelEps) {
    fail(ErrorCode::RayParallelToPlane);
  }
  const double t = (plane.origin - ray.origin).dot(plane.normal) / denom;
  if (!(t > 0.0)) {
    fail(ErrorCode::IntersectionBehindCamera);
  }
  Vec3 p = ray.origin + t * ray.direction;
  // Remove the residual along the normal left by rounding.
  p -= (p - plane.origin).dot(plane.normal) * plane.normal;
  return p;
}

std::optional<Vec2> project_point(const CameraPose& camera, const Vec3& world) {
  const Vec3 p = camera.orientation.conjugate() * (world - camera.position);
  if (!(p.z() > 0.0)) {
    return std::nullopt;
  }
  const double f = camera.focal_px();
  return Vec2(f * p.x() / p.z() + 0.5 * camera.width, f * p.y() / p.z() + 0.5 * camera.height);
}

std::array<Vec3, 4> project_bbox_corners(const CameraPose& camera, const BBox2D& bbox,
                                         const WorkPlane& plane) {
  std::array<Vec3, 4> out;
  const auto corners = bbox.corners();
  try {
    for (std::size_t i = 0; i < 4; ++i) {
      out[i] = intersect_plane(pixel_ray(camera, corners[i]), plane);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PixelOutOfBounds) {
      throw;
    }
    fail(ErrorCode::DegenerateProjection, std::string(to_string(e.code())));
  }
  return out;
}

FootprintBox3D project_bbox(const CameraPose& camera, const BBox2D& bbox,
                            const WorkPlane& plane, double component_height) {
  const auto corners = project_bbox_corners(camera, bbox, plane);
  Vec3 center_on_plane;
  try {
    center_on_plane = intersect_plane(pixel_ray(camera, bbox.center()), plane);
  } catch (const Error& e) {
    fail(ErrorCode::DegenerateProjection, std::string(to_string(e.code())));
  }

  const Vec2 c = plane.to_plane(center_on_plane);
  Vec2 half = Vec2::Zero();
  for (const auto& corner : corners) {
    const Vec2 q = plane.to_plane(corner);
    half = half.cwiseMax((q - c).cwiseAbs());
  }

  FootprintBox3D box;
  box.center = center_on_plane + plane.normal * (0.5 * component_height);
  box.half_extents = Vec3(half.x(), half.y(), 0.5 * component_height);
  box.yaw = 0.0;
  return box;
}

Mat3 plane_homography(const CameraPose& camera, const WorkPlane& plane) {
  const auto [e1, e2] = plane.basis();
  const double f = camera.focal_px();
  Mat3 k;
  k << f, 0.0, 0.5 * camera.width, 0.0, f, 0.5 * camera.height, 0.0, 0.0, 1.0;
  Mat3 m;
  m.col(0) = e1;
  m.col(1) = e2;
  m.col(2) = plane.origin - camera.position;
  const Mat3 plane_to_pixel = k * camera.rotation().transpose() * m;
  return plane_to_pixel.inverse();
}

std::optional<Vec2> apply_homography(const Mat3& homography, const Vec2& pixel) {
  const Vec3 q = homography * Vec3(pixel.x(), pixel.y(), 1.0);
  if (!(q.z() > 0.0)) {
    return std::nullopt;
  }
  return Vec2(q.x() / q.z(), q.y() / q.z());
}

bool point_in_box(const Vec3& p, const FootprintBox3D& box) {
  const Vec3 d = p - box.center;
  if (std::abs(d.z()) > box.half_extents.z()) {
    return false;
  }
  Vec2 local;
  const int quarter = exact_quarter_turn(box.yaw);
  if (quarter >= 0) {
    const Vec2 h = axis_aligned_half(box, quarter);
    return std::abs(d.x()) <= h.x() && std::abs(d.y()) <= h.y();
  }
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  local = Vec2(c * d.x() + s * d.y(), -s * d.x() + c * d.y());
  return std::abs(local.x()) <= box.half_extents.x() &&
         std::abs(local.y()) <= box.half_extents.y();
}

bool boxes_intersect(const FootprintBox3D& a, const FootprintBox3D& b) {
  if (std::abs(a.center.z() - b.center.z()) > a.half_extents.z() + b.half_extents.z()) {
    return false;
  }
  const Vec2 d(b.center.x() - a.center.x(), b.center.y() - a.center.y());

  const int qa = exact_quarter_turn(a.yaw);
  const int qb = exact_quarter_turn(b.yaw);
  if (qa >= 0 && qb >= 0) {
    const Vec2 ha = axis_aligned_half(a, qa);
    const Vec2 hb = axis_aligned_half(b, qb);
    return std::abs(d.x()) <= ha.x() + hb.x() && std::abs(d.y()) <= ha.y() + hb.y();
  }

  const std::array<Vec2, 2> axes_a{Vec2(std::cos(a.yaw), std::sin(a.yaw)),
                                   Vec2(-std::sin(a.yaw), std::cos(a.yaw))};
  const std::array<Vec2, 2> axes_b{Vec2(std::cos(b.yaw), std::sin(b.yaw)),
                                   Vec2(-std::sin(b.yaw), std::cos(b.yaw))};
  auto radius = [](const std::array<Vec2, 2>& axes, const Vec3& half, const Vec2& u) {
    return half.x() * std::abs(u.dot(axes[0])) + half.y() * std::abs(u.dot(axes[1]));
  };
  for (const auto* axes : {&axes_a, &axes_b}) {
    for (const Vec2& u : *axes) {
      const double ra = radius(axes_a, a.half_extents, u);
      const double rb = radius(axes_b, b.half_extents, u);
      if (std::abs(d.dot(u)) > ra + rb) {
        return false;
      }
    }
  }
  return true;
}

} // namespace ae
