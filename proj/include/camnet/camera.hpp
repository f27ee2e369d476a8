#pragma once

#include "camnet/common.hpp"

#include <array>
#include <optional>

namespace camnet {

/// Pinhole intrinsics. `perspective_angle` is the horizontal field of view in
/// degrees; the vertical field of view follows from the aspect ratio with
/// square pixels.
struct CameraSpec {
  double perspective_angle = 90.0;
  int width = 640;
  int height = 400;
  double min_range = 0.1;
  double max_range = 50.0;

  void validate() const;

  // Focal length in pixels.
  double focal() const;
  double vertical_angle() const;

  friend bool operator==(const CameraSpec&, const CameraSpec&) = default;
};

/// Rigid placement. The camera looks along its local -z axis, local +x maps
/// to image u (right) and local +y to image -v (up).
class Pose {
public:
  Pose() = default;
  // Normalizes the quaternion; throws on a zero quaternion.
  Pose(const Vec3& position, const Quat& orientation);

  // World up defaults to +z. Falls back to +y when the view direction is
  // parallel to `up`.
  static Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ());
  static Pose look_along(const Vec3& eye, const Vec3& direction, const Vec3& up = Vec3::UnitZ());

  const Vec3& position() const { return position_; }
  const Quat& orientation() const { return orientation_; }

  Vec3 forward() const { return orientation_ * Vec3(0, 0, -1); }
  Vec3 to_camera(const Vec3& world) const { return orientation_.conjugate() * (world - position_); }
  Vec3 to_world(const Vec3& local) const { return orientation_ * local + position_; }

private:
  Vec3 position_ = Vec3::Zero();
  Quat orientation_ = Quat::Identity();
};

struct Viewpoint {
  CameraSpec spec;
  Pose pose;
  int id = 0;
};

/// Pixel coordinates and axial depth. The image spans [0, width] x [0, height]
/// with pixel (i, j) covering [i, i+1) x [j, j+1).
struct Projection {
  double u = 0;
  double v = 0;
  double z = 0;
};

// Projects with the intrinsics alone; no frustum test.
Projection project_unclipped(const CameraSpec& spec, const Pose& pose, const Vec3& point);

std::optional<Projection> project_point(const Viewpoint& viewpoint, const Vec3& point);
bool frustum_contains(const Viewpoint& viewpoint, const Vec3& point);

/// Unit world-space direction through image coordinates (u, v).
Vec3 pixel_ray(const Viewpoint& viewpoint, double u, double v);

/// Corners of the frustum: near plane first (tl, tr, br, bl), then far plane.
std::array<Vec3, 8> frustum_corners(const Viewpoint& viewpoint);

}  // namespace camnet
