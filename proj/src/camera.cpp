#include "camnet/camera.hpp"

#include "projector.hpp"

#include <cmath>
#include <numbers>

namespace camnet {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

void CameraSpec::validate() const {
  if (!(perspective_angle > 0.0 && perspective_angle < 180.0))
    throw InvalidArgument("perspective_angle must lie in (0, 180) degrees");
  if (width < 1 || height < 1) throw InvalidArgument("resolution must be at least 1x1");
  if (!(min_range >= 0.0 && min_range < max_range))
    throw InvalidArgument("ranges must satisfy 0 <= min_range < max_range");
}

double CameraSpec::focal() const { return 0.5 * width / std::tan(0.5 * perspective_angle * kDegToRad); }

double CameraSpec::vertical_angle() const { return 2.0 * std::atan(0.5 * height / focal()) / kDegToRad; }

Pose::Pose(const Vec3& position, const Quat& orientation) : position_(position) {
  const double n = orientation.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("pose quaternion must be nonzero and finite");
  orientation_ = Quat(orientation.coeffs() / n);
}

Pose Pose::look_along(const Vec3& eye, const Vec3& direction, const Vec3& up) {
  const double len = direction.norm();
  if (!(len > 0.0)) throw InvalidArgument("look direction must be nonzero");
  const Vec3 back = -direction / len;
  Vec3 ref = up.normalized();
  if (std::abs(ref.dot(back)) > 1.0 - 1e-9) ref = std::abs(back.y()) < 0.9 ? Vec3::UnitY() : Vec3::UnitX();
  const Vec3 right = ref.cross(back).normalized();
  const Vec3 cam_up = back.cross(right);
  Eigen::Matrix3d rot;
  rot.col(0) = right;
  rot.col(1) = cam_up;
  rot.col(2) = back;
  return Pose(eye, Quat(rot));
}

Pose Pose::look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  return look_along(eye, target - eye, up);
}

Projection project_unclipped(const CameraSpec& spec, const Pose& pose, const Vec3& point) {
  const Vec3 c = pose.to_camera(point);
  const double z = -c.z();
  const double f = spec.focal();
  return {0.5 * spec.width + f * c.x() / z, 0.5 * spec.height - f * c.y() / z, z};
}

std::optional<Projection> project_point(const Viewpoint& viewpoint, const Vec3& point) {
  return detail::Projector(viewpoint.spec, viewpoint.pose)(point);
}

bool frustum_contains(const Viewpoint& viewpoint, const Vec3& point) {
  return project_point(viewpoint, point).has_value();
}

Vec3 pixel_ray(const Viewpoint& viewpoint, double u, double v) {
  const CameraSpec& spec = viewpoint.spec;
  const double f = spec.focal();
  const Vec3 local((u - 0.5 * spec.width) / f, -(v - 0.5 * spec.height) / f, -1.0);
  return (viewpoint.pose.orientation() * local).normalized();
}

std::array<Vec3, 8> frustum_corners(const Viewpoint& viewpoint) {
  const CameraSpec& spec = viewpoint.spec;
  const double f = spec.focal();
  const double hx = 0.5 * spec.width / f;
  const double hy = 0.5 * spec.height / f;
  std::array<Vec3, 8> out;
  const double depths[2] = {spec.min_range, spec.max_range};
  for (int d = 0; d < 2; ++d) {
    const double z = depths[d];
    const Vec3 local[4] = {{-hx * z, hy * z, -z}, {hx * z, hy * z, -z}, {hx * z, -hy * z, -z}, {-hx * z, -hy * z, -z}};
    for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(4 * d + i)] = viewpoint.pose.to_world(local[i]);
  }
  return out;
}

}  // namespace camnet
