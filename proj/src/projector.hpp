#pragma once

#include "camnet/camera.hpp"

#include <cmath>
#include <optional>

namespace camnet::detail {

// Precomputed form of project_point; every visibility path goes through this
// so frustum decisions agree bit-for-bit.
class Projector {
public:
  explicit Projector(const CameraSpec& spec, const Pose& pose)
      : rot_(pose.orientation().conjugate().toRotationMatrix()),
        position_(pose.position()),
        focal_(spec.focal()),
        cx_(0.5 * spec.width),
        cy_(0.5 * spec.height),
        width_(spec.width),
        height_(spec.height),
        min_range_(spec.min_range),
        max_range_(spec.max_range) {}

  // Camera-space coordinates with depth flipped positive: (x, y, depth).
  Vec3 to_view(const Vec3& world) const {
    Vec3 c = rot_ * (world - position_);
    c.z() = -c.z();
    return c;
  }

  std::optional<Projection> operator()(const Vec3& world) const {
    const Vec3 c = to_view(world);
    const double z = c.z();
    if (!(z > 0.0) || z < min_range_ || z > max_range_) return std::nullopt;
    const double u = cx_ + focal_ * c.x() / z;
    const double v = cy_ - focal_ * c.y() / z;
    if (!(u >= 0.0 && u <= width_ && v >= 0.0 && v <= height_)) return std::nullopt;
    return Projection{u, v, z};
  }

  double focal() const { return focal_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  int width() const { return width_; }
  int height() const { return height_; }

  // Pixel holding image coordinate u; the far border is clamped inward.
  int pixel_x(double u) const { return std::min(static_cast<int>(u), width_ - 1); }
  int pixel_y(double v) const { return std::min(static_cast<int>(v), height_ - 1); }

private:
  Eigen::Matrix3d rot_;
  Vec3 position_;
  double focal_;
  double cx_;
  double cy_;
  int width_;
  int height_;
  double min_range_;
  double max_range_;
};

}  // namespace camnet::detail
