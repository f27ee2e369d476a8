#pragma once

#include "camnet/bvh.hpp"
#include "camnet/camera.hpp"
#include "camnet/discretize.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace camnet {

/// Per-pixel axial depth in meters, +infinity where no geometry was drawn.
struct DepthBuffer {
  int width = 0;
  int height = 0;
  std::vector<float> depths;

  DepthBuffer() = default;
  DepthBuffer(int w, int h);

  float at(int x, int y) const { return depths[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return depths[static_cast<std::size_t>(y) * width + x]; }
};

enum class VisibilityMethod { ZBuffer, Raycast };

VisibilityMethod visibility_method_from_string(const std::string& name);
std::string to_string(VisibilityMethod method);

/// Rasterizes every triangle with perspective-correct depth, a near clip at
/// min_range and the top-left fill rule.
DepthBuffer render_depth(const TriangleMesh& mesh, const Viewpoint& viewpoint);

/// A point is visible when it projects inside the frustum and its depth does
/// not exceed the buffer depth at its pixel plus `bias`.
BitVector visible_points_zbuffer(const DepthBuffer& depth, const Viewpoint& viewpoint,
                                 const EnvironmentPoints& points, double bias);

/// Occlusion tolerance for the ray-cast test: hits closer than this to the
/// target point do not occlude it.
inline constexpr double kRaycastTolerance = 1e-5;

BitVector visible_points_raycast(const Bvh& bvh, const Viewpoint& viewpoint, const EnvironmentPoints& points);

/// Single-camera visibility with either method. A negative bias selects
/// default_depth_bias for the viewpoint.
BitVector compute_visibility(const Scene& scene, const Viewpoint& viewpoint, const EnvironmentPoints& points,
                             VisibilityMethod method, double bias);

/// 1.5 x scene diagonal / larger image dimension.
double default_depth_bias(const Aabbd& scene_bounds, const CameraSpec& spec);

using VisCounts = std::vector<std::uint32_t>;

/// n_points x m_cameras boolean matrix, stored as one bit column per camera.
/// Columns are independent, so replacing one column may race only with
/// readers of that same column.
class VisibilityMatrix {
public:
  VisibilityMatrix() = default;
  VisibilityMatrix(std::size_t n_points, std::size_t m_cameras);

  std::size_t n_points() const { return n_points_; }
  std::size_t m_cameras() const { return columns_.size(); }

  bool bit(std::size_t e, std::size_t v) const { return columns_[v].test(e); }
  void set(std::size_t e, std::size_t v, bool value) { columns_[v].assign(e, value); }

  const BitVector& column(std::size_t v) const { return columns_[v]; }
  void set_column(std::size_t v, BitVector column);

  friend bool operator==(const VisibilityMatrix&, const VisibilityMatrix&) = default;

private:
  std::size_t n_points_ = 0;
  std::vector<BitVector> columns_;
};

VisibilityMatrix build_visibility_matrix(const Scene& scene, const CandidateSet& candidates,
                                         const EnvironmentPoints& points, VisibilityMethod method, double bias);

/// counts[e] = number of cameras in `subset` seeing point e.
VisCounts f_counts(const VisibilityMatrix& matrix, std::span<const int> subset);

/// Binary cache file: "CNVM", u32 version, u64 n, u64 m, u8 order (0 =
/// row-major), then ceil(n*m/8) bytes with bit (e*m + v) stored LSB-first.
void write_visibility_matrix(const VisibilityMatrix& matrix, const std::filesystem::path& path);
VisibilityMatrix read_visibility_matrix(const std::filesystem::path& path);

}  // namespace camnet
