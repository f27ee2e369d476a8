#pragma once

#include "camnet/camera.hpp"
#include "camnet/geometry.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace camnet {

/// Oriented box subdivided into nx * ny * nz voxels.
struct RoiBox {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Constant(0.5);
  Quat orientation = Quat::Identity();
  Eigen::Vector3i resolution = Eigen::Vector3i::Ones();

  void validate() const;
  std::size_t voxel_count() const;
  Vec3 spacing() const { return (2.0 * half_extents).cwiseQuotient(resolution.cast<double>()); }
  // World position of the center of voxel (ix, iy, iz).
  Vec3 voxel_center(int ix, int iy, int iz) const;
  Aabbd world_bounds() const;

  friend bool operator==(const RoiBox& a, const RoiBox& b) {
    return a.center == b.center && a.half_extents == b.half_extents &&
           a.orientation.coeffs() == b.orientation.coeffs() && a.resolution == b.resolution;
  }
};

struct GridLink {
  RoiBox box;
  std::vector<std::uint32_t> voxel_index;
};

/// Weighted point set E. Positions are stored one point per column.
struct EnvironmentPoints {
  Eigen::Matrix3Xd positions;
  Eigen::VectorXd weights;
  std::optional<GridLink> grid;

  EnvironmentPoints() : positions(3, 0), weights(0) {}
  // Unit weights.
  explicit EnvironmentPoints(Eigen::Matrix3Xd p);
  EnvironmentPoints(Eigen::Matrix3Xd p, Eigen::VectorXd w);

  std::size_t size() const { return static_cast<std::size_t>(positions.cols()); }
  bool empty() const { return positions.cols() == 0; }
  Vec3 point(std::size_t i) const { return positions.col(static_cast<Eigen::Index>(i)); }
  double total_weight() const { return weights.sum(); }
  void validate() const;
};

struct Segment {
  Vec3 a;
  Vec3 b;
};

enum class Provenance { SegmentGrid, AreaRandom, Explicit };

struct CandidateSet {
  std::vector<Viewpoint> viewpoints;
  Provenance provenance = Provenance::Explicit;

  std::size_t size() const { return viewpoints.size(); }
  const Viewpoint& operator[](std::size_t i) const { return viewpoints[i]; }
};

/// Voxel centers in x-fastest order, with grid linkage.
EnvironmentPoints voxelize_box(const RoiBox& box);

/// Resolution with near-cubic voxels whose count is as close as possible to
/// `target` points.
Eigen::Vector3i resolution_for_count(const Vec3& half_extents, std::size_t target);

/// Ids follow (segment, position, orientation) lexicographic order.
CandidateSet sample_segment_viewpoints(const std::vector<Segment>& segments, int positions_per_segment,
                                       const std::vector<Quat>& orientations, const CameraSpec& spec);

/// Positions uniform over a polygon in the plane z = height; view directions
/// uniform over the lower hemisphere (z component <= 0).
CandidateSet sample_area_viewpoints(const std::vector<Vec2>& polygon, double height, int count,
                                    const CameraSpec& spec, std::uint64_t seed);

CandidateSet explicit_candidates(const std::vector<Pose>& poses, const CameraSpec& spec);

EnvironmentPoints sample_points_uniform(const Aabbd& region, std::size_t count, std::uint64_t seed);
EnvironmentPoints sample_points_uniform(const RoiBox& region, std::size_t count, std::uint64_t seed);

/// Concatenation. Grid linkage survives only when every source links to the
/// same box.
EnvironmentPoints merge_point_sets(const std::vector<EnvironmentPoints>& sets);

/// Binary point file: "CNPT", u32 version, u64 count, u8 has_weights, then
/// count float32 xyz triples and optionally count float32 weights. Little
/// endian throughout.
void write_points(const EnvironmentPoints& points, const std::filesystem::path& path);
EnvironmentPoints read_points(const std::filesystem::path& path);

bool polygon_contains(const std::vector<Vec2>& polygon, const Vec2& p);
double polygon_area(const std::vector<Vec2>& polygon);

}  // namespace camnet
