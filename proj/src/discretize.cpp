#include "camnet/discretize.hpp"

#include "binary_io.hpp"

#include <cmath>
#include <fstream>

namespace camnet {

void RoiBox::validate() const {
  if (!(half_extents.array() > 0.0).all()) throw InvalidArgument("RoiBox half extents must be positive");
  if (!(resolution.array() >= 1).all()) throw InvalidArgument("RoiBox resolution must be at least 1 per axis");
  if (!(orientation.norm() > 0.0)) throw InvalidArgument("RoiBox orientation must be a nonzero quaternion");
}

std::size_t RoiBox::voxel_count() const {
  return static_cast<std::size_t>(resolution.x()) * static_cast<std::size_t>(resolution.y()) *
         static_cast<std::size_t>(resolution.z());
}

Vec3 RoiBox::voxel_center(int ix, int iy, int iz) const {
  const Vec3 step = spacing();
  const Vec3 local = -half_extents + step.cwiseProduct(Vec3(ix + 0.5, iy + 0.5, iz + 0.5));
  return center + orientation.normalized() * local;
}

Aabbd RoiBox::world_bounds() const {
  Aabbd box;
  const Quat q = orientation.normalized();
  for (int c = 0; c < 8; ++c) {
    const Vec3 sign((c & 1) ? 1 : -1, (c & 2) ? 1 : -1, (c & 4) ? 1 : -1);
    box.extend(center + q * half_extents.cwiseProduct(sign));
  }
  return box;
}

EnvironmentPoints::EnvironmentPoints(Eigen::Matrix3Xd p)
    : positions(std::move(p)), weights(Eigen::VectorXd::Ones(positions.cols())) {}

EnvironmentPoints::EnvironmentPoints(Eigen::Matrix3Xd p, Eigen::VectorXd w)
    : positions(std::move(p)), weights(std::move(w)) {
  validate();
}

void EnvironmentPoints::validate() const {
  if (weights.size() != positions.cols()) throw InvalidArgument("point and weight counts differ");
  if (weights.size() > 0 && !(weights.array() > 0.0).all()) throw InvalidArgument("point weights must be positive");
  if (grid && grid->voxel_index.size() != size()) throw InvalidArgument("grid linkage size mismatch");
}

EnvironmentPoints voxelize_box(const RoiBox& box) {
  box.validate();
  const std::size_t n = box.voxel_count();
  if (n > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("voxel grid too large");
  EnvironmentPoints out(Eigen::Matrix3Xd(3, static_cast<Eigen::Index>(n)));
  GridLink link{box, std::vector<std::uint32_t>(n)};
  const Quat q = box.orientation.normalized();
  const Vec3 step = box.spacing();
  std::size_t i = 0;
  for (int z = 0; z < box.resolution.z(); ++z)
    for (int y = 0; y < box.resolution.y(); ++y)
      for (int x = 0; x < box.resolution.x(); ++x, ++i) {
        const Vec3 local = -box.half_extents + step.cwiseProduct(Vec3(x + 0.5, y + 0.5, z + 0.5));
        out.positions.col(static_cast<Eigen::Index>(i)) = box.center + q * local;
        link.voxel_index[i] = static_cast<std::uint32_t>(i);
      }
  out.grid = std::move(link);
  return out;
}

Eigen::Vector3i resolution_for_count(const Vec3& half_extents, std::size_t target) {
  if (target == 0) throw InvalidArgument("target point count must be positive");
  if (!(half_extents.array() > 0.0).all()) throw InvalidArgument("half extents must be positive");
  const Vec3 size = 2.0 * half_extents;
  const double spacing = std::cbrt(size.prod() / static_cast<double>(target));
  const Vec3 base = size / spacing;
  Eigen::Vector3i best = base.array().round().max(1.0).cast<int>();
  long long best_err = std::numeric_limits<long long>::max();
  double best_skew = std::numeric_limits<double>::infinity();
  // Near-cubic voxels: try z and y counts around the cubic estimate and let
  // x absorb the remainder, as long as no axis spacing drifts more than
  // 1.5x from another.
  const int z0 = static_cast<int>(std::lround(base.z()));
  const int y0 = static_cast<int>(std::lround(base.y()));
  for (int nz = std::max(1, z0 - 2); nz <= z0 + 2; ++nz)
    for (int ny = std::max(1, y0 - 4); ny <= y0 + 4; ++ny) {
      const double nx_real = static_cast<double>(target) / (static_cast<double>(ny) * nz);
      for (const int nx : {std::max(1, static_cast<int>(std::floor(nx_real))), std::max(1, static_cast<int>(std::ceil(nx_real)))}) {
        const Vec3 step = size.cwiseQuotient(Vec3(nx, ny, nz));
        const double skew = std::log(step.maxCoeff() / step.minCoeff());
        if (skew > std::log(1.5) && !(base.array() < 1.0).any()) continue;
        const long long count = static_cast<long long>(nx) * ny * nz;
        const long long err = std::llabs(count - static_cast<long long>(target));
        if (err < best_err || (err == best_err && skew < best_skew)) {
          best_err = err;
          best_skew = skew;
          best = Eigen::Vector3i(nx, ny, nz);
        }
      }
    }
  return best;
}

CandidateSet sample_segment_viewpoints(const std::vector<Segment>& segments, int positions_per_segment,
                                       const std::vector<Quat>& orientations, const CameraSpec& spec) {
  if (positions_per_segment < 2) throw InvalidArgument("positions_per_segment must be at least 2");
  if (orientations.empty()) throw InvalidArgument("at least one orientation is required");
  spec.validate();
  CandidateSet set;
  set.provenance = Provenance::SegmentGrid;
  set.viewpoints.reserve(segments.size() * static_cast<std::size_t>(positions_per_segment) * orientations.size());
  int id = 0;
  for (const auto& seg : segments)
    for (int p = 0; p < positions_per_segment; ++p) {
      const double s = static_cast<double>(p) / (positions_per_segment - 1);
      const Vec3 pos = p == positions_per_segment - 1 ? seg.b : Vec3(seg.a + s * (seg.b - seg.a));
      for (const auto& q : orientations) set.viewpoints.push_back({spec, Pose(pos, q), id++});
    }
  return set;
}

bool polygon_contains(const std::vector<Vec2>& polygon, const Vec2& p) {
  bool inside = false;
  for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double polygon_area(const std::vector<Vec2>& polygon) {
  double twice = 0.0;
  for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++)
    twice += polygon[j].x() * polygon[i].y() - polygon[i].x() * polygon[j].y();
  return 0.5 * std::abs(twice);
}

CandidateSet sample_area_viewpoints(const std::vector<Vec2>& polygon, double height, int count,
                                    const CameraSpec& spec, std::uint64_t seed) {
  if (polygon.size() < 3 || !(polygon_area(polygon) > 0.0)) throw InvalidArgument("polygon is degenerate");
  if (count < 1) throw InvalidArgument("count must be at least 1");
  spec.validate();
  Eigen::Vector2d lo = polygon.front();
  Eigen::Vector2d hi = polygon.front();
  for (const auto& p : polygon) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Rng rng(seed);
  CandidateSet set;
  set.provenance = Provenance::AreaRandom;
  set.viewpoints.reserve(static_cast<std::size_t>(count));
  for (int id = 0; id < count; ++id) {
    Vec2 p;
    do {
      p = Vec2(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()));
    } while (!polygon_contains(polygon, p));
    // Uniform direction on the sphere by cube rejection, restricted to the
    // lower hemisphere.
    Vec3 d;
    double r2;
    do {
      d = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
      r2 = d.squaredNorm();
    } while (r2 > 1.0 || r2 < 1e-12 || d.z() > 0.0);
    set.viewpoints.push_back({spec, Pose::look_along(Vec3(p.x(), p.y(), height), d), id});
  }
  return set;
}

CandidateSet explicit_candidates(const std::vector<Pose>& poses, const CameraSpec& spec) {
  spec.validate();
  CandidateSet set;
  set.provenance = Provenance::Explicit;
  for (std::size_t i = 0; i < poses.size(); ++i) set.viewpoints.push_back({spec, poses[i], static_cast<int>(i)});
  return set;
}

EnvironmentPoints sample_points_uniform(const Aabbd& region, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("count must be at least 1");
  if (region.empty()) throw InvalidArgument("sampling region is empty");
  Rng rng(seed);
  Eigen::Matrix3Xd p(3, static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < p.cols(); ++i)
    for (int k = 0; k < 3; ++k) p(k, i) = rng.uniform(region.min[k], region.max[k]);
  return EnvironmentPoints(std::move(p));
}

EnvironmentPoints sample_points_uniform(const RoiBox& region, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("count must be at least 1");
  region.validate();
  Rng rng(seed);
  const Quat q = region.orientation.normalized();
  Eigen::Matrix3Xd p(3, static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < p.cols(); ++i) {
    Vec3 local;
    for (int k = 0; k < 3; ++k) local[k] = rng.uniform(-region.half_extents[k], region.half_extents[k]);
    p.col(i) = region.center + q * local;
  }
  return EnvironmentPoints(std::move(p));
}

EnvironmentPoints merge_point_sets(const std::vector<EnvironmentPoints>& sets) {
  Eigen::Index total = 0;
  for (const auto& s : sets) total += s.positions.cols();
  EnvironmentPoints out(Eigen::Matrix3Xd(3, total));
  Eigen::Index offset = 0;
  bool same_grid = !sets.empty();
  for (const auto& s : sets) {
    out.positions.middleCols(offset, s.positions.cols()) = s.positions;
    out.weights.segment(offset, s.weights.size()) = s.weights;
    offset += s.positions.cols();
    same_grid = same_grid && s.grid && s.grid->box == sets.front().grid->box;
  }
  if (same_grid) {
    GridLink link{sets.front().grid->box, {}};
    for (const auto& s : sets)
      link.voxel_index.insert(link.voxel_index.end(), s.grid->voxel_index.begin(), s.grid->voxel_index.end());
    out.grid = std::move(link);
  }
  return out;
}

namespace {
constexpr char kPointMagic[4] = {'C', 'N', 'P', 'T'};
constexpr std::uint32_t kPointVersion = 1;
}  // namespace

void write_points(const EnvironmentPoints& points, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const bool has_weights = !(points.weights.array() == 1.0).all();
  out.write(kPointMagic, 4);
  detail::put_le<std::uint32_t>(out, kPointVersion);
  detail::put_le<std::uint64_t>(out, points.size());
  detail::put_le<std::uint8_t>(out, has_weights ? 1 : 0);
  for (std::size_t i = 0; i < points.size(); ++i)
    for (int k = 0; k < 3; ++k)
      detail::put_le<float>(out, static_cast<float>(points.positions(k, static_cast<Eigen::Index>(i))));
  if (has_weights)
    for (Eigen::Index i = 0; i < points.weights.size(); ++i) detail::put_le<float>(out, static_cast<float>(points.weights[i]));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

EnvironmentPoints read_points(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string_view(magic, 4) != std::string_view(kPointMagic, 4))
    throw IoError(path.string() + ": not a point file");
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != kPointVersion) throw IoError(path.string() + ": unsupported point file version");
  const auto n = detail::get_le<std::uint64_t>(in);
  const auto has_weights = detail::get_le<std::uint8_t>(in);
  Eigen::Matrix3Xd p(3, static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < p.cols(); ++i)
    for (int k = 0; k < 3; ++k) p(k, i) = detail::get_le<float>(in);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  if (has_weights)
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = detail::get_le<float>(in);
  return EnvironmentPoints(std::move(p), std::move(w));
}

}  // namespace camnet
