#pragma once

#include "camnet/common.hpp"

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace camnet {

/// Axis-aligned box. A default-constructed box is empty (min > max) and
/// becomes valid after the first extend().
template <typename Scalar>
struct Aabb {
  using Point = Eigen::Matrix<Scalar, 3, 1>;

  Point min = Point::Constant(std::numeric_limits<Scalar>::infinity());
  Point max = Point::Constant(-std::numeric_limits<Scalar>::infinity());

  Aabb() = default;
  Aabb(const Point& lo, const Point& hi) : min(lo), max(hi) {
    if ((lo.array() > hi.array()).any()) throw InvalidArgument("Aabb: min exceeds max");
  }

  bool empty() const { return (min.array() > max.array()).any(); }

  void extend(const Point& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb& other) {
    min = min.cwiseMin(other.min);
    max = max.cwiseMax(other.max);
  }

  bool contains(const Point& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool contains(const Aabb& other) const {
    return (other.min.array() >= min.array()).all() && (other.max.array() <= max.array()).all();
  }

  Point center() const { return (min + max) / Scalar(2); }
  Point extent() const { return max - min; }
  Scalar diagonal() const { return empty() ? Scalar(0) : extent().norm(); }
};

using Aabbd = Aabb<double>;

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Eigen::Vector3i> triangles;
  // Optional object label per triangle, indexing into `labels`.
  std::vector<std::string> labels;
  std::vector<int> triangle_labels;

  std::size_t triangle_count() const { return triangles.size(); }
  Aabbd bounds() const;
  void append(const TriangleMesh& other);
};

enum class MeshFormat { Obj, Stl, Ply };

struct MeshLoadReport {
  std::size_t triangles = 0;
  std::size_t dropped_degenerate = 0;
  Aabbd bounds;
};

MeshFormat mesh_format_from_string(const std::string& name);
MeshFormat mesh_format_from_path(const std::filesystem::path& path);

// Validates indices and drops zero-area triangles. Throws when no triangle
// survives.
TriangleMesh make_mesh(std::vector<Vec3> vertices, std::vector<Eigen::Vector3i> triangles,
                       MeshLoadReport* report = nullptr);

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format,
                       MeshLoadReport* report = nullptr);

// OBJ is written as text; STL and PLY as little-endian binary.
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format);

bool is_degenerate(const Vec3& a, const Vec3& b, const Vec3& c);

/// Watertight ray/triangle test. Returns the ray parameter t of the hit
/// when t lies in (0, t_max].
std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& direction,
                                         const Vec3& a, const Vec3& b, const Vec3& c,
                                         double t_max);

}  // namespace camnet
