#pragma once

#include "camnet/geometry.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace camnet {

/// Binary bounding volume hierarchy over the triangles of a mesh, built by
/// median split along the longest centroid axis. Immutable after
/// construction; concurrent queries are safe.
class Bvh {
public:
  struct Node {
    Aabbd box;
    // Interior: index of the left child (right child is left + 1).
    // Leaf: first entry in triangle_order().
    std::uint32_t first = 0;
    // Number of triangles for a leaf, 0 for an interior node.
    std::uint32_t count = 0;

    bool is_leaf() const { return count > 0; }
  };

  static constexpr int kDefaultLeafSize = 4;

  explicit Bvh(const TriangleMesh& mesh, int leaf_size = kDefaultLeafSize);

  /// Nearest hit distance in (0, t_max] along a unit direction.
  std::optional<double> intersect(const Vec3& origin, const Vec3& direction, double t_max) const;

  /// True when any triangle is hit in (0, t_max].
  bool occluded(const Vec3& origin, const Vec3& direction, double t_max) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& triangle_order() const { return order_; }
  const Aabbd& bounds() const { return nodes_.front().box; }
  int leaf_size() const { return leaf_size_; }
  std::size_t triangle_count() const { return order_.size(); }

private:
  template <bool AnyHit>
  std::optional<double> traverse(const Vec3& origin, const Vec3& direction, double t_max) const;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
  // Triangle corners, three per triangle in mesh order.
  std::vector<Vec3> corners_;
  int leaf_size_;
};

/// Mesh plus its acceleration structure, loaded together.
struct Scene {
  TriangleMesh mesh;
  Bvh bvh;
  MeshLoadReport report;

  explicit Scene(TriangleMesh m, MeshLoadReport r = {});
};

}  // namespace camnet
