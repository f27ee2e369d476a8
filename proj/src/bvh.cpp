#include "camnet/bvh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace camnet {

namespace {

struct BuildItem {
  std::uint32_t node;
  std::uint32_t begin;
  std::uint32_t end;
};

constexpr double kGamma3 = 3.0 * 0x1.0p-53 / (1.0 - 3.0 * 0x1.0p-53);

// Slab test; returns the entry distance or +inf on a miss.
double ray_box(const Aabbd& box, const Vec3& origin, const Vec3& inv_dir, double t_max) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int k = 0; k < 3; ++k) {
    double near = (box.min[k] - origin[k]) * inv_dir[k];
    double far = (box.max[k] - origin[k]) * inv_dir[k];
    // 0 * inf: the ray runs inside a face plane, which counts as inside.
    if (std::isnan(near) || std::isnan(far)) continue;
    if (near > far) std::swap(near, far);
    // Conservative rounding bound (Ize 2013) so boxes are never missed.
    far *= 1.0 + 2.0 * kGamma3;
    if (near > t0) t0 = near;
    if (far < t1) t1 = far;
    if (t0 > t1) return std::numeric_limits<double>::infinity();
  }
  return t0;
}

}  // namespace

Bvh::Bvh(const TriangleMesh& mesh, int leaf_size) : leaf_size_(leaf_size) {
  if (mesh.triangles.empty()) throw InvalidArgument("Bvh: mesh has no triangles");
  if (leaf_size < 1) throw InvalidArgument("Bvh: leaf size must be positive");

  const std::size_t n = mesh.triangles.size();
  corners_.reserve(3 * n);
  std::vector<Aabbd> tri_boxes(n);
  std::vector<Vec3> centroids(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      corners_.push_back(mesh.vertices[static_cast<std::size_t>(tri[k])]);
      tri_boxes[t].extend(corners_.back());
    }
    centroids[t] = tri_boxes[t].center();
  }

  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * n / static_cast<std::size_t>(leaf_size) + 1);
  nodes_.emplace_back();

  std::vector<BuildItem> stack{{0, 0, static_cast<std::uint32_t>(n)}};
  while (!stack.empty()) {
    const BuildItem item = stack.back();
    stack.pop_back();

    Aabbd box;
    Aabbd centroid_box;
    for (std::uint32_t i = item.begin; i < item.end; ++i) {
      box.extend(tri_boxes[order_[i]]);
      centroid_box.extend(centroids[order_[i]]);
    }
    nodes_[item.node].box = box;

    const std::uint32_t count = item.end - item.begin;
    int axis = 0;
    centroid_box.extent().maxCoeff(&axis);
    if (count <= static_cast<std::uint32_t>(leaf_size) || centroid_box.extent()[axis] <= 0.0) {
      nodes_[item.node].first = item.begin;
      nodes_[item.node].count = count;
      continue;
    }

    const std::uint32_t mid = item.begin + count / 2;
    // Ties on the centroid coordinate are broken by triangle index so the
    // tree does not depend on the nth_element implementation's pivoting.
    std::nth_element(order_.begin() + item.begin, order_.begin() + mid, order_.begin() + item.end,
                     [&](std::uint32_t l, std::uint32_t r) {
                       const double cl = centroids[l][axis];
                       const double cr = centroids[r][axis];
                       return cl < cr || (cl == cr && l < r);
                     });

    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    nodes_.emplace_back();
    nodes_[item.node].first = left;
    nodes_[item.node].count = 0;
    stack.push_back({left + 1, mid, item.end});
    stack.push_back({left, item.begin, mid});
  }
}

template <bool AnyHit>
std::optional<double> Bvh::traverse(const Vec3& origin, const Vec3& direction, double t_max) const {
  const Vec3 inv_dir = direction.cwiseInverse();
  double best = t_max;
  bool found = false;

  std::array<std::uint32_t, 128> stack;
  int top = 0;
  if (ray_box(nodes_[0].box, origin, inv_dir, best) == std::numeric_limits<double>::infinity())
    return std::nullopt;
  stack[top++] = 0;

  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.is_leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::size_t t = order_[i];
        const auto hit = intersect_triangle(origin, direction, corners_[3 * t], corners_[3 * t + 1],
                                            corners_[3 * t + 2], best);
        if (hit) {
          if constexpr (AnyHit) return hit;
          best = *hit;
          found = true;
        }
      }
      continue;
    }
    const std::uint32_t l = node.first;
    const std::uint32_t r = node.first + 1;
    const double tl = ray_box(nodes_[l].box, origin, inv_dir, best);
    const double tr = ray_box(nodes_[r].box, origin, inv_dir, best);
    constexpr double inf = std::numeric_limits<double>::infinity();
    // Push the farther child first so the nearer one is popped next.
    if (tl < inf && tr < inf) {
      if (tl <= tr) {
        stack[top++] = r;
        stack[top++] = l;
      } else {
        stack[top++] = l;
        stack[top++] = r;
      }
    } else if (tl < inf) {
      stack[top++] = l;
    } else if (tr < inf) {
      stack[top++] = r;
    }
    if (top + 2 > static_cast<int>(stack.size())) throw Error("Bvh: traversal stack overflow");
  }
  if (!found) return std::nullopt;
  return best;
}

std::optional<double> Bvh::intersect(const Vec3& origin, const Vec3& direction, double t_max) const {
  return traverse<false>(origin, direction, t_max);
}

bool Bvh::occluded(const Vec3& origin, const Vec3& direction, double t_max) const {
  return traverse<true>(origin, direction, t_max).has_value();
}

Scene::Scene(TriangleMesh m, MeshLoadReport r) : mesh(std::move(m)), bvh(mesh), report(r) {
  if (report.triangles == 0) {
    report.triangles = mesh.triangle_count();
    report.bounds = mesh.bounds();
  }
}

}  // namespace camnet
