#include "camnet/visibility.hpp"

#include "binary_io.hpp"
#include "projector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

namespace camnet {

DepthBuffer::DepthBuffer(int w, int h)
    : width(w), height(h),
      depths(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), std::numeric_limits<float>::infinity()) {}

VisibilityMethod visibility_method_from_string(const std::string& name) {
  if (name == "zbuffer") return VisibilityMethod::ZBuffer;
  if (name == "raycast") return VisibilityMethod::Raycast;
  throw InvalidArgument("unknown visibility method '" + name + "' (expected zbuffer or raycast)");
}

std::string to_string(VisibilityMethod method) {
  return method == VisibilityMethod::ZBuffer ? "zbuffer" : "raycast";
}

namespace {

struct ScreenVertex {
  double x;
  double y;
  double inv_z;
};

// Edge function of p against the directed edge a -> b.
inline double edge(double ax, double ay, double bx, double by, double px, double py) {
  return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// With positive-area winding in y-down screen space, top and left edges are
// the ones that own pixel centers lying exactly on them.
inline bool owns_boundary(const ScreenVertex& a, const ScreenVertex& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

void raster_triangle(ScreenVertex a, ScreenVertex b, ScreenVertex c, DepthBuffer& buffer) {
  double area = edge(a.x, a.y, b.x, b.y, c.x, c.y);
  if (area == 0.0 || !std::isfinite(area)) return;
  if (area < 0.0) {
    std::swap(b, c);
    area = -area;
  }
  const double min_x = std::min({a.x, b.x, c.x});
  const double max_x = std::max({a.x, b.x, c.x});
  const double min_y = std::min({a.y, b.y, c.y});
  const double max_y = std::max({a.y, b.y, c.y});
  // Pixel centers sit at (i + 0.5, j + 0.5).
  const int x0 = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
  const int x1 = std::min(buffer.width - 1, static_cast<int>(std::floor(max_x - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
  const int y1 = std::min(buffer.height - 1, static_cast<int>(std::floor(max_y - 0.5)));
  if (x0 > x1 || y0 > y1) return;

  const bool own_bc = owns_boundary(b, c);
  const bool own_ca = owns_boundary(c, a);
  const bool own_ab = owns_boundary(a, b);
  const double inv_area = 1.0 / area;

  for (int y = y0; y <= y1; ++y) {
    const double py = y + 0.5;
    float* row = buffer.depths.data() + static_cast<std::size_t>(y) * buffer.width;
    for (int x = x0; x <= x1; ++x) {
      const double px = x + 0.5;
      const double w0 = edge(b.x, b.y, c.x, c.y, px, py);
      const double w1 = edge(c.x, c.y, a.x, a.y, px, py);
      const double w2 = edge(a.x, a.y, b.x, b.y, px, py);
      if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
      if ((w0 == 0.0 && !own_bc) || (w1 == 0.0 && !own_ca) || (w2 == 0.0 && !own_ab)) continue;
      // 1/z is affine in screen space.
      const double inv_z = (w0 * a.inv_z + w1 * b.inv_z + w2 * c.inv_z) * inv_area;
      const float z = static_cast<float>(1.0 / inv_z);
      if (z < row[x]) row[x] = z;
    }
  }
}

}  // namespace

DepthBuffer render_depth(const TriangleMesh& mesh, const Viewpoint& viewpoint) {
  const CameraSpec& spec = viewpoint.spec;
  spec.validate();
  if (mesh.triangles.empty()) throw InvalidArgument("render_depth: mesh has no triangles");
  DepthBuffer buffer(spec.width, spec.height);
  const detail::Projector proj(spec, viewpoint.pose);
  const double near = std::max(spec.min_range, 1e-6);
  const double f = proj.focal();
  const double hx = 0.5 * spec.width / f;
  const double hy = 0.5 * spec.height / f;

  std::vector<Vec3> view(mesh.vertices.size());
  for (std::size_t i = 0; i < view.size(); ++i) view[i] = proj.to_view(mesh.vertices[i]);

  auto to_screen = [&](const Vec3& c) {
    return ScreenVertex{proj.cx() + f * c.x() / c.z(), proj.cy() - f * c.y() / c.z(), 1.0 / c.z()};
  };

  std::array<Vec3, 4> poly;
  for (const auto& tri : mesh.triangles) {
    const Vec3& p0 = view[static_cast<std::size_t>(tri[0])];
    const Vec3& p1 = view[static_cast<std::size_t>(tri[1])];
    const Vec3& p2 = view[static_cast<std::size_t>(tri[2])];
    if (p0.z() < near && p1.z() < near && p2.z() < near) continue;
    // Side planes pass through the eye, so these tests hold for any depth.
    if (p0.x() > hx * p0.z() && p1.x() > hx * p1.z() && p2.x() > hx * p2.z()) continue;
    if (p0.x() < -hx * p0.z() && p1.x() < -hx * p1.z() && p2.x() < -hx * p2.z()) continue;
    if (p0.y() > hy * p0.z() && p1.y() > hy * p1.z() && p2.y() > hy * p2.z()) continue;
    if (p0.y() < -hy * p0.z() && p1.y() < -hy * p1.z() && p2.y() < -hy * p2.z()) continue;

    if (p0.z() >= near && p1.z() >= near && p2.z() >= near) {
      raster_triangle(to_screen(p0), to_screen(p1), to_screen(p2), buffer);
      continue;
    }
    // Near-plane clip (Sutherland-Hodgman against z >= near).
    const Vec3* in[3] = {&p0, &p1, &p2};
    int n = 0;
    for (int i = 0; i < 3; ++i) {
      const Vec3& cur = *in[i];
      const Vec3& nxt = *in[(i + 1) % 3];
      const bool cur_in = cur.z() >= near;
      const bool nxt_in = nxt.z() >= near;
      if (cur_in) poly[static_cast<std::size_t>(n++)] = cur;
      if (cur_in != nxt_in) {
        const double s = (near - cur.z()) / (nxt.z() - cur.z());
        Vec3 hit = cur + s * (nxt - cur);
        hit.z() = near;
        poly[static_cast<std::size_t>(n++)] = hit;
      }
    }
    const ScreenVertex s0 = to_screen(poly[0]);
    for (int i = 1; i + 1 < n; ++i)
      raster_triangle(s0, to_screen(poly[static_cast<std::size_t>(i)]), to_screen(poly[static_cast<std::size_t>(i + 1)]),
                      buffer);
  }
  return buffer;
}

BitVector visible_points_zbuffer(const DepthBuffer& depth, const Viewpoint& viewpoint,
                                 const EnvironmentPoints& points, double bias) {
  if (!(bias >= 0.0)) throw InvalidArgument("depth bias must be nonnegative");
  if (depth.width != viewpoint.spec.width || depth.height != viewpoint.spec.height)
    throw InvalidArgument("depth buffer size does not match the camera resolution");
  const detail::Projector proj(viewpoint.spec, viewpoint.pose);
  BitVector out(points.size());
  for (std::size_t e = 0; e < points.size(); ++e) {
    const auto p = proj(points.positions.col(static_cast<Eigen::Index>(e)));
    if (!p) continue;
    const float d = depth.at(proj.pixel_x(p->u), proj.pixel_y(p->v));
    if (p->z <= static_cast<double>(d) + bias) out.set(e);
  }
  return out;
}

BitVector visible_points_raycast(const Bvh& bvh, const Viewpoint& viewpoint, const EnvironmentPoints& points) {
  const detail::Projector proj(viewpoint.spec, viewpoint.pose);
  const Vec3& eye = viewpoint.pose.position();
  BitVector out(points.size());
  for (std::size_t e = 0; e < points.size(); ++e) {
    const Vec3 target = points.positions.col(static_cast<Eigen::Index>(e));
    if (!proj(target)) continue;
    const Vec3 d = target - eye;
    const double dist = d.norm();
    const double reach = dist - kRaycastTolerance;
    if (reach <= 0.0 || !bvh.occluded(eye, d / dist, reach)) out.set(e);
  }
  return out;
}

BitVector compute_visibility(const Scene& scene, const Viewpoint& viewpoint, const EnvironmentPoints& points,
                             VisibilityMethod method, double bias) {
  if (method == VisibilityMethod::Raycast) return visible_points_raycast(scene.bvh, viewpoint, points);
  if (bias < 0.0) bias = default_depth_bias(scene.mesh.bounds(), viewpoint.spec);
  return visible_points_zbuffer(render_depth(scene.mesh, viewpoint), viewpoint, points, bias);
}

double default_depth_bias(const Aabbd& scene_bounds, const CameraSpec& spec) {
  return 1.5 * scene_bounds.diagonal() / std::max(spec.width, spec.height);
}

VisibilityMatrix::VisibilityMatrix(std::size_t n_points, std::size_t m_cameras)
    : n_points_(n_points), columns_(m_cameras, BitVector(n_points)) {}

void VisibilityMatrix::set_column(std::size_t v, BitVector column) {
  if (column.size() != n_points_) throw InvalidArgument("column length does not match the point count");
  columns_.at(v) = std::move(column);
}

VisibilityMatrix build_visibility_matrix(const Scene& scene, const CandidateSet& candidates,
                                         const EnvironmentPoints& points, VisibilityMethod method, double bias) {
  VisibilityMatrix matrix(points.size(), candidates.size());
  parallel_for(candidates.size(), [&](std::size_t v) {
    matrix.set_column(v, compute_visibility(scene, candidates[v], points, method, bias));
  });
  return matrix;
}

VisCounts f_counts(const VisibilityMatrix& matrix, std::span<const int> subset) {
  VisCounts counts(matrix.n_points(), 0);
  for (const int v : subset) {
    if (v < 0 || static_cast<std::size_t>(v) >= matrix.m_cameras())
      throw InvalidArgument("camera id " + std::to_string(v) + " out of range");
    matrix.column(static_cast<std::size_t>(v)).for_each_set([&](std::size_t e) { ++counts[e]; });
  }
  return counts;
}

namespace {
constexpr char kMatrixMagic[4] = {'C', 'N', 'V', 'M'};
constexpr std::uint32_t kMatrixVersion = 1;
}  // namespace

void write_visibility_matrix(const VisibilityMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const std::uint64_t n = matrix.n_points();
  const std::uint64_t m = matrix.m_cameras();
  out.write(kMatrixMagic, 4);
  detail::put_le<std::uint32_t>(out, kMatrixVersion);
  detail::put_le<std::uint64_t>(out, n);
  detail::put_le<std::uint64_t>(out, m);
  detail::put_le<std::uint8_t>(out, 0);
  std::vector<std::uint8_t> bytes((n * m + 7) / 8, 0);
  for (std::uint64_t v = 0; v < m; ++v)
    matrix.column(v).for_each_set([&](std::size_t e) {
      const std::uint64_t bit = e * m + v;
      bytes[bit >> 3] |= static_cast<std::uint8_t>(1u << (bit & 7));
    });
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

VisibilityMatrix read_visibility_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string_view(magic, 4) != std::string_view(kMatrixMagic, 4))
    throw IoError(path.string() + ": not a visibility matrix file");
  if (detail::get_le<std::uint32_t>(in) != kMatrixVersion)
    throw IoError(path.string() + ": unsupported matrix version");
  const auto n = detail::get_le<std::uint64_t>(in);
  const auto m = detail::get_le<std::uint64_t>(in);
  if (detail::get_le<std::uint8_t>(in) != 0) throw IoError(path.string() + ": unsupported bit order");
  std::vector<std::uint8_t> bytes((n * m + 7) / 8);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!in) throw IoError(path.string() + ": truncated matrix payload");
  VisibilityMatrix matrix(n, m);
  for (std::uint64_t e = 0; e < n; ++e)
    for (std::uint64_t v = 0; v < m; ++v) {
      const std::uint64_t bit = e * m + v;
      if ((bytes[bit >> 3] >> (bit & 7)) & 1u) matrix.set(e, v, true);
    }
  return matrix;
}

}  // namespace camnet
