#include "camnet/scenes.hpp"

#include <cmath>
#include <numbers>

namespace camnet {

namespace {

int label_index(TriangleMesh& mesh, const std::string& label) {
  for (std::size_t i = 0; i < mesh.labels.size(); ++i)
    if (mesh.labels[i] == label) return static_cast<int>(i);
  mesh.labels.push_back(label);
  return static_cast<int>(mesh.labels.size()) - 1;
}

void push_triangle(TriangleMesh& mesh, int a, int b, int c, int label) {
  mesh.triangles.emplace_back(a, b, c);
  if (label >= 0) {
    mesh.triangle_labels.resize(mesh.triangles.size() - 1, -1);
    mesh.triangle_labels.push_back(label);
  }
}

// Quad a-b-c-d, counter-clockwise seen from the side it faces.
void push_quad(TriangleMesh& mesh, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, int label) {
  const int base = static_cast<int>(mesh.vertices.size());
  mesh.vertices.insert(mesh.vertices.end(), {a, b, c, d});
  push_triangle(mesh, base, base + 1, base + 2, label);
  push_triangle(mesh, base, base + 2, base + 3, label);
}

void finish_labels(TriangleMesh& mesh) {
  if (!mesh.labels.empty()) mesh.triangle_labels.resize(mesh.triangles.size(), -1);
}

}  // namespace

void append_box(TriangleMesh& mesh, const Vec3& lo, const Vec3& hi, const std::string& label) {
  if ((lo.array() >= hi.array()).any()) throw InvalidArgument("box corners must satisfy lo < hi");
  const int l = label.empty() ? -1 : label_index(mesh, label);
  const int base = static_cast<int>(mesh.vertices.size());
  for (int c = 0; c < 8; ++c)
    mesh.vertices.emplace_back((c & 1) ? hi.x() : lo.x(), (c & 2) ? hi.y() : lo.y(), (c & 4) ? hi.z() : lo.z());
  static constexpr int kFaces[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                       {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& f : kFaces) {
    push_triangle(mesh, base + f[0], base + f[1], base + f[2], l);
    push_triangle(mesh, base + f[0], base + f[2], base + f[3], l);
  }
  finish_labels(mesh);
}

HarbourLayout harbour_scene() {
  HarbourLayout h;
  TriangleMesh& m = h.mesh;
  push_quad(m, {-60, -40, 0}, {60, -40, 0}, {60, 40, 0}, {-60, 40, 0}, label_index(m, "ground"));

  // Six rows of containers along x, 20 ft boxes, some stacked two high.
  constexpr double kLen = 6.06, kWid = 2.44, kHgt = 2.59;
  const double row_y[6] = {-16.0, -11.0, -6.0, 4.0, 9.0, 14.0};
  int n = 0;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 10; ++c) {
      const double x0 = -38.0 + c * (kLen + 1.6);
      const double y0 = row_y[r];
      const int stack = 1 + ((r * 7 + c * 3) % 4 == 0) + ((r + c) % 5 == 0 ? 1 : 0);
      if ((r * 3 + c) % 9 == 4) continue;  // gaps in the rows
      for (int s = 0; s < stack; ++s)
        append_box(m, {x0, y0, s * kHgt}, {x0 + kLen, y0 + kWid, (s + 1) * kHgt}, "container" + std::to_string(n));
      ++n;
    }
  }

  // Two gantry cranes: a beam along x at 28 m, legs at both ends.
  for (const double y : {-22.0, 22.0}) {
    append_box(m, {-46, y - 1, 28}, {46, y + 1, 30}, "beam");
    for (const double x : {-46.0, 44.0}) append_box(m, {x, y - 1, 0}, {x + 2, y + 1, 28}, "leg");
    h.beams.push_back({Vec3(-40, y, 27.5), Vec3(40, y, 27.5)});
  }

  h.roi.center = Vec3(0, 0, 1.5);
  h.roi.half_extents = Vec3(40, 20, 1.5);
  h.roi.resolution = resolution_for_count(h.roi.half_extents, 30000);

  // Lanes between rows, a little above ground.
  h.aisles = {Aabbd({-40, -13.56, 0.1}, {40, -11.0, 2.5}), Aabbd({-40, -8.56, 0.1}, {40, -6.0, 2.5}),
              Aabbd({-40, -3.56, 0.1}, {40, 4.0, 2.5}),    Aabbd({-40, 6.44, 0.1}, {40, 9.0, 2.5}),
              Aabbd({-40, 11.44, 0.1}, {40, 14.0, 2.5})};

  // Straight down plus two rings of tilted views.
  h.orientations.push_back(Vec3(0, 0, -1));
  for (const double tilt : {30.0, 55.0})
    for (int i = 0; i < 7; ++i) {
      const double t = tilt * std::numbers::pi / 180.0;
      const double a = 2.0 * std::numbers::pi * i / 7.0;
      h.orientations.push_back(Vec3(std::sin(t) * std::cos(a), std::sin(t) * std::sin(a), -std::cos(t)));
    }
  return h;
}

TriangleMesh office_scene() {
  TriangleMesh m;
  const int floor = label_index(m, "floor");
  const int ceiling = label_index(m, "ceiling");
  push_quad(m, {0, 0, 0}, {40, 0, 0}, {40, 40, 0}, {0, 40, 0}, floor);
  push_quad(m, {0, 0, 3}, {0, 40, 3}, {40, 40, 3}, {40, 0, 3}, ceiling);
  append_box(m, {0, 0, 0}, {0.2, 40, 3}, "wall");
  append_box(m, {39.8, 0, 0}, {40, 40, 3}, "wall");
  append_box(m, {0.2, 0, 0}, {39.8, 0.2, 3}, "wall");
  append_box(m, {0.2, 39.8, 0}, {39.8, 40, 3}, "wall");
  // Partitions with door gaps.
  for (const double x : {13.0, 27.0}) {
    append_box(m, {x, 0.2, 0}, {x + 0.15, 17.0, 3}, "partition");
    append_box(m, {x, 19.0, 0}, {x + 0.15, 30.0, 3}, "partition");
  }
  append_box(m, {0.2, 30.0, 0}, {10.0, 30.15, 3}, "partition");
  append_box(m, {12.0, 30.0, 0}, {39.8, 30.15, 3}, "partition");
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double x = 5.0 + 10.0 * i, y = 5.0 + 10.0 * j;
      if (std::abs(x - 13.0) < 1.0 || std::abs(x - 27.0) < 1.0) continue;
      append_box(m, {x - 0.3, y - 0.3, 0}, {x + 0.3, y + 0.3, 3}, "pillar");
    }
  // Desk clusters: top slab plus a modesty panel.
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 5; ++j) {
      const double x = 2.0 + 6.3 * i, y = 2.5 + 5.5 * j;
      append_box(m, {x, y, 0.72}, {x + 1.6, y + 0.8, 0.75}, "desk");
      append_box(m, {x, y + 0.75, 0}, {x + 1.6, y + 0.8, 0.72}, "desk");
      append_box(m, {x + 0.5, y - 0.6, 0}, {x + 1.0, y - 0.1, 0.9}, "chair");
    }
  for (int i = 0; i < 8; ++i) append_box(m, {2.0 + 4.5 * i, 32.0, 0}, {3.8 + 4.5 * i, 32.5, 2.0}, "shelf");
  return m;
}

TriangleMesh carpark_scene(int cells) {
  if (cells < 2) throw InvalidArgument("carpark needs at least 2 cells");
  TriangleMesh m;
  const int deck = label_index(m, "deck");
  constexpr double kSize = 60.0;
  const double step = kSize / cells;
  auto height = [&](double x, double y) {
    return 0.4 * std::sin(x * 0.21) * std::cos(y * 0.17) + 0.15 * std::sin(0.9 * x + 0.4 * y) +
           (x > 40.0 ? 0.12 * (x - 40.0) : 0.0);
  };
  const int base = static_cast<int>(m.vertices.size());
  for (int j = 0; j <= cells; ++j)
    for (int i = 0; i <= cells; ++i) {
      const double x = i * step, y = j * step;
      m.vertices.emplace_back(x, y, height(x, y));
    }
  auto vid = [&](int i, int j) { return base + j * (cells + 1) + i; };
  for (int j = 0; j < cells; ++j)
    for (int i = 0; i < cells; ++i) {
      push_triangle(m, vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), deck);
      push_triangle(m, vid(i, j), vid(i + 1, j + 1), vid(i, j + 1), deck);
    }
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const double x = 5.0 + 10.0 * i, y = 5.0 + 10.0 * j;
      append_box(m, {x - 0.4, y - 0.4, -1.0}, {x + 0.4, y + 0.4, 6.0}, "pillar");
    }
  Rng rng(2024);
  for (int c = 0; c < 80; ++c) {
    const double x = rng.uniform(2.0, 36.0), y = rng.uniform(2.0, 56.0);
    const bool along_x = rng.uniform() < 0.5;
    const Vec3 half = along_x ? Vec3(2.2, 0.9, 0.75) : Vec3(0.9, 2.2, 0.75);
    const double z = height(x, y) - 0.3;
    append_box(m, Vec3(x, y, z) - Vec3(half.x(), half.y(), 0.0), Vec3(x, y, z + 1.5) + Vec3(half.x(), half.y(), 0.0),
               "car");
  }
  finish_labels(m);
  return m;
}

TriangleMesh room_scene(const Vec3& size) {
  if ((size.array() <= 0.0).any()) throw InvalidArgument("room size must be positive");
  TriangleMesh m;
  const int wall = label_index(m, "wall");
  const double X = size.x(), Y = size.y(), Z = size.z();
  // Faces point inward.
  push_quad(m, {0, 0, 0}, {0, Y, 0}, {X, Y, 0}, {X, 0, 0}, wall);
  push_quad(m, {0, 0, Z}, {X, 0, Z}, {X, Y, Z}, {0, Y, Z}, wall);
  push_quad(m, {0, 0, 0}, {X, 0, 0}, {X, 0, Z}, {0, 0, Z}, wall);
  push_quad(m, {0, Y, 0}, {0, Y, Z}, {X, Y, Z}, {X, Y, 0}, wall);
  push_quad(m, {0, 0, 0}, {0, 0, Z}, {0, Y, Z}, {0, Y, 0}, wall);
  push_quad(m, {X, 0, 0}, {X, Y, 0}, {X, Y, Z}, {X, 0, Z}, wall);
  return m;
}

TriangleMesh clutter_scene(int boxes, std::uint64_t seed, double extent) {
  if (boxes < 0) throw InvalidArgument("box count must be nonnegative");
  TriangleMesh m;
  push_quad(m, {-extent, -extent, 0}, {extent, -extent, 0}, {extent, extent, 0}, {-extent, extent, 0},
            label_index(m, "ground"));
  Rng rng(seed);
  for (int i = 0; i < boxes; ++i) {
    const Vec3 c(rng.uniform(-0.8 * extent, 0.8 * extent), rng.uniform(-0.8 * extent, 0.8 * extent), 0.0);
    const Vec3 h(rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0), rng.uniform(0.5, 4.0));
    append_box(m, Vec3(c.x() - h.x(), c.y() - h.y(), 0.0), Vec3(c.x() + h.x(), c.y() + h.y(), h.z()), "box");
  }
  return m;
}

TriangleMesh generate_scene(const std::string& name, std::uint64_t seed) {
  if (name == "harbour") return harbour_scene().mesh;
  if (name == "office") return office_scene();
  if (name == "carpark") return carpark_scene();
  if (name == "room") return room_scene();
  if (name == "clutter") return clutter_scene(40, seed);
  throw InvalidArgument("unknown scene generator '" + name + "' (expected harbour, office, carpark, room or clutter)");
}

}  // namespace camnet
