#include "camnet/bvh.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace camnet;

namespace {

// Nearest hit by testing every triangle.
std::optional<double> brute_nearest(const TriangleMesh& mesh, const Vec3& o, const Vec3& d, double t_max) {
  std::optional<double> best;
  for (const auto& t : mesh.triangles) {
    const auto hit = intersect_triangle(o, d, mesh.vertices[static_cast<std::size_t>(t[0])],
                                        mesh.vertices[static_cast<std::size_t>(t[1])],
                                        mesh.vertices[static_cast<std::size_t>(t[2])], t_max);
    if (hit && (!best || *hit < *best)) best = hit;
  }
  return best;
}

Vec3 random_unit(std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  Vec3 v(n(gen), n(gen), n(gen));
  return v.normalized();
}

}  // namespace

TEST(Bvh, SingleTriangleIsOneLeaf) {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.triangles = {{0, 1, 2}};
  const Bvh bvh(m);
  ASSERT_EQ(bvh.nodes().size(), 1u);
  EXPECT_TRUE(bvh.nodes()[0].is_leaf());
  EXPECT_EQ(bvh.nodes()[0].count, 1u);
}

TEST(Bvh, CubeRootBoxEqualsBounds) {
  TriangleMesh cube;
  append_box(cube, Vec3(-1, -2, -3), Vec3(1, 2, 3));
  const Bvh bvh(cube);
  EXPECT_EQ(bvh.bounds().min, Vec3(-1, -2, -3));
  EXPECT_EQ(bvh.bounds().max, Vec3(1, 2, 3));
}

TEST(Bvh, StructuralInvariants) {
  const auto mesh = clutter_scene(60, 9);
  const Bvh bvh(mesh);
  std::vector<int> seen(mesh.triangle_count(), 0);
  const auto& nodes = bvh.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.is_leaf()) {
      EXPECT_LE(n.count, static_cast<std::uint32_t>(Bvh::kDefaultLeafSize));
      for (std::uint32_t k = n.first; k < n.first + n.count; ++k) {
        const auto t = bvh.triangle_order()[k];
        ++seen[t];
        for (int c = 0; c < 3; ++c)
          EXPECT_TRUE(n.box.contains(mesh.vertices[static_cast<std::size_t>(mesh.triangles[t][c])]));
      }
    } else {
      EXPECT_TRUE(n.box.contains(nodes[n.first].box));
      EXPECT_TRUE(n.box.contains(nodes[n.first + 1].box));
    }
  }
  for (const int s : seen) EXPECT_EQ(s, 1);
}

TEST(Bvh, DeterministicBuild) {
  const auto mesh = clutter_scene(30, 4);
  const Bvh a(mesh), b(mesh);
  EXPECT_EQ(a.triangle_order(), b.triangle_order());
  ASSERT_EQ(a.nodes().size(), b.nodes().size());
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    EXPECT_EQ(a.nodes()[i].first, b.nodes()[i].first);
    EXPECT_EQ(a.nodes()[i].count, b.nodes()[i].count);
  }
}

TEST(Bvh, RandomRaysMatchBruteForce) {
  const auto mesh = clutter_scene(40, 17);
  const Bvh bvh(mesh);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-15.0, 15.0), h(0.1, 6.0);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 o(u(gen), u(gen), h(gen));
    const Vec3 d = random_unit(gen);
    const auto expect = brute_nearest(mesh, o, d, 100.0);
    const auto got = bvh.intersect(o, d, 100.0);
    ASSERT_EQ(expect.has_value(), got.has_value()) << "ray " << i;
    if (expect) {
      ++hits;
      EXPECT_NEAR(*expect, *got, 1e-6);
    }
    EXPECT_EQ(bvh.occluded(o, d, 100.0), expect.has_value());
  }
  EXPECT_GT(hits, 300);
}

TEST(Bvh, ResultIndependentOfLeafSize) {
  const auto mesh = clutter_scene(25, 2);
  const Bvh a(mesh, 1), b(mesh, 4), c(mesh, 16);
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-15.0, 15.0);
  for (int i = 0; i < 300; ++i) {
    const Vec3 o(u(gen), u(gen), 3.0);
    const Vec3 d = random_unit(gen);
    const auto ha = a.intersect(o, d, 50.0), hb = b.intersect(o, d, 50.0), hc = c.intersect(o, d, 50.0);
    EXPECT_EQ(ha, hb);
    EXPECT_EQ(hb, hc);
  }
}

TEST(Bvh, LargeMeshBuilds) {
  const auto mesh = carpark_scene(330);  // ~218k triangles
  ASSERT_GT(mesh.triangle_count(), 200000u);
  const Bvh bvh(mesh);
  EXPECT_EQ(bvh.triangle_count(), mesh.triangle_count());
  EXPECT_TRUE(bvh.intersect(Vec3(30, 30, 20), -Vec3::UnitZ(), 100.0));
}
