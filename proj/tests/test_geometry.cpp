#include "camnet/bvh.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace camnet;
using camnet::testing::TempDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

const char* kCubeObj = R"(# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
)";

}  // namespace

TEST(Mesh, UnitCubeObjHasTwelveTriangles) {
  TempDir dir("geom");
  write_text(dir / "cube.obj", kCubeObj);
  MeshLoadReport report;
  const auto mesh = load_mesh(dir / "cube.obj", MeshFormat::Obj, &report);
  EXPECT_EQ(mesh.triangle_count(), 12u);
  EXPECT_EQ(report.triangles, 12u);
  EXPECT_EQ(report.dropped_degenerate, 0u);
  EXPECT_EQ(report.bounds.min, Vec3(0, 0, 0));
  EXPECT_EQ(report.bounds.max, Vec3(1, 1, 1));
}

TEST(Mesh, ZeroAreaTriangleIsDropped) {
  TempDir dir("geom");
  std::string obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 2 0 0\n";
  for (int i = 0; i < 9; ++i) obj += "f 1 2 3\n";
  obj += "f 1 2 4\n";  // collinear
  write_text(dir / "d.obj", obj);
  MeshLoadReport report;
  const auto mesh = load_mesh(dir / "d.obj", MeshFormat::Obj, &report);
  EXPECT_EQ(mesh.triangle_count(), 9u);
  EXPECT_EQ(report.dropped_degenerate, 1u);
}

TEST(Mesh, AllDegenerateIsAnError) {
  TempDir dir("geom");
  write_text(dir / "d.obj", "v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n");
  EXPECT_THROW(load_mesh(dir / "d.obj", MeshFormat::Obj), Error);
}

TEST(Mesh, MalformedRecordReportsLine) {
  TempDir dir("geom");
  write_text(dir / "bad.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 7\n");
  try {
    load_mesh(dir / "bad.obj", MeshFormat::Obj);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos) << e.what();
  }
  write_text(dir / "bad2.obj", "v 0 zero 0\n");
  EXPECT_THROW(load_mesh(dir / "bad2.obj", MeshFormat::Obj), Error);
}

TEST(Mesh, MissingFileIsAnError) {
  EXPECT_THROW(load_mesh("/nonexistent/x.obj", MeshFormat::Obj), IoError);
}

TEST(Mesh, ObjPolygonsSlashesAndNegativeIndices) {
  TempDir dir("geom");
  write_text(dir / "q.obj", "o quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\nf -4/1/1 -3/1/1 -2/1/1 -1/1/1\n");
  const auto mesh = load_mesh(dir / "q.obj", MeshFormat::Obj);
  EXPECT_EQ(mesh.triangle_count(), 2u);
  ASSERT_EQ(mesh.labels.size(), 1u);
  EXPECT_EQ(mesh.labels[0], "quad");
}

class MeshRoundTrip : public ::testing::TestWithParam<MeshFormat> {};

TEST_P(MeshRoundTrip, PreservesGeometry) {
  TempDir dir("geom");
  const auto mesh = clutter_scene(5, 3);
  const char* ext[] = {"obj", "stl", "ply"};
  const auto path = dir / (std::string("m.") + ext[static_cast<int>(GetParam())]);
  save_mesh(mesh, path, GetParam());
  EXPECT_EQ(mesh_format_from_path(path), GetParam());
  const auto back = load_mesh(path, GetParam());
  ASSERT_EQ(back.triangle_count(), mesh.triangle_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
    for (int k = 0; k < 3; ++k) {
      const Vec3 a = mesh.vertices[static_cast<std::size_t>(mesh.triangles[t][k])];
      const Vec3 b = back.vertices[static_cast<std::size_t>(back.triangles[t][k])];
      EXPECT_LT((a - b).norm(), 1e-5);
    }
}

INSTANTIATE_TEST_SUITE_P(Formats, MeshRoundTrip, ::testing::Values(MeshFormat::Obj, MeshFormat::Stl, MeshFormat::Ply));

TEST(Mesh, AsciiStlAndPly) {
  TempDir dir("geom");
  write_text(dir / "a.stl",
             "solid t\nfacet normal 0 0 1\nouter loop\nvertex 0 0 0\nvertex 1 0 0\nvertex 0 1 0\nendloop\nendfacet\n"
             "endsolid t\n");
  EXPECT_EQ(load_mesh(dir / "a.stl", MeshFormat::Stl).triangle_count(), 1u);
  write_text(dir / "a.ply",
             "ply\nformat ascii 1.0\nelement vertex 4\nproperty float x\nproperty float y\nproperty float z\n"
             "element face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
  EXPECT_EQ(load_mesh(dir / "a.ply", MeshFormat::Ply).triangle_count(), 2u);
}

TEST(Mesh, FormatNames) {
  EXPECT_EQ(mesh_format_from_string("OBJ"), MeshFormat::Obj);
  EXPECT_EQ(mesh_format_from_string("ply"), MeshFormat::Ply);
  EXPECT_THROW(mesh_format_from_string("fbx"), InvalidArgument);
}

TEST(Intersect, CubeCenterRayHitsWallAtHalf) {
  TriangleMesh cube;
  append_box(cube, Vec3::Constant(-0.5), Vec3::Constant(0.5));
  const Bvh bvh(cube);
  const auto hit = bvh.intersect(Vec3::Zero(), Vec3::UnitX(), 10.0);
  ASSERT_TRUE(hit);
  EXPECT_NEAR(*hit, 0.5, 1e-12);
}

TEST(Intersect, RayAwayFromGeometryMisses) {
  TriangleMesh cube;
  append_box(cube, Vec3::Constant(-0.5), Vec3::Constant(0.5));
  const Bvh bvh(cube);
  EXPECT_FALSE(bvh.intersect(Vec3(2, 0, 0), Vec3::UnitX(), 100.0));
  EXPECT_FALSE(bvh.intersect(Vec3(2, 0, 0), -Vec3::UnitX(), 1.0));  // t_max short of the wall
}

TEST(Intersect, TriangleRespectsRange) {
  const Vec3 a(0, 0, 1), b(1, 0, 1), c(0, 1, 1);
  EXPECT_TRUE(intersect_triangle(Vec3(0.2, 0.2, 0), Vec3::UnitZ(), a, b, c, 1.0));
  EXPECT_FALSE(intersect_triangle(Vec3(0.2, 0.2, 0), Vec3::UnitZ(), a, b, c, 0.999));
  EXPECT_FALSE(intersect_triangle(Vec3(0.2, 0.2, 2), Vec3::UnitZ(), a, b, c, 5.0));
}

TEST(Intersect, WatertightAcrossSharedEdges) {
  // Fan of triangles around a common vertex; rays aimed exactly at the
  // shared edges and at the hub must hit something.
  TriangleMesh fan;
  const int n = 12;
  fan.vertices.push_back(Vec3::Zero());
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    fan.vertices.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  for (int i = 0; i < n; ++i) fan.triangles.emplace_back(0, 1 + i, 1 + (i + 1) % n);
  const Bvh bvh(fan);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    for (const double r : {0.0, 0.1, 0.37, 0.5, 0.9}) {
      const Vec3 target(r * std::cos(a), r * std::sin(a), 0.0);
      const Vec3 origin = target + Vec3(0.01, -0.02, 1.0);
      const Vec3 dir = (target - origin).normalized();
      EXPECT_TRUE(bvh.intersect(origin, dir, 10.0)) << "edge " << i << " r " << r;
    }
  }
}
