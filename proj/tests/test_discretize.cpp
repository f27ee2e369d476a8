#include "camnet/discretize.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace camnet;
using camnet::testing::TempDir;

TEST(Voxelize, UnitBoxTenCubed) {
  RoiBox box;
  box.resolution = Eigen::Vector3i(10, 10, 10);
  const auto pts = voxelize_box(box);
  ASSERT_EQ(pts.size(), 1000u);
  EXPECT_NEAR((pts.point(1) - pts.point(0)).norm(), 0.1, 1e-15);   // x neighbour
  EXPECT_NEAR((pts.point(10) - pts.point(0)).norm(), 0.1, 1e-15);  // y neighbour
  EXPECT_NEAR((pts.point(100) - pts.point(0)).norm(), 0.1, 1e-15); // z neighbour
  EXPECT_LT((pts.point(0) - Vec3(-0.45, -0.45, -0.45)).norm(), 1e-15);
  ASSERT_TRUE(pts.grid);
  EXPECT_EQ(pts.grid->voxel_index[999], 999u);
  EXPECT_TRUE((pts.weights.array() == 1.0).all());
}

TEST(Voxelize, SingleVoxelAtCenter) {
  RoiBox box;
  box.center = Vec3(1, 2, 3);
  box.half_extents = Vec3(4, 5, 6);
  const auto pts = voxelize_box(box);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts.point(0), Vec3(1, 2, 3));
}

TEST(Voxelize, OrientedBoxRotatesCenters) {
  RoiBox box;
  box.orientation = Quat(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()));
  box.half_extents = Vec3(1, 0.5, 0.5);
  box.resolution = Eigen::Vector3i(2, 1, 1);
  const auto pts = voxelize_box(box);
  EXPECT_LT((pts.point(0) - Vec3(0, -0.5, 0)).norm(), 1e-12);
  EXPECT_LT((pts.point(1) - Vec3(0, 0.5, 0)).norm(), 1e-12);
}

TEST(Voxelize, InvalidBoxRejected) {
  RoiBox box;
  box.resolution = Eigen::Vector3i(0, 1, 1);
  EXPECT_THROW(voxelize_box(box), InvalidArgument);
  box.resolution = Eigen::Vector3i::Ones();
  box.half_extents = Vec3(1, 0, 1);
  EXPECT_THROW(voxelize_box(box), InvalidArgument);
}

TEST(Voxelize, ResolutionForHarbourBoxHitsTarget) {
  const auto r = resolution_for_count(Vec3(40, 20, 1.5), 30000);
  const long long n = static_cast<long long>(r.x()) * r.y() * r.z();
  EXPECT_LE(std::llabs(n - 30000), 300) << r.transpose();
  const Vec3 step = Vec3(80, 40, 3).cwiseQuotient(r.cast<double>());
  EXPECT_LT(step.maxCoeff() / step.minCoeff(), 1.5);
}

TEST(Segments, HarbourCountAndOrder) {
  const std::vector<Segment> segs = {{Vec3(0, 0, 10), Vec3(10, 0, 10)}, {Vec3(0, 5, 10), Vec3(10, 5, 10)}};
  std::vector<Quat> ors;
  for (int i = 0; i < 15; ++i) ors.push_back(Quat(Eigen::AngleAxisd(0.1 * i, Vec3::UnitZ())));
  const auto set = sample_segment_viewpoints(segs, 20, ors, CameraSpec{});
  ASSERT_EQ(set.size(), 600u);
  EXPECT_EQ(set.provenance, Provenance::SegmentGrid);
  for (std::size_t i = 0; i < set.size(); ++i) EXPECT_EQ(set[i].id, static_cast<int>(i));
  // id = (segment * 20 + position) * 15 + orientation
  const auto& v = set[(1 * 20 + 19) * 15 + 7];
  EXPECT_LT((v.pose.position() - Vec3(10, 5, 10)).norm(), 1e-12);
  EXPECT_TRUE(v.pose.orientation().isApprox(ors[7]));
}

TEST(Segments, TwoPositionsAreEndpoints) {
  const auto set = sample_segment_viewpoints({{Vec3(1, 2, 3), Vec3(4, 5, 6)}}, 2, {Quat::Identity()}, CameraSpec{});
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set[0].pose.position(), Vec3(1, 2, 3));
  EXPECT_EQ(set[1].pose.position(), Vec3(4, 5, 6));
}

TEST(Segments, LexicographicIds) {
  std::vector<Quat> ors(3, Quat::Identity());
  const auto set = sample_segment_viewpoints({{Vec3(0, 0, 0), Vec3(4, 0, 0)}}, 5, ors, CameraSpec{});
  ASSERT_EQ(set.size(), 15u);
  for (int p = 0; p < 5; ++p)
    for (int o = 0; o < 3; ++o) EXPECT_NEAR(set[static_cast<std::size_t>(p * 3 + o)].pose.position().x(), p, 1e-12);
  EXPECT_THROW(sample_segment_viewpoints({{Vec3::Zero(), Vec3::Ones()}}, 1, ors, CameraSpec{}), InvalidArgument);
}

TEST(Area, ReproducibleForSeed) {
  const std::vector<Vec2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto a = sample_area_viewpoints(square, 3.0, 4, CameraSpec{}, 42);
  const auto b = sample_area_viewpoints(square, 3.0, 4, CameraSpec{}, 42);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a[i].pose.position(), b[i].pose.position());
    EXPECT_EQ(a[i].pose.orientation().coeffs(), b[i].pose.orientation().coeffs());
    EXPECT_EQ(a[i].pose.position().z(), 3.0);
  }
}

TEST(Area, UniformOverSquareAndNeverUpward) {
  const std::vector<Vec2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto set = sample_area_viewpoints(square, 2.0, 100000, CameraSpec{}, 7);
  std::size_t left = 0;
  double mean_z = 0.0;
  for (const auto& v : set.viewpoints) {
    left += v.pose.position().x() < 0.5;
    EXPECT_LE(v.pose.forward().z(), 1e-12);
    mean_z += v.pose.forward().z();
  }
  EXPECT_NEAR(static_cast<double>(left) / 100000.0, 0.5, 0.01);
  // Uniform on the lower hemisphere: E[z] = -1/2.
  EXPECT_NEAR(mean_z / 100000.0, -0.5, 0.01);
}

TEST(Area, RespectsConcavePolygon) {
  const std::vector<Vec2> ell = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  const auto set = sample_area_viewpoints(ell, 1.0, 2000, CameraSpec{}, 3);
  for (const auto& v : set.viewpoints) {
    const Vec3 p = v.pose.position();
    EXPECT_FALSE(p.x() > 1.0 && p.y() > 1.0);
  }
  EXPECT_THROW(sample_area_viewpoints({{0, 0}, {1, 1}, {2, 2}}, 1.0, 5, CameraSpec{}, 1), InvalidArgument);
}

TEST(Uniform, CountInsideAndDeterministic) {
  const Aabbd region(Vec3(0, 0, 0), Vec3(2, 3, 4));
  const auto a = sample_points_uniform(region, 16000, 9);
  const auto b = sample_points_uniform(region, 16000, 9);
  ASSERT_EQ(a.size(), 16000u);
  EXPECT_EQ(a.positions, b.positions);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(region.contains(a.point(i)));
  const auto one = sample_points_uniform(region, 1, 1);
  EXPECT_EQ(one.size(), 1u);
  EXPECT_NE(sample_points_uniform(region, 10, 1).positions, sample_points_uniform(region, 10, 2).positions);
}

TEST(Merge, ConcatenatesAndTracksGrid) {
  RoiBox box;
  box.resolution = Eigen::Vector3i(3, 3, 3);
  const auto grid = voxelize_box(box);
  const auto extra = sample_points_uniform(Aabbd(Vec3::Zero(), Vec3::Ones()), 5, 1);
  const auto both = merge_point_sets({grid, extra});
  EXPECT_EQ(both.size(), 32u);
  EXPECT_FALSE(both.grid);
  const auto twice = merge_point_sets({grid, grid});
  EXPECT_EQ(twice.size(), 54u);
  EXPECT_TRUE(twice.grid);
  EXPECT_EQ(merge_point_sets({}).size(), 0u);
}

TEST(PointFile, RoundTripWithWeights) {
  TempDir dir("pts");
  auto pts = sample_points_uniform(Aabbd(Vec3::Zero(), Vec3::Ones()), 100, 3);
  pts.weights.setLinSpaced(100, 0.5, 2.0);
  write_points(pts, dir / "p.cnpt");
  const auto back = read_points(dir / "p.cnpt");
  ASSERT_EQ(back.size(), 100u);
  EXPECT_TRUE(back.positions.isApprox(pts.positions.cast<float>().cast<double>()));
  EXPECT_TRUE(back.weights.isApprox(pts.weights.cast<float>().cast<double>()));
}

TEST(PointFile, RejectsGarbage) {
  TempDir dir("pts");
  std::ofstream(dir / "bad.cnpt") << "XXXX";
  EXPECT_THROW(read_points(dir / "bad.cnpt"), IoError);
}

TEST(Polygon, ContainsAndArea) {
  const std::vector<Vec2> square = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  EXPECT_TRUE(polygon_contains(square, Vec2(1, 1)));
  EXPECT_FALSE(polygon_contains(square, Vec2(3, 1)));
  EXPECT_DOUBLE_EQ(std::abs(polygon_area(square)), 4.0);
}
