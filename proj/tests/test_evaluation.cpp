#include "camnet/evaluation.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

using namespace camnet;
namespace ct = camnet::testing;

namespace {

struct Fixture {
  VisibilityMatrix matrix;
  EnvironmentPoints points;
  CandidateSet candidates;
};

Fixture random_fixture(std::uint64_t seed, std::size_t n = 500, std::size_t m = 40) {
  std::mt19937_64 gen(seed);
  return {ct::random_matrix(n, m, 0.08, gen), ct::random_weighted_points(n, gen), ct::dummy_candidates(m)};
}

std::vector<QualityFunction> some_functions(int n) {
  std::vector<QualityFunction> fs;
  for (int i = 0; i < n; ++i) fs.push_back(QualityFunction::redundancy(sample_quality_weights(100 + i, 4), 100 + i));
  return fs;
}

std::vector<Viewpoint> room_cameras(const CameraSpec& spec) {
  std::vector<Viewpoint> cams;
  const Vec3 corners[] = {{0.5, 0.5, 2.5}, {9.5, 7.5, 2.5}, {9.5, 0.5, 2.5}};
  for (std::size_t i = 0; i < 3; ++i) cams.push_back({spec, Pose::look_at(corners[i], Vec3(5, 4, 0.5)), int(i)});
  return cams;
}

}  // namespace

TEST(CrossEval, DiagonalIsOneAndRowsAreSolutions) {
  const auto fx = random_fixture(1);
  const auto fs = some_functions(6);
  const auto table = cross_evaluate(fx.matrix, fx.points, fx.candidates, fs, {.k = 5});
  ASSERT_EQ(table.ratios.rows(), 6);
  ASSERT_EQ(table.ratios.cols(), 6);
  for (int j = 0; j < 6; ++j) {
    EXPECT_EQ(table.ratios(j, j), 1.0);
    EXPECT_NEAR(table.mean_ratio[j], table.ratios.row(j).mean(), 1e-15);
    for (int i = 0; i < 6; ++i) {
      const double expect = ct::oracle_G(fx.matrix, fx.points, table.solutions[j].ids, fs[i]) /
                            ct::oracle_G(fx.matrix, fx.points, table.solutions[i].ids, fs[i]);
      EXPECT_NEAR(table.ratios(j, i), expect, 1e-12);
      EXPECT_GT(table.ratios(j, i), 0.0);
    }
    EXPECT_DOUBLE_EQ(table.coverage[j], coverage(fx.matrix, fx.points, table.solutions[j].ids));
  }
}

TEST(CrossEval, PlainAndLazyAgree) {
  const auto fx = random_fixture(2);
  const auto fs = some_functions(4);
  const auto a = cross_evaluate(fx.matrix, fx.points, fx.candidates, fs, {.k = 6, .algorithm = OptimizerKind::Greedy});
  const auto b = cross_evaluate(fx.matrix, fx.points, fx.candidates, fs, {.k = 6});
  EXPECT_EQ(a.ratios, b.ratios);
  for (std::size_t i = 0; i < fs.size(); ++i) EXPECT_EQ(a.solutions[i].ids, b.solutions[i].ids);
}

TEST(CrossEval, InvariantUnderWeightScaling) {
  const auto fx = random_fixture(3);
  const auto fs = some_functions(4);
  const auto a = cross_evaluate(fx.matrix, fx.points, fx.candidates, fs, {.k = 5});
  // Powers of two keep every product exact.
  const EnvironmentPoints scaled(fx.points.positions, fx.points.weights * 8.0);
  const auto b = cross_evaluate(fx.matrix, scaled, fx.candidates, fs, {.k = 5});
  EXPECT_EQ(a.ratios, b.ratios);
}

TEST(CrossEval, SingleFunction) {
  const auto fx = random_fixture(4);
  const auto t = cross_evaluate(fx.matrix, fx.points, fx.candidates, some_functions(1), {.k = 3});
  ASSERT_EQ(t.ratios.size(), 1);
  EXPECT_EQ(t.ratios(0, 0), 1.0);
  EXPECT_EQ(t.mean_ratio[0], 1.0);
}

TEST(CrossEval, ZeroReferenceRaises) {
  VisibilityMatrix m(10, 5);  // nothing visible
  EXPECT_THROW(cross_evaluate(m, ct::unit_points(10), ct::dummy_candidates(5), some_functions(2), {.k = 2}), Error);
}

TEST(CrossEval, ExternalSolution) {
  const auto fx = random_fixture(5);
  const auto fs = some_functions(5);
  const auto table = cross_evaluate(fx.matrix, fx.points, fx.candidates, fs, {.k = 4});
  const auto row = evaluate_external_solution(fx.matrix, fx.points, table.solutions[2], table);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(row.ratios[i], table.ratios(2, i));
  EXPECT_DOUBLE_EQ(row.mean_ratio, table.mean_ratio[2]);

  const auto empty = evaluate_external_solution(fx.matrix, fx.points, Solution{}, table);
  EXPECT_EQ(empty.mean_ratio, 0.0);
  EXPECT_EQ(empty.coverage, 0.0);
}

TEST(CrossEval, CsvRoundTrip) {
  const auto fx = random_fixture(6);
  const auto table = cross_evaluate(fx.matrix, fx.points, fx.candidates, some_functions(5), {.k = 4});
  ct::TempDir dir("csv");
  write_crosseval_csv(table, dir / "t.csv");
  EXPECT_EQ(read_crosseval_csv(dir / "t.csv"), table.ratios);
  std::ifstream in(dir / "t.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "solution,f0,f1,f2,f3,f4,coverage,mean_ratio");
}

TEST(Audit, GridCoversBounds) {
  const Aabbd b(Vec3(0, 0, 0), Vec3(10, 8, 3));
  const RoiBox g = audit_grid(b, 0.4);
  EXPECT_EQ(g.resolution, Eigen::Vector3i(25, 20, 8));
  EXPECT_TRUE(g.world_bounds().contains(b));
  EXPECT_EQ(audit_grid(b, 0.5).resolution, Eigen::Vector3i(20, 16, 6));
  EXPECT_THROW(audit_grid(b, 0.0), InvalidArgument);
}

TEST(Audit, MatchesPerCameraRecount) {
  const Scene scene(room_scene());
  const CameraSpec spec{.perspective_angle = 90, .width = 320, .height = 200, .min_range = 0.1, .max_range = 30};
  const auto cams = room_cameras(spec);
  AuditOptions opt;
  opt.resolution = 0.25;
  const auto report = dense_coverage_audit(scene, cams, opt);

  // Recount: full point set, one camera at a time.
  const auto grid = voxelize_box(audit_grid(scene.mesh.bounds(), 0.25));
  std::vector<std::uint32_t> counts(grid.size(), 0);
  for (const auto& c : cams) {
    const double bias = default_depth_bias(scene.mesh.bounds(), c.spec);
    visible_points_zbuffer(render_depth(scene.mesh, c), c, grid, bias).for_each_set([&](std::size_t e) { ++counts[e]; });
  }
  std::vector<std::size_t> hist(cams.size() + 1, 0);
  std::size_t covered = 0;
  for (const auto c : counts) {
    ++hist[c];
    covered += c > 0;
  }
  EXPECT_EQ(report.total_points, grid.size());
  EXPECT_EQ(report.covered_points, covered);
  EXPECT_EQ(report.histogram, hist);
  EXPECT_EQ(report.uncovered.size(), grid.size() - covered);
  EXPECT_DOUBLE_EQ(report.fraction, double(covered) / double(grid.size()));
}

TEST(Audit, ResolutionConverges) {
  const Scene scene(room_scene());
  const CameraSpec spec{.perspective_angle = 90, .width = 320, .height = 200, .min_range = 0.1, .max_range = 30};
  const auto cams = room_cameras(spec);
  AuditOptions coarse, fine;
  coarse.resolution = 0.4;
  fine.resolution = 0.2;
  const double a = dense_coverage_audit(scene, cams, coarse).fraction;
  const double b = dense_coverage_audit(scene, cams, fine).fraction;
  EXPECT_NEAR(a, b, 0.02);
}

TEST(Audit, BudgetIsEnforced) {
  const Scene scene(room_scene());
  const auto cams = room_cameras(CameraSpec{});
  AuditOptions opt;
  opt.resolution = 0.1;
  opt.memory_budget_bytes = 1000;
  try {
    dense_coverage_audit(scene, cams, opt);
    FAIL() << "expected MemoryBudgetExceeded";
  } catch (const MemoryBudgetExceeded& e) {
    EXPECT_GT(e.required, e.budget);
    EXPECT_EQ(e.budget, 1000u);
  }
}

TEST(LinearFit, PerfectAndNoisy) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {3, 5, 7, 9, 11};
  EXPECT_NEAR(linear_fit_r2(x, y), 1.0, 1e-12);
  const std::vector<double> z = {1, 3, 2, 5, 4};
  EXPECT_NEAR(linear_fit_r2(x, z), 0.64, 1e-12);
}
