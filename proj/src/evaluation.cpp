#include "camnet/evaluation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace camnet {

namespace {

double weighted_quality(const VisCounts& counts, const EnvironmentPoints& points, const QualityFunction& q) {
  double total = 0.0;
  for (std::size_t e = 0; e < counts.size(); ++e) total += points.weights[static_cast<Eigen::Index>(e)] * q.t(counts[e]);
  return total;
}

double weighted_coverage(const VisCounts& counts, const EnvironmentPoints& points) {
  const double total = points.total_weight();
  if (!(total > 0.0)) return 0.0;
  double seen = 0.0;
  for (std::size_t e = 0; e < counts.size(); ++e)
    if (counts[e] > 0) seen += points.weights[static_cast<Eigen::Index>(e)];
  return seen / total;
}

}  // namespace

CrossEvalTable cross_evaluate(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                              const CandidateSet& candidates, const std::vector<QualityFunction>& functions,
                              const GreedyConfig& config) {
  if (functions.empty()) throw InvalidArgument("cross evaluation needs at least one quality function");
  if (matrix.n_points() != points.size()) throw InvalidArgument("matrix rows do not match the point set");
  const std::size_t n = functions.size();

  CrossEvalTable table;
  table.functions = functions;
  table.solutions.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const auto report = config.algorithm == OptimizerKind::LazyGreedy
                            ? lazy_greedy(matrix, points, candidates, config.k, functions[i], config.regularizer)
                            : greedy(matrix, points, candidates, config.k, functions[i], config.regularizer);
    table.solutions[i] = report.solution;
  });

  std::vector<VisCounts> counts(n);
  for (std::size_t j = 0; j < n; ++j) counts[j] = f_counts(matrix, table.solutions[j].ids);

  table.reference_values.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double ref = weighted_quality(counts[i], points, functions[i]);
    if (!(ref > 0.0))
      throw Error("quality function " + std::to_string(i) + " (" + to_string(functions[i].kind()) +
                  ") scores zero on its own solution; the instance is degenerate");
    table.reference_values[static_cast<Eigen::Index>(i)] = ref;
  }

  table.ratios.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  table.coverage.resize(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i)
      table.ratios(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          weighted_quality(counts[j], points, functions[i]) / table.reference_values[static_cast<Eigen::Index>(i)];
    table.coverage[static_cast<Eigen::Index>(j)] = weighted_coverage(counts[j], points);
  }
  table.mean_ratio = table.ratios.rowwise().mean();
  return table;
}

RatioRow evaluate_external_solution(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                                    const Solution& solution, const CrossEvalTable& table) {
  validate_subset(solution.ids, matrix.m_cameras());
  if (matrix.n_points() != points.size()) throw InvalidArgument("matrix rows do not match the point set");
  const VisCounts counts = f_counts(matrix, solution.ids);
  RatioRow row;
  row.ratios.resize(static_cast<Eigen::Index>(table.functions.size()));
  for (std::size_t i = 0; i < table.functions.size(); ++i) {
    const double ref = table.reference_values[static_cast<Eigen::Index>(i)];
    if (!(ref > 0.0)) throw Error("reference value of quality function " + std::to_string(i) + " is zero");
    row.ratios[static_cast<Eigen::Index>(i)] = weighted_quality(counts, points, table.functions[i]) / ref;
  }
  row.mean_ratio = row.ratios.size() > 0 ? row.ratios.mean() : 0.0;
  row.coverage = weighted_coverage(counts, points);
  return row;
}

RatioRow evaluate_external_viewpoints(const Scene& scene, const EnvironmentPoints& points,
                                      const std::vector<Viewpoint>& cameras, const CrossEvalTable& table,
                                      VisibilityMethod method, double bias) {
  CandidateSet set;
  set.provenance = Provenance::Explicit;
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    set.viewpoints.push_back(cameras[i]);
    set.viewpoints.back().id = static_cast<int>(i);
  }
  const VisibilityMatrix matrix = build_visibility_matrix(scene, set, points, method, bias);
  Solution all;
  for (std::size_t i = 0; i < cameras.size(); ++i) all.ids.push_back(static_cast<int>(i));
  all.k = static_cast<int>(cameras.size());
  return evaluate_external_solution(matrix, points, all, table);
}

void write_crosseval_csv(const CrossEvalTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.precision(17);
  out << "solution";
  for (Eigen::Index i = 0; i < table.ratios.cols(); ++i) out << ",f" << i;
  out << ",coverage,mean_ratio\n";
  for (Eigen::Index j = 0; j < table.ratios.rows(); ++j) {
    out << 'U' << j;
    for (Eigen::Index i = 0; i < table.ratios.cols(); ++i) out << ',' << table.ratios(j, i);
    out << ',' << table.coverage[j] << ',' << table.mean_ratio[j] << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Eigen::MatrixXd read_crosseval_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty CSV");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < 2) throw IoError(path.string() + ": short CSV row");
    row.resize(row.size() - 2);  // drop coverage and mean
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd ratios(static_cast<Eigen::Index>(rows.size()),
                         rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (static_cast<Eigen::Index>(rows[j].size()) != ratios.cols()) throw IoError(path.string() + ": ragged CSV");
    for (std::size_t i = 0; i < rows[j].size(); ++i)
      ratios(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rows[j][i];
  }
  return ratios;
}

MemoryBudgetExceeded::MemoryBudgetExceeded(std::size_t req, std::size_t bud)
    : Error("audit needs " + std::to_string(req) + " bytes, budget is " + std::to_string(bud)),
      required(req), budget(bud) {}

RoiBox audit_grid(const Aabbd& bounds, double resolution) {
  if (!(resolution > 0.0)) throw InvalidArgument("audit resolution must be positive");
  if (bounds.empty()) throw InvalidArgument("audit bounds are empty");
  RoiBox box;
  box.center = bounds.center();
  for (int k = 0; k < 3; ++k) {
    const double extent = bounds.extent()[k];
    box.resolution[k] = std::max(1, static_cast<int>(std::ceil(extent / resolution - 1e-9)));
    box.half_extents[k] = 0.5 * box.resolution[k] * resolution;
  }
  return box;
}

CoverageReport dense_coverage_audit(const Scene& scene, const std::vector<Viewpoint>& cameras,
                                    const AuditOptions& options) {
  CoverageReport report;
  const RoiBox grid = audit_grid(scene.mesh.bounds(), options.resolution);
  report.grid_resolution = grid.resolution;
  report.grid_bounds = grid.world_bounds();
  report.total_points = grid.voxel_count();

  const std::size_t nx = static_cast<std::size_t>(grid.resolution.x());
  const std::size_t ny = static_cast<std::size_t>(grid.resolution.y());
  const std::size_t nz = static_cast<std::size_t>(grid.resolution.z());
  const std::size_t layer = nx * ny;
  constexpr std::size_t kSlabTarget = std::size_t{1} << 20;
  const std::size_t layers_per_slab = std::max<std::size_t>(1, kSlabTarget / std::max<std::size_t>(layer, 1));
  const std::size_t slab_points = std::min(nz, layers_per_slab) * layer;

  std::size_t depth_bytes = 0;
  for (const auto& cam : cameras)
    depth_bytes += static_cast<std::size_t>(cam.spec.width) * static_cast<std::size_t>(cam.spec.height) * sizeof(float);
  // Slab positions, weights and counts, plus the worst-case uncovered export.
  const std::size_t slab_bytes = slab_points * (3 * sizeof(double) + sizeof(double) + sizeof(std::uint32_t));
  const std::size_t export_bytes = options.keep_uncovered ? report.total_points * 3 * sizeof(double) : 0;
  report.required_bytes = depth_bytes + slab_bytes + export_bytes;
  if (report.required_bytes > options.memory_budget_bytes)
    throw MemoryBudgetExceeded(report.required_bytes, options.memory_budget_bytes);

  std::vector<DepthBuffer> depths(cameras.size());
  std::vector<double> biases(cameras.size());
  parallel_for(cameras.size(), [&](std::size_t c) {
    depths[c] = render_depth(scene.mesh, cameras[c]);
    biases[c] = options.bias >= 0.0 ? options.bias : default_depth_bias(scene.mesh.bounds(), cameras[c].spec);
  });

  report.histogram.assign(cameras.size() + 1, 0);
  std::vector<Vec3> uncovered;
  for (std::size_t z0 = 0; z0 < nz; z0 += layers_per_slab) {
    const std::size_t z1 = std::min(nz, z0 + layers_per_slab);
    EnvironmentPoints slab(Eigen::Matrix3Xd(3, static_cast<Eigen::Index>((z1 - z0) * layer)));
    Eigen::Index i = 0;
    for (std::size_t z = z0; z < z1; ++z)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x = 0; x < nx; ++x, ++i)
          slab.positions.col(i) = grid.voxel_center(static_cast<int>(x), static_cast<int>(y), static_cast<int>(z));
    VisCounts counts(slab.size(), 0);
    for (std::size_t c = 0; c < cameras.size(); ++c)
      visible_points_zbuffer(depths[c], cameras[c], slab, biases[c]).for_each_set([&](std::size_t e) { ++counts[e]; });
    for (std::size_t e = 0; e < counts.size(); ++e) {
      ++report.histogram[counts[e]];
      if (counts[e] > 0) {
        ++report.covered_points;
      } else if (options.keep_uncovered) {
        uncovered.push_back(slab.point(e));
      }
    }
  }
  report.fraction = report.total_points > 0
                        ? static_cast<double>(report.covered_points) / static_cast<double>(report.total_points)
                        : 0.0;
  Eigen::Matrix3Xd u(3, static_cast<Eigen::Index>(uncovered.size()));
  for (std::size_t k = 0; k < uncovered.size(); ++k) u.col(static_cast<Eigen::Index>(k)) = uncovered[k];
  report.uncovered = EnvironmentPoints(std::move(u));
  return report;
}

double linear_fit_r2(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("linear fit needs two or more paired samples");
  const Eigen::Map<const Eigen::VectorXd> xs(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::Map<const Eigen::VectorXd> ys(y.data(), static_cast<Eigen::Index>(y.size()));
  const Eigen::VectorXd dx = xs.array() - xs.mean();
  const Eigen::VectorXd dy = ys.array() - ys.mean();
  const double sxx = dx.squaredNorm();
  const double syy = dy.squaredNorm();
  if (sxx == 0.0) throw InvalidArgument("linear fit needs distinct x values");
  if (syy == 0.0) return 1.0;
  const double sxy = dx.dot(dy);
  return sxy * sxy / (sxx * syy);
}

}  // namespace camnet
