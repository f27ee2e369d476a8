#pragma once

#include "camnet/optimize.hpp"

#include <filesystem>
#include <vector>

namespace camnet {

enum class OptimizerKind { Greedy, LazyGreedy };

struct GreedyConfig {
  int k = 10;
  OptimizerKind algorithm = OptimizerKind::LazyGreedy;
  Regularizer regularizer;
};

/// Cross-evaluation of per-function optimal solutions. Rows are solutions,
/// columns are quality functions:
///   ratios(j, i) = G_i(U_j) / G_i(U_i)
/// so the diagonal is exactly one and row j scores solution U_j under every
/// function.
struct CrossEvalTable {
  std::vector<QualityFunction> functions;
  std::vector<Solution> solutions;
  Eigen::MatrixXd ratios;
  // G_i(U_i) for each function.
  Eigen::VectorXd reference_values;
  Eigen::VectorXd coverage;
  // Arithmetic mean of each row.
  Eigen::VectorXd mean_ratio;
};

CrossEvalTable cross_evaluate(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                              const CandidateSet& candidates, const std::vector<QualityFunction>& functions,
                              const GreedyConfig& config);

struct RatioRow {
  Eigen::VectorXd ratios;
  double mean_ratio = 0.0;
  double coverage = 0.0;
};

/// Scores an arbitrary solution against the table's reference values.
RatioRow evaluate_external_solution(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                                    const Solution& solution, const CrossEvalTable& table);

/// Same, for free-pose cameras that are not part of the candidate set.
RatioRow evaluate_external_viewpoints(const Scene& scene, const EnvironmentPoints& points,
                                      const std::vector<Viewpoint>& cameras, const CrossEvalTable& table,
                                      VisibilityMethod method, double bias);

void write_crosseval_csv(const CrossEvalTable& table, const std::filesystem::path& path);
Eigen::MatrixXd read_crosseval_csv(const std::filesystem::path& path);

struct AuditOptions {
  double resolution = 0.1;
  std::size_t memory_budget_bytes = std::size_t{2} << 30;
  double bias = -1.0;  // negative: default_depth_bias
  bool keep_uncovered = true;
};

struct CoverageReport {
  std::size_t total_points = 0;
  std::size_t covered_points = 0;
  double fraction = 0.0;
  // histogram[c] = number of points seen by exactly c cameras.
  std::vector<std::size_t> histogram;
  Eigen::Vector3i grid_resolution = Eigen::Vector3i::Zero();
  Aabbd grid_bounds;
  std::size_t required_bytes = 0;
  EnvironmentPoints uncovered;
};

class MemoryBudgetExceeded : public Error {
public:
  MemoryBudgetExceeded(std::size_t required, std::size_t budget);
  std::size_t required;
  std::size_t budget;
};

/// Regular grid over the scene bounds at `resolution`, evaluated in z slabs
/// with one depth render per camera.
CoverageReport dense_coverage_audit(const Scene& scene, const std::vector<Viewpoint>& cameras,
                                    const AuditOptions& options);

/// The audit grid as a voxel box over the scene bounds.
RoiBox audit_grid(const Aabbd& bounds, double resolution);

/// Coefficient of determination of the least-squares line through (x, y).
double linear_fit_r2(std::span<const double> x, std::span<const double> y);

}  // namespace camnet
