#pragma once

#include "camnet/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace camnet {

// Every command writes its outputs into `out` (created if missing) and
// stamps them with the config hash.

struct OptimizeResult {
  OptimizerReport report;
  CandidateSet candidates;
  double coverage = 0.0;
};

OptimizeResult cmd_optimize(const ScenarioConfig& config, const std::filesystem::path& out);

/// n redundancy functions with `levels` weights each. Function i uses the
/// i-th draw of a generator seeded with `seed`.
std::vector<QualityFunction> sample_functions(int n, int levels, std::uint64_t seed);

struct CrossEvalResult {
  CrossEvalTable table;
  std::optional<RatioRow> external;
};

/// `external` optionally names a solution or session-export file to score
/// against the table.
CrossEvalResult cmd_crosseval(const ScenarioConfig& config, int n_functions, std::uint64_t seed,
                              const std::filesystem::path& out,
                              const std::optional<std::filesystem::path>& external = std::nullopt);

CoverageReport cmd_audit(const ScenarioConfig& config, const std::filesystem::path& solution_file,
                         double resolution, const std::filesystem::path& out);

struct BenchRow {
  std::size_t n_points = 0;
  int m_cameras = 0;
  double mean_latency_ms = 0.0;  // single-camera move
  double full_recompute_ms = 0.0;
};

std::vector<BenchRow> cmd_bench(const ScenarioConfig& config, const std::vector<std::size_t>& point_counts,
                                const std::vector<int>& camera_counts, const std::filesystem::path& out,
                                std::ostream* progress = nullptr);

/// Blocks until SIGINT/SIGTERM, then writes session_export.json.
void cmd_serve(const ScenarioConfig& config, const std::filesystem::path& out, std::ostream& log);

void cmd_sample_functions(int n, int levels, std::uint64_t seed, const std::filesystem::path& out);

void cmd_gen_scene(const std::string& name, std::uint64_t seed, const std::filesystem::path& file);

/// Cameras of a solution file or a session export ({"cameras": [...]}).
std::vector<Viewpoint> read_solution_cameras(const std::filesystem::path& path);

/// Bench camera rig: m cameras on a ring inside the scene bounds, looking
/// at the center.
std::vector<LiveCamera> ring_cameras(const Aabbd& bounds, int m, const CameraSpec& spec);

Session make_session(const ScenarioConfig& config, std::shared_ptr<const Scene> scene, EnvironmentPoints points);

void write_json(const Json& j, const std::filesystem::path& path);

}  // namespace camnet
