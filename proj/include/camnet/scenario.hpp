#pragma once

#include "camnet/evaluation.hpp"
#include "camnet/session.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace camnet {

using Json = nlohmann::json;

/// Config problem at a specific field, e.g. "optimizer.k: must be >= 1".
class ConfigError : public InvalidArgument {
public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

struct PointDirective {
  enum class Type { VoxelBox, Uniform, File } type = Type::VoxelBox;
  RoiBox box;            // VoxelBox
  Aabbd region;          // Uniform
  std::size_t count = 0; // Uniform
  std::uint64_t seed = 0;
  std::filesystem::path file;
  double weight = 1.0;
};

struct CandidateDirective {
  enum class Type { None, Segments, Area, Explicit } type = Type::None;
  std::vector<Segment> segments;
  int positions_per_segment = 2;
  std::vector<Quat> orientations;
  std::vector<Vec2> polygon;
  double height = 0.0;
  int count = 0;
  std::uint64_t seed = 0;
  std::vector<Pose> poses;
};

struct ScenarioConfig {
  Json raw;  // after overrides; the hash covers exactly this document
  std::string hash;
  std::filesystem::path base_dir;

  std::filesystem::path scene_file;
  MeshFormat scene_format = MeshFormat::Obj;
  std::string scene_generator;
  std::uint64_t scene_seed = 1;

  std::uint64_t seed = 0;
  CameraSpec camera;
  std::vector<PointDirective> points;
  CandidateDirective candidates;
  QualityFunction quality = QualityFunction::scp();
  Regularizer regularizer;

  OptimizerKind algorithm = OptimizerKind::LazyGreedy;
  int k = 10;
  long long brute_force_budget = kDefaultBruteForceBudget;

  int crosseval_functions = 60;
  int crosseval_levels = 5;
  std::uint64_t crosseval_seed = 0;

  VisibilityMethod method = VisibilityMethod::ZBuffer;
  double bias = -1.0;

  std::vector<LiveCamera> session_cameras;
  int port = 8765;
  std::size_t latency_window = 4096;

  double audit_resolution = 0.1;
  std::size_t memory_budget_bytes = std::size_t{2} << 30;

  std::vector<std::size_t> bench_points;
  std::vector<int> bench_cameras;
  int bench_repeats = 5;
};

/// Scalar overrides from the command line. Applied to the document before
/// parsing so the config hash reflects them.
struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> resolution;
  std::optional<int> port;
  std::optional<std::string> method;
  std::optional<int> k;
};

ScenarioConfig parse_scenario(Json document, const std::filesystem::path& base_dir,
                              const ScenarioOverrides& overrides = {});
ScenarioConfig load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides = {});

/// Lowercase hex SHA-256 of the compact JSON dump.
std::string config_hash(const Json& document);
std::string sha256_hex(const std::string& data);

// Builders from a parsed config.
std::shared_ptr<const Scene> build_scene(const ScenarioConfig& config);
EnvironmentPoints build_points(const ScenarioConfig& config, const Scene& scene);
CandidateSet build_candidates(const ScenarioConfig& config);

// Shared JSON encodings, also used by the socket protocol.
Json to_json(const CameraSpec& spec);
Json to_json(const Pose& pose);
Json to_json(const LiveCamera& camera);
Json to_json(const QualityFunction& q);
CameraSpec camera_spec_from_json(const Json& j, const std::string& path, const CameraSpec& defaults = {});
Pose pose_from_json(const Json& j, const std::string& path);
QualityFunction quality_from_json(const Json& j, const std::string& path);

}  // namespace camnet
