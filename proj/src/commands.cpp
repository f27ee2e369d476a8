#include "camnet/commands.hpp"

#include "camnet/scenes.hpp"
#include "camnet/server.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

namespace camnet {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void ensure_dir(const std::filesystem::path& out) {
  if (out.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory '" + out.string() + "': " + ec.message());
}

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json eigen_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

double bias_for(const ScenarioConfig& c) { return c.bias; }

Json ratio_row_json(const RatioRow& row) {
  return {{"ratios", eigen_json(row.ratios)}, {"mean_ratio", row.mean_ratio}, {"coverage", row.coverage}};
}

}  // namespace

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Session make_session(const ScenarioConfig& config, std::shared_ptr<const Scene> scene, EnvironmentPoints points) {
  Session::Options opt;
  opt.method = config.method;
  opt.bias = bias_for(config);
  opt.latency_window = config.latency_window;
  return Session(std::move(scene), std::move(points), config.session_cameras, opt);
}

OptimizeResult cmd_optimize(const ScenarioConfig& config, const std::filesystem::path& out) {
  ensure_dir(out);
  const auto scene = build_scene(config);
  const EnvironmentPoints points = build_points(config, *scene);
  OptimizeResult result;
  result.candidates = build_candidates(config);
  if (static_cast<std::size_t>(config.k) > result.candidates.size())
    throw ConfigError("optimizer.k", "k = " + std::to_string(config.k) + " exceeds the " +
                                         std::to_string(result.candidates.size()) + " candidates");
  const auto vis_start = Clock::now();
  const VisibilityMatrix matrix =
      build_visibility_matrix(*scene, result.candidates, points, config.method, bias_for(config));
  const double vis_ms = ms_since(vis_start);
  write_visibility_matrix(matrix, out / "visibility.cnvm");

  result.report = config.algorithm == OptimizerKind::LazyGreedy
                      ? lazy_greedy(matrix, points, result.candidates, config.k, config.quality, config.regularizer)
                      : greedy(matrix, points, result.candidates, config.k, config.quality, config.regularizer);
  result.coverage = coverage(matrix, points, result.report.solution.ids);

  Json cams = Json::array();
  for (const int id : result.report.solution.ids) {
    const Viewpoint& v = result.candidates[static_cast<std::size_t>(id)];
    cams.push_back(to_json(LiveCamera{id, v.spec, v.pose}));
  }
  // Deterministic content only; timings go to the report.
  write_json({{"config_hash", config.hash},
              {"algorithm", result.report.algorithm},
              {"k", config.k},
              {"ids", result.report.solution.ids},
              {"gains", result.report.gains},
              {"objective", result.report.objective},
              {"coverage", result.coverage},
              {"evaluations", result.report.evaluations},
              {"approximation_guarantee", result.report.approximation_guarantee},
              {"quality", to_json(config.quality)},
              {"cameras", cams}},
             out / "solution.json");
  write_json({{"config_hash", config.hash},
              {"n_points", points.size()},
              {"m_candidates", result.candidates.size()},
              {"triangles", scene->mesh.triangle_count()},
              {"visibility_ms", vis_ms},
              {"optimizer_seconds", result.report.wall_seconds},
              {"evaluations", result.report.evaluations},
              {"objective", result.report.objective},
              {"approximation_guarantee", result.report.approximation_guarantee}},
             out / "optimize_report.json");
  return result;
}

std::vector<QualityFunction> sample_functions(int n, int levels, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("number of functions must be >= 1");
  Rng rng(seed);
  std::vector<QualityFunction> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::uint64_t s = rng.next();
    out.push_back(QualityFunction::redundancy(sample_quality_weights(s, levels), s));
  }
  return out;
}

std::vector<Viewpoint> read_solution_cameras(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open solution file '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("cameras") || !doc["cameras"].is_array())
    throw IoError(path.string() + ": expected an object with a \"cameras\" array");
  std::vector<Viewpoint> cams;
  for (std::size_t i = 0; i < doc["cameras"].size(); ++i) {
    const Json& c = doc["cameras"][i];
    const std::string p = "cameras[" + std::to_string(i) + "]";
    Viewpoint v;
    v.id = c.value("id", static_cast<int>(i));
    v.spec = camera_spec_from_json(c.value("spec", Json::object()), p + ".spec");
    v.pose = pose_from_json(c.at("pose"), p + ".pose");
    cams.push_back(v);
  }
  return cams;
}

CrossEvalResult cmd_crosseval(const ScenarioConfig& config, int n_functions, std::uint64_t seed,
                              const std::filesystem::path& out, const std::optional<std::filesystem::path>& external) {
  ensure_dir(out);
  const auto scene = build_scene(config);
  const EnvironmentPoints points = build_points(config, *scene);
  const CandidateSet candidates = build_candidates(config);
  if (static_cast<std::size_t>(config.k) > candidates.size())
    throw ConfigError("optimizer.k", "k exceeds the number of candidates");
  const VisibilityMatrix matrix = build_visibility_matrix(*scene, candidates, points, config.method, bias_for(config));
  const auto functions = sample_functions(n_functions, config.crosseval_levels, seed);

  CrossEvalResult result;
  GreedyConfig gc;
  gc.k = config.k;
  gc.algorithm = config.algorithm;
  gc.regularizer = config.regularizer;
  result.table = cross_evaluate(matrix, points, candidates, functions, gc);
  if (external)
    result.external = evaluate_external_viewpoints(*scene, points, read_solution_cameras(*external), result.table,
                                                   config.method, bias_for(config));

  write_crosseval_csv(result.table, out / "crosseval.csv");
  const auto& t = result.table;
  Json fns = Json::array(), sols = Json::array(), rows = Json::array();
  for (const auto& f : t.functions) fns.push_back(to_json(f));
  for (const auto& s : t.solutions) sols.push_back(s.ids);
  for (Eigen::Index j = 0; j < t.ratios.rows(); ++j) rows.push_back(eigen_json(t.ratios.row(j).transpose()));
  Json doc = {{"config_hash", config.hash},
              {"seed", seed},
              {"k", config.k},
              {"functions", fns},
              {"solutions", sols},
              {"ratios", rows},
              {"reference_values", eigen_json(t.reference_values)},
              {"coverage", eigen_json(t.coverage)},
              {"mean_ratio", eigen_json(t.mean_ratio)}};
  if (result.external) {
    doc["external"] = ratio_row_json(*result.external);
    doc["external"]["file"] = external->string();
  }
  write_json(doc, out / "crosseval.json");
  return result;
}

CoverageReport cmd_audit(const ScenarioConfig& config, const std::filesystem::path& solution_file, double resolution,
                         const std::filesystem::path& out) {
  ensure_dir(out);
  const auto scene = build_scene(config);
  const auto cameras = read_solution_cameras(solution_file);
  AuditOptions opt;
  opt.resolution = resolution;
  opt.memory_budget_bytes = config.memory_budget_bytes;
  opt.bias = bias_for(config);
  const auto start = Clock::now();
  CoverageReport report = dense_coverage_audit(*scene, cameras, opt);
  const double elapsed = ms_since(start);
  write_points(report.uncovered, out / "uncovered.cnpt");
  write_json({{"config_hash", config.hash},
              {"solution", solution_file.string()},
              {"cameras", cameras.size()},
              {"resolution", resolution},
              {"total_points", report.total_points},
              {"covered_points", report.covered_points},
              {"uncovered_points", report.uncovered.size()},
              {"fraction", report.fraction},
              {"histogram", report.histogram},
              {"grid",
               {{"resolution", {report.grid_resolution.x(), report.grid_resolution.y(), report.grid_resolution.z()}},
                {"min", vec_json(report.grid_bounds.min)},
                {"max", vec_json(report.grid_bounds.max)}}},
              {"required_bytes", report.required_bytes},
              {"memory_budget_bytes", config.memory_budget_bytes},
              {"elapsed_ms", elapsed}},
             out / "audit.json");
  return report;
}

std::vector<LiveCamera> ring_cameras(const Aabbd& bounds, int m, const CameraSpec& spec) {
  std::vector<LiveCamera> cams;
  const Vec3 c = bounds.center();
  const Vec3 e = bounds.extent();
  for (int i = 0; i < m; ++i) {
    const double a = 2.0 * std::numbers::pi * (i + 0.5) / std::max(m, 1);
    const Vec3 eye(c.x() + 0.35 * e.x() * std::cos(a), c.y() + 0.35 * e.y() * std::sin(a), c.z() + 0.3 * e.z());
    const Vec3 target(c.x(), c.y(), bounds.min.z());
    cams.push_back(LiveCamera{i, spec, Pose::look_at(eye, target)});
  }
  return cams;
}

std::vector<BenchRow> cmd_bench(const ScenarioConfig& config, const std::vector<std::size_t>& point_counts,
                                const std::vector<int>& camera_counts, const std::filesystem::path& out,
                                std::ostream* progress) {
  if (point_counts.empty()) throw ConfigError("bench.points", "needs at least one point count");
  if (camera_counts.empty()) throw ConfigError("bench.cameras", "needs at least one camera count");
  ensure_dir(out);
  const auto scene = build_scene(config);
  const Aabbd bounds = scene->mesh.bounds();
  RoiBox roi;
  roi.center = bounds.center();
  roi.half_extents = (0.5 * bounds.extent()).cwiseMax(Vec3::Constant(1e-3));

  struct Setup {
    std::unique_ptr<Session> session;
    Pose home, nudged;
  };
  std::vector<Setup> setups;
  for (const std::size_t n : point_counts) {
    roi.resolution = resolution_for_count(roi.half_extents, n);
    EnvironmentPoints points = voxelize_box(roi);
    for (const int m : camera_counts) {
      Session::Options opt;
      opt.method = config.method;
      opt.bias = bias_for(config);
      Setup s;
      s.session = std::make_unique<Session>(scene, points, ring_cameras(bounds, m, config.camera), opt);
      s.home = s.session->snapshot()->cameras.front().pose;
      s.nudged = Pose(s.home.position(), s.home.orientation() * Quat(Eigen::AngleAxisd(0.05, Vec3::UnitY())));
      setups.push_back(std::move(s));
    }
  }
  // Round-robin over the sweep so slow drifts in machine load hit every size
  // alike instead of one block of rows.
  for (int r = 0; r < config.bench_repeats; ++r)
    for (auto& s : setups) s.session->move_camera(0, (r % 2 == 0) ? s.nudged : s.home);

  std::vector<BenchRow> rows;
  const int full_repeats = std::max(1, config.bench_repeats / 2);
  std::vector<double> full_ms(setups.size(), 0.0);
  for (int r = 0; r < full_repeats; ++r)
    for (std::size_t i = 0; i < setups.size(); ++i) {
      const auto start = Clock::now();
      (void)setups[i].session->recompute_counts();
      full_ms[i] += ms_since(start);
    }
  for (std::size_t i = 0; i < setups.size(); ++i) {
    const Session& session = *setups[i].session;
    BenchRow row;
    row.n_points = session.points().size();
    row.m_cameras = static_cast<int>(session.snapshot()->cameras.size());
    row.mean_latency_ms = session.latency_stats().mean_ms;
    row.full_recompute_ms = full_ms[i] / full_repeats;
    rows.push_back(row);
    if (progress)
      *progress << "n=" << row.n_points << " m=" << row.m_cameras << " latency_ms=" << row.mean_latency_ms
                << " full_ms=" << row.full_recompute_ms << std::endl;
  }

  std::ofstream csv(out / "bench.csv");
  if (!csv) throw IoError("cannot write bench.csv");
  csv << "# config_hash " << config.hash << '\n';
  csv << "n_points,m_cameras,mean_latency_ms,full_recompute_ms\n";
  for (const auto& r : rows) csv << r.n_points << ',' << r.m_cameras << ',' << r.mean_latency_ms << ',' << r.full_recompute_ms << '\n';
  return rows;
}

void cmd_serve(const ScenarioConfig& config, const std::filesystem::path& out, std::ostream& log) {
  ensure_dir(out);
  auto scene = build_scene(config);
  EnvironmentPoints points = build_points(config, *scene);
  Session session = make_session(config, scene, std::move(points));
  ServerOptions opt;
  opt.port = config.port;
  opt.config_hash = config.hash;
  opt.handle_signals = true;
  SessionServer server(session, opt);
  log << "serving " << session.points().size() << " points, " << config.session_cameras.size()
      << " cameras on ws://127.0.0.1:" << server.port() << std::endl;
  server.run();
  const auto path = out / "session_export.json";
  write_json(export_json(session.export_solution(), config.hash), path);
  log << "session exported to " << path.string() << std::endl;
}

void cmd_sample_functions(int n, int levels, std::uint64_t seed, const std::filesystem::path& out) {
  ensure_dir(out);
  Json fns = Json::array();
  for (const auto& f : sample_functions(n, levels, seed)) fns.push_back(to_json(f));
  write_json({{"seed", seed}, {"levels", levels}, {"functions", fns}}, out / "functions.json");
}

void cmd_gen_scene(const std::string& name, std::uint64_t seed, const std::filesystem::path& file) {
  if (file.has_parent_path()) ensure_dir(file.parent_path());
  save_mesh(generate_scene(name, seed), file, mesh_format_from_path(file));
}

}  // namespace camnet
