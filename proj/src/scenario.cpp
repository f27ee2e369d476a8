#include "camnet/scenario.hpp"

#include "camnet/scenes.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>

namespace camnet {

ConfigError::ConfigError(std::string field, const std::string& message)
    : InvalidArgument(field + ": " + message), field_(std::move(field)) {}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json* find(const Json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

double number(const Json& obj, const char* key, const std::string& path, double fallback) {
  const Json* v = find(obj, key);
  return v ? number(*v, join(path, key)) : fallback;
}

long long integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long long>();
}

long long integer(const Json& obj, const char* key, const std::string& path, long long fallback) {
  const Json* v = find(obj, key);
  return v ? integer(*v, join(path, key)) : fallback;
}

std::uint64_t seed_value(const Json& obj, const char* key, const std::string& path, std::uint64_t fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
    throw ConfigError(join(path, key), "expected a nonnegative integer");
  return v->get<std::uint64_t>();
}

std::string text(const Json& obj, const char* key, const std::string& path, const std::string& fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ConfigError(join(path, key), "expected a string");
  return v->get<std::string>();
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
  const Json* v = find(obj, key);
  if (!v) throw ConfigError(join(path, key), "required field is missing");
  return *v;
}

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

const Json& require_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  return j;
}

std::vector<double> numbers(const Json& j, const std::string& path) {
  require_array(j, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], at(path, i)));
  return out;
}

Vec3 vec3(const Json& j, const std::string& path) {
  const auto v = numbers(j, path);
  if (v.size() != 3) throw ConfigError(path, "expected 3 numbers");
  return {v[0], v[1], v[2]};
}

Vec2 vec2(const Json& j, const std::string& path) {
  const auto v = numbers(j, path);
  if (v.size() != 2) throw ConfigError(path, "expected 2 numbers");
  return {v[0], v[1]};
}

// Quaternions are written [w, x, y, z].
Quat quat(const Json& j, const std::string& path) {
  const auto v = numbers(j, path);
  if (v.size() != 4) throw ConfigError(path, "expected 4 numbers [w, x, y, z]");
  const Quat q(v[0], v[1], v[2], v[3]);
  if (!(q.norm() > 0.0)) throw ConfigError(path, "quaternion must be nonzero");
  return q.normalized();
}

Json quat_json(const Quat& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }
Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

// Re-throws module validation errors with the field path attached.
template <typename F>
auto checked(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
}

RoiBox roi_from_json(const Json& j, const std::string& path) {
  RoiBox box;
  box.center = vec3(require(j, "center", path), join(path, "center"));
  box.half_extents = vec3(require(j, "half_extents", path), join(path, "half_extents"));
  if (const Json* o = find(j, "orientation")) box.orientation = quat(*o, join(path, "orientation"));
  const Json* res = find(j, "resolution");
  const Json* target = find(j, "target_count");
  if (res && target) throw ConfigError(path, "give either resolution or target_count, not both");
  if (res) {
    const auto r = numbers(*res, join(path, "resolution"));
    if (r.size() != 3) throw ConfigError(join(path, "resolution"), "expected 3 integers");
    for (int k = 0; k < 3; ++k) box.resolution[k] = static_cast<int>(integer((*res)[static_cast<std::size_t>(k)], at(join(path, "resolution"), static_cast<std::size_t>(k))));
  } else if (target) {
    const long long n = integer(*target, join(path, "target_count"));
    if (n < 1) throw ConfigError(join(path, "target_count"), "must be >= 1");
    box.resolution = checked(path, [&] { return resolution_for_count(box.half_extents, static_cast<std::size_t>(n)); });
  } else {
    throw ConfigError(join(path, "resolution"), "required field is missing (or give target_count)");
  }
  checked(path, [&] { box.validate(); });
  return box;
}

PointDirective point_directive(const Json& j, const std::string& path, std::uint64_t default_seed) {
  require_object(j, path);
  PointDirective d;
  const std::string type = text(j, "type", path, "");
  d.weight = number(j, "weight", path, 1.0);
  if (!(d.weight > 0.0)) throw ConfigError(join(path, "weight"), "must be > 0");
  if (type == "voxel_box") {
    d.type = PointDirective::Type::VoxelBox;
    d.box = roi_from_json(j, path);
  } else if (type == "uniform") {
    d.type = PointDirective::Type::Uniform;
    const Vec3 lo = vec3(require(j, "min", path), join(path, "min"));
    const Vec3 hi = vec3(require(j, "max", path), join(path, "max"));
    d.region = checked(path, [&] { return Aabbd(lo, hi); });
    const long long n = integer(require(j, "count", path), join(path, "count"));
    if (n < 1) throw ConfigError(join(path, "count"), "must be >= 1");
    d.count = static_cast<std::size_t>(n);
    d.seed = seed_value(j, "seed", path, default_seed);
  } else if (type == "file") {
    d.type = PointDirective::Type::File;
    d.file = text(j, "path", path, "");
    if (d.file.empty()) throw ConfigError(join(path, "path"), "required field is missing");
  } else {
    throw ConfigError(join(path, "type"), "expected voxel_box, uniform or file");
  }
  return d;
}

CandidateDirective candidate_directive(const Json& j, const std::string& path, std::uint64_t default_seed) {
  require_object(j, path);
  CandidateDirective d;
  const std::string type = text(j, "type", path, "");
  if (type == "segments") {
    d.type = CandidateDirective::Type::Segments;
    const Json& segs = require_array(require(j, "segments", path), join(path, "segments"));
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string p = at(join(path, "segments"), i);
      require_object(segs[i], p);
      d.segments.push_back({vec3(require(segs[i], "from", p), join(p, "from")), vec3(require(segs[i], "to", p), join(p, "to"))});
    }
    if (d.segments.empty()) throw ConfigError(join(path, "segments"), "must not be empty");
    d.positions_per_segment = static_cast<int>(integer(require(j, "positions_per_segment", path), join(path, "positions_per_segment")));
    if (d.positions_per_segment < 2) throw ConfigError(join(path, "positions_per_segment"), "must be >= 2");
    const Json& ors = require_array(require(j, "orientations", path), join(path, "orientations"));
    for (std::size_t i = 0; i < ors.size(); ++i) {
      const std::string p = at(join(path, "orientations"), i);
      if (ors[i].is_object() && find(ors[i], "quaternion")) {
        d.orientations.push_back(quat(ors[i]["quaternion"], join(p, "quaternion")));
      } else if (ors[i].is_object() && find(ors[i], "direction")) {
        const Vec3 dir = vec3(ors[i]["direction"], join(p, "direction"));
        d.orientations.push_back(checked(p, [&] { return Pose::look_along(Vec3::Zero(), dir).orientation(); }));
      } else {
        throw ConfigError(p, "expected {\"quaternion\": [w,x,y,z]} or {\"direction\": [x,y,z]}");
      }
    }
    if (d.orientations.empty()) throw ConfigError(join(path, "orientations"), "must not be empty");
  } else if (type == "area") {
    d.type = CandidateDirective::Type::Area;
    const Json& poly = require_array(require(j, "polygon", path), join(path, "polygon"));
    for (std::size_t i = 0; i < poly.size(); ++i) d.polygon.push_back(vec2(poly[i], at(join(path, "polygon"), i)));
    if (d.polygon.size() < 3) throw ConfigError(join(path, "polygon"), "needs at least 3 vertices");
    d.height = number(require(j, "height", path), join(path, "height"));
    d.count = static_cast<int>(integer(require(j, "count", path), join(path, "count")));
    if (d.count < 1) throw ConfigError(join(path, "count"), "must be >= 1");
    d.seed = seed_value(j, "seed", path, default_seed);
  } else if (type == "explicit") {
    d.type = CandidateDirective::Type::Explicit;
    const Json& poses = require_array(require(j, "poses", path), join(path, "poses"));
    for (std::size_t i = 0; i < poses.size(); ++i) d.poses.push_back(pose_from_json(poses[i], at(join(path, "poses"), i)));
  } else {
    throw ConfigError(join(path, "type"), "expected segments, area or explicit");
  }
  return d;
}

Regularizer regularizer_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  const std::string kind = text(j, "kind", path, "none");
  const double alpha = number(j, "alpha", path, 0.0);
  if (kind == "none") return {};
  if (kind == "proximity")
    return checked(path, [&] { return Regularizer::proximity(alpha, number(require(j, "min_separation", path), join(path, "min_separation"))); });
  if (kind == "custom") {
    const Json& rows = require_array(require(j, "matrix", path), join(path, "matrix"));
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto row = numbers(rows[r], at(join(path, "matrix"), r));
      if (row.size() != rows.size()) throw ConfigError(at(join(path, "matrix"), r), "matrix must be square");
      for (std::size_t c = 0; c < row.size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    return checked(path, [&] { return Regularizer::custom(alpha, m); });
  }
  throw ConfigError(join(path, "kind"), "expected none, proximity or custom");
}

std::size_t positive_size(const Json& j, const std::string& path) {
  const long long v = integer(j, path);
  if (v < 1) throw ConfigError(path, "must be >= 1");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

std::string config_hash(const Json& document) { return sha256_hex(document.dump()); }

Json to_json(const CameraSpec& s) {
  return {{"perspective_angle", s.perspective_angle}, {"width", s.width}, {"height", s.height},
          {"min_range", s.min_range}, {"max_range", s.max_range}};
}

Json to_json(const Pose& p) { return {{"position", vec_json(p.position())}, {"quaternion", quat_json(p.orientation())}}; }

Json to_json(const LiveCamera& c) { return {{"id", c.id}, {"spec", to_json(c.spec)}, {"pose", to_json(c.pose)}}; }

Json to_json(const QualityFunction& q) {
  Json j = {{"kind", to_string(q.kind())}};
  switch (q.kind()) {
    case QualityKind::Scp: break;
    case QualityKind::Redundancy:
      j["weights"] = q.parameters();
      j["seed"] = q.seed();
      break;
    case QualityKind::ThresholdCount: j["cap"] = static_cast<int>(q.parameters().at(0)); break;
    case QualityKind::CustomTable: j["values"] = q.parameters(); break;
  }
  return j;
}

CameraSpec camera_spec_from_json(const Json& j, const std::string& path, const CameraSpec& defaults) {
  require_object(j, path);
  CameraSpec s = defaults;
  s.perspective_angle = number(j, "perspective_angle", path, s.perspective_angle);
  s.width = static_cast<int>(integer(j, "width", path, s.width));
  s.height = static_cast<int>(integer(j, "height", path, s.height));
  s.min_range = number(j, "min_range", path, s.min_range);
  s.max_range = number(j, "max_range", path, s.max_range);
  checked(path, [&] { s.validate(); });
  return s;
}

Pose pose_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  const Vec3 position = vec3(require(j, "position", path), join(path, "position"));
  const Json* q = find(j, "quaternion");
  const Json* target = find(j, "look_at");
  const Json* dir = find(j, "direction");
  if ((q != nullptr) + (target != nullptr) + (dir != nullptr) != 1)
    throw ConfigError(path, "give exactly one of quaternion, look_at or direction");
  if (q) return Pose(position, quat(*q, join(path, "quaternion")));
  if (target) {
    const Vec3 t = vec3(*target, join(path, "look_at"));
    return checked(path, [&] { return Pose::look_at(position, t); });
  }
  const Vec3 d = vec3(*dir, join(path, "direction"));
  return checked(path, [&] { return Pose::look_along(position, d); });
}

QualityFunction quality_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  const std::string kind = text(j, "kind", path, "");
  if (kind == "scp") return QualityFunction::scp();
  if (kind == "redundancy") {
    const std::uint64_t seed = seed_value(j, "seed", path, 0);
    if (const Json* w = find(j, "weights")) {
      const auto weights = numbers(*w, join(path, "weights"));
      return checked(join(path, "weights"), [&] { return QualityFunction::redundancy(weights, seed); });
    }
    const long long levels = integer(require(j, "levels", path), join(path, "levels"));
    if (levels < 1) throw ConfigError(join(path, "levels"), "must be >= 1");
    return QualityFunction::redundancy(sample_quality_weights(seed, static_cast<int>(levels)), seed);
  }
  if (kind == "threshold_count") {
    const long long cap = integer(require(j, "cap", path), join(path, "cap"));
    return checked(join(path, "cap"), [&] { return QualityFunction::threshold_count(static_cast<int>(cap)); });
  }
  if (kind == "custom_table") {
    const auto values = numbers(require(j, "values", path), join(path, "values"));
    return checked(join(path, "values"), [&] { return QualityFunction::custom_table(values); });
  }
  throw ConfigError(join(path, "kind"), "expected scp, redundancy, threshold_count or custom_table");
}

ScenarioConfig parse_scenario(Json doc, const std::filesystem::path& base_dir, const ScenarioOverrides& ov) {
  require_object(doc, "");
  if (ov.seed) doc["seed"] = *ov.seed;
  if (ov.resolution) doc["audit"]["resolution"] = *ov.resolution;
  if (ov.port) doc["session"]["port"] = *ov.port;
  if (ov.method) doc["visibility"]["method"] = *ov.method;
  if (ov.k) doc["optimizer"]["k"] = *ov.k;

  ScenarioConfig c;
  c.raw = doc;
  c.hash = config_hash(doc);
  c.base_dir = base_dir;
  c.seed = seed_value(doc, "seed", "", 0);

  const Json& scene = require(doc, "scene", "");
  require_object(scene, "scene");
  const Json* file = find(scene, "file");
  const Json* gen = find(scene, "generate");
  if ((file != nullptr) == (gen != nullptr)) throw ConfigError("scene", "give exactly one of file or generate");
  if (file) {
    c.scene_file = text(scene, "file", "scene", "");
    if (c.scene_file.is_relative()) c.scene_file = base_dir / c.scene_file;
    if (!std::filesystem::exists(c.scene_file))
      throw ConfigError("scene.file", "file '" + c.scene_file.string() + "' does not exist");
    const std::string fmt = text(scene, "format", "scene", "");
    c.scene_format = checked("scene.format", [&] {
      return fmt.empty() ? mesh_format_from_path(c.scene_file) : mesh_format_from_string(fmt);
    });
  } else {
    c.scene_generator = text(scene, "generate", "scene", "");
    c.scene_seed = seed_value(scene, "seed", "scene", 1);
  }

  if (const Json* cam = find(doc, "camera")) c.camera = camera_spec_from_json(*cam, "camera");

  if (const Json* pts = find(doc, "points")) {
    require_array(*pts, "points");
    for (std::size_t i = 0; i < pts->size(); ++i) {
      auto d = point_directive((*pts)[i], at("points", i), c.seed + 1000 + i);
      if (d.type == PointDirective::Type::File && d.file.is_relative()) d.file = base_dir / d.file;
      if (d.type == PointDirective::Type::File && !std::filesystem::exists(d.file))
        throw ConfigError(join(at("points", i), "path"), "file '" + d.file.string() + "' does not exist");
      c.points.push_back(std::move(d));
    }
  }
  if (const Json* cand = find(doc, "candidates")) c.candidates = candidate_directive(*cand, "candidates", c.seed + 1);
  if (const Json* q = find(doc, "quality")) c.quality = quality_from_json(*q, "quality");
  if (const Json* r = find(doc, "regularizer")) c.regularizer = regularizer_from_json(*r, "regularizer");

  if (const Json* o = find(doc, "optimizer")) {
    require_object(*o, "optimizer");
    const std::string alg = text(*o, "algorithm", "optimizer", "lazy_greedy");
    if (alg == "greedy")
      c.algorithm = OptimizerKind::Greedy;
    else if (alg == "lazy_greedy")
      c.algorithm = OptimizerKind::LazyGreedy;
    else
      throw ConfigError("optimizer.algorithm", "expected greedy or lazy_greedy");
    c.k = static_cast<int>(integer(*o, "k", "optimizer", c.k));
    c.brute_force_budget = integer(*o, "brute_force_budget", "optimizer", c.brute_force_budget);
    if (c.brute_force_budget < 1) throw ConfigError("optimizer.brute_force_budget", "must be >= 1");
  }
  if (c.k < 1) throw ConfigError("optimizer.k", "must be >= 1");

  if (const Json* x = find(doc, "crosseval")) {
    require_object(*x, "crosseval");
    c.crosseval_functions = static_cast<int>(integer(*x, "functions", "crosseval", c.crosseval_functions));
    c.crosseval_levels = static_cast<int>(integer(*x, "levels", "crosseval", c.crosseval_levels));
    c.crosseval_seed = seed_value(*x, "seed", "crosseval", c.seed);
    if (c.crosseval_functions < 1) throw ConfigError("crosseval.functions", "must be >= 1");
    if (c.crosseval_levels < 1) throw ConfigError("crosseval.levels", "must be >= 1");
  } else {
    c.crosseval_seed = c.seed;
  }

  if (const Json* v = find(doc, "visibility")) {
    require_object(*v, "visibility");
    const std::string m = text(*v, "method", "visibility", "zbuffer");
    c.method = checked("visibility.method", [&] { return visibility_method_from_string(m); });
    c.bias = number(*v, "bias", "visibility", -1.0);
    if (find(*v, "bias") && !(c.bias >= 0.0)) throw ConfigError("visibility.bias", "must be >= 0");
  }

  if (const Json* s = find(doc, "session")) {
    require_object(*s, "session");
    c.port = static_cast<int>(integer(*s, "port", "session", c.port));
    if (c.port < 0 || c.port > 65535) throw ConfigError("session.port", "must lie in [0, 65535]");
    const long long window = integer(*s, "latency_window", "session", static_cast<long long>(c.latency_window));
    if (window < 1) throw ConfigError("session.latency_window", "must be >= 1");
    c.latency_window = static_cast<std::size_t>(window);
    if (const Json* cams = find(*s, "cameras")) {
      require_array(*cams, "session.cameras");
      for (std::size_t i = 0; i < cams->size(); ++i) {
        const std::string p = at("session.cameras", i);
        const Json& cj = (*cams)[i];
        require_object(cj, p);
        LiveCamera cam;
        cam.id = static_cast<int>(integer(cj, "id", p, static_cast<long long>(i)));
        if (cam.id < 0) throw ConfigError(join(p, "id"), "must be >= 0");
        for (const auto& other : c.session_cameras)
          if (other.id == cam.id) throw ConfigError(join(p, "id"), "duplicate camera id");
        cam.spec = find(cj, "spec") ? camera_spec_from_json(cj["spec"], join(p, "spec"), c.camera) : c.camera;
        cam.pose = pose_from_json(find(cj, "pose") ? cj["pose"] : cj, find(cj, "pose") ? join(p, "pose") : p);
        c.session_cameras.push_back(cam);
      }
    }
  }

  if (const Json* a = find(doc, "audit")) {
    require_object(*a, "audit");
    c.audit_resolution = number(*a, "resolution", "audit", c.audit_resolution);
    if (!(c.audit_resolution > 0.0)) throw ConfigError("audit.resolution", "must be > 0");
    const double mb = number(*a, "memory_budget_mb", "audit", static_cast<double>(c.memory_budget_bytes >> 20));
    if (!(mb > 0.0)) throw ConfigError("audit.memory_budget_mb", "must be > 0");
    c.memory_budget_bytes = static_cast<std::size_t>(mb * 1024.0 * 1024.0);
  }

  if (const Json* b = find(doc, "bench")) {
    require_object(*b, "bench");
    if (const Json* n = find(*b, "points")) {
      require_array(*n, "bench.points");
      for (std::size_t i = 0; i < n->size(); ++i) c.bench_points.push_back(positive_size((*n)[i], at("bench.points", i)));
    }
    if (const Json* m = find(*b, "cameras")) {
      require_array(*m, "bench.cameras");
      for (std::size_t i = 0; i < m->size(); ++i)
        c.bench_cameras.push_back(static_cast<int>(positive_size((*m)[i], at("bench.cameras", i))));
    }
    c.bench_repeats = static_cast<int>(integer(*b, "repeats", "bench", c.bench_repeats));
    if (c.bench_repeats < 1) throw ConfigError("bench.repeats", "must be >= 1");
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(std::move(doc), path.parent_path(), overrides);
}

std::shared_ptr<const Scene> build_scene(const ScenarioConfig& c) {
  if (!c.scene_generator.empty()) {
    TriangleMesh mesh = checked("scene.generate", [&] { return generate_scene(c.scene_generator, c.scene_seed); });
    MeshLoadReport report;
    report.triangles = mesh.triangle_count();
    report.bounds = mesh.bounds();
    return std::make_shared<const Scene>(std::move(mesh), report);
  }
  MeshLoadReport report;
  TriangleMesh mesh = load_mesh(c.scene_file, c.scene_format, &report);
  return std::make_shared<const Scene>(std::move(mesh), report);
}

EnvironmentPoints build_points(const ScenarioConfig& c, const Scene& scene) {
  std::vector<EnvironmentPoints> sets;
  for (const auto& d : c.points) {
    EnvironmentPoints p;
    switch (d.type) {
      case PointDirective::Type::VoxelBox: p = voxelize_box(d.box); break;
      case PointDirective::Type::Uniform: p = sample_points_uniform(d.region, d.count, d.seed); break;
      case PointDirective::Type::File: p = read_points(d.file); break;
    }
    if (d.weight != 1.0) p.weights *= d.weight;
    sets.push_back(std::move(p));
  }
  if (sets.empty()) {
    // No directive: a 0.5 m grid over the scene bounds.
    return voxelize_box(audit_grid(scene.mesh.bounds(), 0.5));
  }
  return merge_point_sets(sets);
}

CandidateSet build_candidates(const ScenarioConfig& c) {
  const auto& d = c.candidates;
  switch (d.type) {
    case CandidateDirective::Type::None: throw ConfigError("candidates", "required field is missing");
    case CandidateDirective::Type::Segments:
      return sample_segment_viewpoints(d.segments, d.positions_per_segment, d.orientations, c.camera);
    case CandidateDirective::Type::Area: return sample_area_viewpoints(d.polygon, d.height, d.count, c.camera, d.seed);
    case CandidateDirective::Type::Explicit: return explicit_candidates(d.poses, c.camera);
  }
  return {};
}

}  // namespace camnet
