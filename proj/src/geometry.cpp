#include "camnet/geometry.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace camnet {

Aabbd TriangleMesh::bounds() const {
  Aabbd box;
  for (const auto& v : vertices) box.extend(v);
  return box;
}

void TriangleMesh::append(const TriangleMesh& other) {
  const int offset = static_cast<int>(vertices.size());
  const int label_offset = static_cast<int>(labels.size());
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  const bool had_labels = !triangle_labels.empty() || !other.triangle_labels.empty();
  if (had_labels) triangle_labels.resize(triangles.size(), -1);
  for (const auto& t : other.triangles) triangles.push_back(t.array() + offset);
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  if (had_labels) {
    for (std::size_t i = 0; i < other.triangles.size(); ++i) {
      const int l = i < other.triangle_labels.size() ? other.triangle_labels[i] : -1;
      triangle_labels.push_back(l < 0 ? -1 : l + label_offset);
    }
  }
}

MeshFormat mesh_format_from_string(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (!lower.empty() && lower.front() == '.') lower.erase(0, 1);
  if (lower == "obj") return MeshFormat::Obj;
  if (lower == "stl") return MeshFormat::Stl;
  if (lower == "ply") return MeshFormat::Ply;
  throw InvalidArgument("unknown mesh format '" + name + "'");
}

MeshFormat mesh_format_from_path(const std::filesystem::path& path) {
  return mesh_format_from_string(path.extension().string());
}

bool is_degenerate(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double longest =
      std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
  if (longest == 0.0) return true;
  const double twice_area = (b - a).cross(c - a).norm();
  // Relative test: sine of the largest angle's supplement below 1e-12.
  return twice_area <= 1e-12 * longest;
}

TriangleMesh make_mesh(std::vector<Vec3> vertices, std::vector<Eigen::Vector3i> triangles,
                       MeshLoadReport* report) {
  TriangleMesh mesh;
  mesh.vertices = std::move(vertices);
  const int n = static_cast<int>(mesh.vertices.size());
  std::size_t dropped = 0;
  mesh.triangles.reserve(triangles.size());
  for (const auto& t : triangles) {
    if ((t.array() < 0).any() || (t.array() >= n).any())
      throw IoError("triangle index out of range (vertex count " + std::to_string(n) + ")");
    if (is_degenerate(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]])) {
      ++dropped;
      continue;
    }
    mesh.triangles.push_back(t);
  }
  if (mesh.triangles.empty()) throw IoError("mesh has no triangles after dropping degenerates");
  if (report) {
    report->triangles = mesh.triangles.size();
    report->dropped_degenerate = dropped;
    report->bounds = mesh.bounds();
  }
  return mesh;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return ss.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  // std::from_chars for double is available in libstdc++ 11.
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_long(std::string_view s, long& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw IoError(path.string() + ":" + std::to_string(line) + ": " + what);
}

TriangleMesh load_obj(const std::filesystem::path& path, MeshLoadReport* report) {
  const std::string text = read_file(path);
  std::vector<Vec3> vertices;
  std::vector<Eigen::Vector3i> triangles;
  std::vector<std::string> labels;
  std::vector<int> triangle_labels;
  int current_label = -1;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line = trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto tok = split_ws(line);
    if (tok[0] == "v") {
      if (tok.size() < 4) malformed(path, line_no, "vertex needs 3 coordinates");
      Vec3 p;
      for (int k = 0; k < 3; ++k)
        if (!parse_double(tok[k + 1], p[k])) malformed(path, line_no, "bad vertex coordinate");
      vertices.push_back(p);
    } else if (tok[0] == "f") {
      if (tok.size() < 4) malformed(path, line_no, "face needs at least 3 vertices");
      std::vector<int> idx;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        std::string_view ref = tok[k].substr(0, tok[k].find('/'));
        long i = 0;
        if (!parse_long(ref, i) || i == 0) malformed(path, line_no, "bad face index");
        // Negative indices are relative to the end of the vertex list.
        const long resolved = i > 0 ? i - 1 : static_cast<long>(vertices.size()) + i;
        if (resolved < 0 || resolved >= static_cast<long>(vertices.size()))
          malformed(path, line_no, "face index out of range");
        idx.push_back(static_cast<int>(resolved));
      }
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        triangles.emplace_back(idx[0], idx[k], idx[k + 1]);
        triangle_labels.push_back(current_label);
      }
    } else if (tok[0] == "o" || tok[0] == "g") {
      if (tok.size() > 1) {
        labels.emplace_back(tok[1]);
        current_label = static_cast<int>(labels.size()) - 1;
      }
    }
    // vt, vn, usemtl, mtllib, s, l: ignored.
  }

  // Keep labels aligned with the triangles that survive filtering.
  std::vector<int> kept_labels;
  std::vector<Eigen::Vector3i> kept;
  std::size_t dropped = 0;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    if (is_degenerate(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]])) {
      ++dropped;
      continue;
    }
    kept.push_back(tri);
    kept_labels.push_back(triangle_labels[t]);
  }
  MeshLoadReport local;
  TriangleMesh mesh = make_mesh(std::move(vertices), std::move(kept), &local);
  local.dropped_degenerate += dropped;
  if (!labels.empty()) {
    mesh.labels = std::move(labels);
    mesh.triangle_labels = std::move(kept_labels);
  }
  if (report) *report = local;
  return mesh;
}

template <typename T>
T read_le(const char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&value);
    std::reverse(b, b + sizeof(T));
  }
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&value);
    std::reverse(b, b + sizeof(T));
  }
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

TriangleMesh stl_to_mesh(const std::vector<Vec3>& corners, MeshLoadReport* report) {
  std::vector<Eigen::Vector3i> triangles;
  triangles.reserve(corners.size() / 3);
  for (int i = 0; i + 2 < static_cast<int>(corners.size()); i += 3) triangles.emplace_back(i, i + 1, i + 2);
  return make_mesh(corners, std::move(triangles), report);
}

TriangleMesh load_stl(const std::filesystem::path& path, MeshLoadReport* report) {
  const std::string data = read_file(path);
  if (data.size() >= 84) {
    const auto n = read_le<std::uint32_t>(data.data() + 80);
    if (data.size() == 84 + std::size_t{50} * n) {
      std::vector<Vec3> corners;
      corners.reserve(std::size_t{3} * n);
      for (std::uint32_t t = 0; t < n; ++t) {
        const char* rec = data.data() + 84 + std::size_t{50} * t + 12;
        for (int c = 0; c < 3; ++c) {
          Vec3 p;
          for (int k = 0; k < 3; ++k) p[k] = read_le<float>(rec + 12 * c + 4 * k);
          corners.push_back(p);
        }
      }
      return stl_to_mesh(corners, report);
    }
  }
  if (trim(std::string_view(data).substr(0, std::min<std::size_t>(data.size(), 64))).rfind("solid", 0) != 0)
    throw IoError(path.string() + ": neither a valid binary nor an ASCII STL file");
  std::vector<Vec3> corners;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  int in_facet = 0;
  while (pos < data.size()) {
    std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) end = data.size();
    const auto tok = split_ws(std::string_view(data).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (tok.empty()) continue;
    if (tok[0] == "vertex") {
      if (tok.size() != 4) malformed(path, line_no, "vertex needs 3 coordinates");
      Vec3 p;
      for (int k = 0; k < 3; ++k)
        if (!parse_double(tok[k + 1], p[k])) malformed(path, line_no, "bad vertex coordinate");
      corners.push_back(p);
      ++in_facet;
    } else if (tok[0] == "endfacet") {
      if (in_facet != 3) malformed(path, line_no, "facet must have exactly 3 vertices");
      in_facet = 0;
    }
  }
  if (corners.size() % 3 != 0) throw IoError(path.string() + ": truncated ASCII STL");
  return stl_to_mesh(corners, report);
}

enum class PlyFormat { Ascii, BinaryLe, BinaryBe };

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

std::size_t ply_type_size(const std::string& type) {
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
  if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
  if (type == "int" || type == "uint" || type == "float" || type == "int32" || type == "uint32" ||
      type == "float32")
    return 4;
  if (type == "double" || type == "float64") return 8;
  throw IoError("unknown PLY property type '" + type + "'");
}

class PlyReader {
public:
  PlyReader(const std::string& data, std::size_t offset, PlyFormat format)
      : data_(data), pos_(offset), format_(format) {}

  double scalar(const std::string& type) {
    if (format_ == PlyFormat::Ascii) return ascii_number();
    const std::size_t size = ply_type_size(type);
    if (pos_ + size > data_.size()) throw IoError("truncated PLY body");
    char buf[8];
    std::memcpy(buf, data_.data() + pos_, size);
    pos_ += size;
    const bool swap = (format_ == PlyFormat::BinaryBe) != (std::endian::native == std::endian::big);
    if (swap) std::reverse(buf, buf + size);
    if (type == "char" || type == "int8") return static_cast<std::int8_t>(buf[0]);
    if (type == "uchar" || type == "uint8") return static_cast<std::uint8_t>(buf[0]);
    if (type == "short" || type == "int16") return raw<std::int16_t>(buf);
    if (type == "ushort" || type == "uint16") return raw<std::uint16_t>(buf);
    if (type == "int" || type == "int32") return raw<std::int32_t>(buf);
    if (type == "uint" || type == "uint32") return raw<std::uint32_t>(buf);
    if (type == "float" || type == "float32") return raw<float>(buf);
    return raw<double>(buf);
  }

private:
  template <typename T>
  static double raw(const char* buf) {
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return static_cast<double>(v);
  }

  double ascii_number() {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    double v = 0;
    if (start == pos_ || !parse_double(std::string_view(data_).substr(start, pos_ - start), v))
      throw IoError("malformed PLY ASCII value");
    return v;
  }

  const std::string& data_;
  std::size_t pos_;
  PlyFormat format_;
};

TriangleMesh load_ply(const std::filesystem::path& path, MeshLoadReport* report) {
  const std::string data = read_file(path);
  if (data.rfind("ply", 0) != 0) throw IoError(path.string() + ": missing 'ply' magic");
  const std::size_t header_end = data.find("end_header");
  if (header_end == std::string::npos) throw IoError(path.string() + ": missing end_header");
  std::size_t body = data.find('\n', header_end);
  if (body == std::string::npos) throw IoError(path.string() + ": missing body");
  ++body;

  std::optional<PlyFormat> format;
  std::vector<PlyElement> elements;
  std::istringstream header(data.substr(0, header_end));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(header, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) malformed(path, line_no, "bad format line");
      if (tok[1] == "ascii") format = PlyFormat::Ascii;
      else if (tok[1] == "binary_little_endian") format = PlyFormat::BinaryLe;
      else if (tok[1] == "binary_big_endian") format = PlyFormat::BinaryBe;
      else malformed(path, line_no, "unknown PLY format");
    } else if (tok[0] == "element") {
      long count = 0;
      if (tok.size() != 3 || !parse_long(tok[2], count) || count < 0) malformed(path, line_no, "bad element line");
      elements.push_back({std::string(tok[1]), static_cast<std::size_t>(count), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) malformed(path, line_no, "property before element");
      PlyProperty prop;
      if (tok.size() == 5 && tok[1] == "list") {
        prop.is_list = true;
        prop.count_type = tok[2];
        prop.type = tok[3];
        prop.name = tok[4];
      } else if (tok.size() == 3) {
        prop.type = tok[1];
        prop.name = tok[2];
      } else {
        malformed(path, line_no, "bad property line");
      }
      ply_type_size(prop.type);
      elements.back().properties.push_back(prop);
    }
  }
  if (!format) throw IoError(path.string() + ": missing format line");

  std::vector<Vec3> vertices;
  std::vector<Eigen::Vector3i> triangles;
  PlyReader reader(data, body, *format);
  for (const auto& el : elements) {
    const bool is_vertex = el.name == "vertex";
    const bool is_face = el.name == "face";
    int xyz[3] = {-1, -1, -1};
    for (std::size_t p = 0; p < el.properties.size(); ++p) {
      if (el.properties[p].name == "x") xyz[0] = static_cast<int>(p);
      if (el.properties[p].name == "y") xyz[1] = static_cast<int>(p);
      if (el.properties[p].name == "z") xyz[2] = static_cast<int>(p);
    }
    if (is_vertex && (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0))
      throw IoError(path.string() + ": vertex element lacks x/y/z");
    for (std::size_t i = 0; i < el.count; ++i) {
      Vec3 p = Vec3::Zero();
      for (std::size_t pi = 0; pi < el.properties.size(); ++pi) {
        const auto& prop = el.properties[pi];
        if (prop.is_list) {
          const double count = reader.scalar(prop.count_type);
          if (count < 0) throw IoError(path.string() + ": negative list length");
          std::vector<int> idx(static_cast<std::size_t>(count));
          for (auto& v : idx) v = static_cast<int>(reader.scalar(prop.type));
          if (is_face && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
            if (idx.size() < 3) throw IoError(path.string() + ": face with fewer than 3 vertices");
            for (std::size_t k = 1; k + 1 < idx.size(); ++k) triangles.emplace_back(idx[0], idx[k], idx[k + 1]);
          }
        } else {
          const double v = reader.scalar(prop.type);
          for (int k = 0; k < 3; ++k)
            if (static_cast<int>(pi) == xyz[k]) p[k] = v;
        }
      }
      if (is_vertex) vertices.push_back(p);
    }
  }
  return make_mesh(std::move(vertices), std::move(triangles), report);
}

}  // namespace

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format, MeshLoadReport* report) {
  switch (format) {
    case MeshFormat::Obj: return load_obj(path, report);
    case MeshFormat::Stl: return load_stl(path, report);
    case MeshFormat::Ply: return load_ply(path, report);
  }
  throw InvalidArgument("unknown mesh format");
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  switch (format) {
    case MeshFormat::Obj: {
      out.precision(9);
      int label = -2;
      for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
      for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const int l = t < mesh.triangle_labels.size() ? mesh.triangle_labels[t] : -1;
        if (l != label && l >= 0) out << "o " << mesh.labels[static_cast<std::size_t>(l)] << '\n';
        label = l;
        const auto& tri = mesh.triangles[t];
        out << "f " << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1 << '\n';
      }
      break;
    }
    case MeshFormat::Stl: {
      std::array<char, 80> header{};
      std::memcpy(header.data(), "camnet binary stl", 17);
      out.write(header.data(), header.size());
      write_le<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.triangles.size()));
      for (const auto& tri : mesh.triangles) {
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        const Vec3 n = (b - a).cross(c - a).normalized();
        for (int k = 0; k < 3; ++k) write_le<float>(out, static_cast<float>(n[k]));
        for (const Vec3* p : {&a, &b, &c})
          for (int k = 0; k < 3; ++k) write_le<float>(out, static_cast<float>((*p)[k]));
        write_le<std::uint16_t>(out, 0);
      }
      break;
    }
    case MeshFormat::Ply: {
      out << "ply\nformat binary_little_endian 1.0\n"
          << "element vertex " << mesh.vertices.size() << "\n"
          << "property double x\nproperty double y\nproperty double z\n"
          << "element face " << mesh.triangles.size() << "\n"
          << "property list uchar int vertex_indices\nend_header\n";
      for (const auto& v : mesh.vertices)
        for (int k = 0; k < 3; ++k) write_le<double>(out, v[k]);
      for (const auto& tri : mesh.triangles) {
        write_le<std::uint8_t>(out, 3);
        for (int k = 0; k < 3; ++k) write_le<std::int32_t>(out, tri[k]);
      }
      break;
    }
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& direction, const Vec3& a,
                                         const Vec3& b, const Vec3& c, double t_max) {
  // Shear-and-scale formulation: edge tests on exactly the same projected
  // values for neighbouring triangles, so rays through shared edges hit at
  // least one of them.
  int kz = 0;
  direction.cwiseAbs().maxCoeff(&kz);
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (direction[kz] < 0) std::swap(kx, ky);
  const double sx = direction[kx] / direction[kz];
  const double sy = direction[ky] / direction[kz];
  const double sz = 1.0 / direction[kz];

  const Vec3 A = a - origin;
  const Vec3 B = b - origin;
  const Vec3 C = c - origin;
  const double ax = A[kx] - sx * A[kz];
  const double ay = A[ky] - sy * A[kz];
  const double bx = B[kx] - sx * B[kz];
  const double by = B[ky] - sy * B[kz];
  const double cx = C[kx] - sx * C[kz];
  const double cy = C[ky] - sy * C[kz];

  const double u = cx * by - cy * bx;
  const double v = ax * cy - ay * cx;
  const double w = bx * ay - by * ax;
  if ((u < 0 || v < 0 || w < 0) && (u > 0 || v > 0 || w > 0)) return std::nullopt;
  const double det = u + v + w;
  if (det == 0.0) return std::nullopt;

  const double t_scaled = u * (sz * A[kz]) + v * (sz * B[kz]) + w * (sz * C[kz]);
  const double t = t_scaled / det;
  if (!(t > 0.0) || t > t_max) return std::nullopt;
  return t;
}

}  // namespace camnet
