#include "silref/mesh.h"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace silref {
namespace {

int ResolveIndex(const std::string& token, std::size_t num_vertices,
                 std::size_t line) {
  // "7", "7/1", "7//3", "7/1/3": only the leading position index counts.
  const std::string head = token.substr(0, token.find('/'));
  long value = 0;
  const auto* first = head.data();
  const auto* last = head.data() + head.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (head.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("bad face index '" + token + "'", line);
  }
  long resolved = 0;
  if (value > 0) {
    resolved = value - 1;
  } else if (value < 0) {
    resolved = static_cast<long>(num_vertices) + value;
  } else {
    throw ParseError("face index 0 is invalid", line);
  }
  if (resolved < 0 || resolved >= static_cast<long>(num_vertices)) {
    throw ParseError("face index " + token + " out of range", line);
  }
  return static_cast<int>(resolved);
}

}  // namespace

double TriangleArea(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

ObjLoadResult ParseObj(std::istream& in) {
  ObjLoadResult result;
  TriangleMesh& mesh = result.mesh;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ss >> v.x() >> v.y() >> v.z()) || !v.allFinite()) {
        throw ParseError("vertex needs three finite coordinates", line_no);
      }
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string token;
      while (ss >> token) {
        poly.push_back(ResolveIndex(token, mesh.vertices.size(), line_no));
      }
      if (poly.size() < 3) {
        throw ParseError("face needs at least three vertices", line_no);
      }
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        const Triangle tri{poly[0], poly[i], poly[i + 1]};
        const double area =
            TriangleArea(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                         mesh.vertices[tri[2]]);
        if (area > kMinTriangleArea) {
          mesh.triangles.push_back(tri);
        } else {
          ++result.dropped_degenerate;
        }
      }
    }
  }
  if (mesh.triangles.empty() || mesh.vertices.size() < 3) {
    throw EmptyMesh("no valid triangle in OBJ input");
  }
  return result;
}

ObjLoadResult LoadObj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh '" + path + "'");
  return ParseObj(in);
}

void WriteObj(const TriangleMesh& mesh, std::ostream& out) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const Vec3& v : mesh.vertices) {
    out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  for (const Triangle& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

void SaveObj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh '" + path + "'");
  WriteObj(mesh, out);
}

TriangleMesh TransformVertices(const TriangleMesh& mesh, const Pose& pose) {
  TriangleMesh out;
  out.triangles = mesh.triangles;
  out.vertices.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) {
    out.vertices.push_back(pose.rotation * v + pose.translation);
  }
  return out;
}

double Diagonal(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) throw EmptyMesh("diagonal of empty mesh");
  Vec3 lo = mesh.vertices.front();
  Vec3 hi = lo;
  for (const Vec3& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

std::vector<Vec3> StrideSubsample(const std::vector<Vec3>& vertices,
                                  std::size_t stride) {
  if (stride == 0) throw InvalidConfig("stride must be >= 1");
  std::vector<Vec3> out;
  out.reserve(vertices.size() / stride + 1);
  for (std::size_t i = 0; i < vertices.size(); i += stride) {
    out.push_back(vertices[i]);
  }
  return out;
}

}  // namespace silref
