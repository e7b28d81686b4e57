#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "silref/so3.h"

namespace silref {

using Triangle = std::array<int, 3>;

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;

  std::size_t NumVertices() const { return vertices.size(); }
  std::size_t NumTriangles() const { return triangles.size(); }
};

struct ObjLoadResult {
  TriangleMesh mesh;
  std::size_t dropped_degenerate = 0;
};

// Triangles with area at or below this are dropped at load time.
inline constexpr double kMinTriangleArea = 1e-12;

// Parses the `v` and `f` records of Wavefront OBJ. Polygons are
// fan-triangulated, negative indices resolved, and texture/normal
// sub-indices ignored. Other records are skipped.
ObjLoadResult ParseObj(std::istream& in);
ObjLoadResult LoadObj(const std::string& path);

void WriteObj(const TriangleMesh& mesh, std::ostream& out);
void SaveObj(const TriangleMesh& mesh, const std::string& path);

double TriangleArea(const Vec3& a, const Vec3& b, const Vec3& c);

TriangleMesh TransformVertices(const TriangleMesh& mesh, const Pose& pose);

/// Length of the axis-aligned bounding-box diagonal.
double Diagonal(const TriangleMesh& mesh);

// Every `stride`-th vertex starting at 0, for subsampled ADD.
std::vector<Vec3> StrideSubsample(const std::vector<Vec3>& vertices,
                                  std::size_t stride);

}  // namespace silref
