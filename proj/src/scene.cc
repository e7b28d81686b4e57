#include "silref/scene.h"

#include <cmath>
#include <numbers>

namespace silref {
namespace {

void AddQuad(TriangleMesh& m, int a, int b, int c, int d) {
  m.triangles.push_back({a, b, c});
  m.triangles.push_back({a, c, d});
}

// Box spanned by `center +- half` along the columns of `axes`.
void AddBox(TriangleMesh& m, const Vec3& center, const Vec3& half,
            const Mat3& axes = Mat3::Identity()) {
  const int base = static_cast<int>(m.vertices.size());
  for (int i = 0; i < 8; ++i) {
    const Vec3 s((i & 1) ? 1 : -1, (i & 2) ? 1 : -1, (i & 4) ? 1 : -1);
    m.vertices.push_back(center + axes * s.cwiseProduct(half));
  }
  AddQuad(m, base + 0, base + 1, base + 3, base + 2);  // z-
  AddQuad(m, base + 4, base + 6, base + 7, base + 5);  // z+
  AddQuad(m, base + 0, base + 4, base + 5, base + 1);  // y-
  AddQuad(m, base + 2, base + 3, base + 7, base + 6);  // y+
  AddQuad(m, base + 0, base + 2, base + 6, base + 4);  // x-
  AddQuad(m, base + 1, base + 5, base + 7, base + 3);  // x+
}

// Box of square cross-section running from a to b.
void AddBeam(TriangleMesh& m, const Vec3& a, const Vec3& b, double half_w,
             double half_h) {
  const Vec3 dir = (b - a).normalized();
  const Vec3 up = Vec3::UnitY();
  const Vec3 side = dir.cross(up).normalized();
  Mat3 axes;
  axes.col(0) = dir;
  axes.col(1) = up;
  axes.col(2) = side;
  AddBox(m, 0.5 * (a + b), Vec3(0.5 * (b - a).norm(), half_h, half_w), axes);
}

// Vertical (y) prism with `sides` facets and capped ends.
void AddPrism(TriangleMesh& m, const Vec3& center, double radius,
              double half_h, int sides) {
  const int base = static_cast<int>(m.vertices.size());
  for (int ring = 0; ring < 2; ++ring) {
    const double y = center.y() + (ring == 0 ? -half_h : half_h);
    for (int i = 0; i < sides; ++i) {
      const double phi = 2.0 * std::numbers::pi * i / sides;
      m.vertices.emplace_back(center.x() + radius * std::cos(phi), y,
                              center.z() + radius * std::sin(phi));
    }
  }
  for (int i = 0; i < sides; ++i) {
    const int j = (i + 1) % sides;
    AddQuad(m, base + i, base + j, base + sides + j, base + sides + i);
  }
  for (int i = 1; i + 1 < sides; ++i) {
    m.triangles.push_back({base, base + i + 1, base + i});
    m.triangles.push_back({base + sides, base + sides + i, base + sides + i + 1});
  }
}

Mat3 RotX(double deg) {
  return ExpSO3(Vec3(deg * std::numbers::pi / 180.0, 0, 0));
}
Mat3 RotY(double deg) {
  return ExpSO3(Vec3(0, deg * std::numbers::pi / 180.0, 0));
}

}  // namespace

TriangleMesh MakeTetrahedron() {
  TriangleMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  m.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  return m;
}

TriangleMesh MakeCube(double side) {
  TriangleMesh m;
  AddBox(m, Vec3::Constant(0.5 * side), Vec3::Constant(0.5 * side));
  return m;
}

TriangleMesh MakeQuadcopterMesh() {
  TriangleMesh m;
  // Body, longer along z (forward).
  AddBox(m, Vec3(0, 0, 0), Vec3(0.055, 0.035, 0.11));
  // Arms out to the motors; front arms splay wider than the rear ones.
  const Vec3 motors[4] = {Vec3(0.15, -0.02, 0.12), Vec3(-0.15, -0.02, 0.12),
                          Vec3(0.13, -0.01, -0.13), Vec3(-0.13, -0.01, -0.13)};
  for (const Vec3& motor : motors) {
    const Vec3 root(std::copysign(0.04, motor.x()), motor.y(),
                    std::copysign(0.07, motor.z()));
    AddBeam(m, root, motor, 0.012, 0.01);
    AddPrism(m, motor + Vec3(0, -0.012, 0), 0.028, 0.016, 8);
  }
  // Gimbal camera under the nose.
  AddBox(m, Vec3(0, 0.05, 0.11), Vec3(0.025, 0.02, 0.025));
  // Skids.
  AddBox(m, Vec3(0.045, 0.06, -0.01), Vec3(0.008, 0.025, 0.06));
  AddBox(m, Vec3(-0.045, 0.06, -0.01), Vec3(0.008, 0.025, 0.06));
  return m;
}

CameraIntrinsics ExocentricCamera() {
  return CameraIntrinsics::FromFov(64.69, 320, 240);
}

DeskScene MakeDeskScene() {
  DeskScene scene;
  scene.mesh = MakeQuadcopterMesh();
  scene.camera = ExocentricCamera();
  // Tilted towards the camera so the top surface is visible.
  scene.gt_pose.rotation = RotX(35.0) * RotY(25.0);
  scene.gt_pose.translation = Vec3(0.04, 0.02, 1.2);
  return scene;
}

}  // namespace silref
