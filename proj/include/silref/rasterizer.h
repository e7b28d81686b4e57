#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "silref/image.h"
#include "silref/mesh.h"
#include "silref/so3.h"

namespace silref {

// Pixel (x, y) is sampled at its centre (x + 0.5, y + 0.5); image y grows
// downwards.
using ScreenTriangle = std::array<Vec2, 3>;

struct SoftRasterConfig {
  double sigma = 1.5;               // edge falloff, pixels
  double truncation_radius = 12.0;  // band half-width, pixels

  void Validate() const;
};

/// Point-in-triangle with a top-left fill rule: pixels exactly on a shared
/// edge are owned by exactly one of the two triangles. Either winding.
bool CoversPoint(const ScreenTriangle& tri, const Vec2& p);

// Squared distance from p to the triangle's boundary. Also reports the
// closest edge (i -> i+1) and the clamped segment parameter.
struct EdgeDistance {
  double squared = 0;
  int edge = 0;
  double s = 0;
};
EdgeDistance DistanceToBoundary(const ScreenTriangle& tri, const Vec2& p);

// Hard rasterization of screen-space triangles.
SilhouetteImage RasterizeScreenTriangles(std::span<const ScreenTriangle> tris,
                                         int width, int height);

struct ProjectedMesh {
  std::vector<Vec2> pixels;  // per vertex; unset for vertices behind z_near
  std::vector<bool> in_front;
  std::vector<int> kept_triangles;  // indices into mesh.triangles
};

// Projects every vertex, keeping triangles whose three vertices are in
// front of z_near. Throws NothingVisible if none are.
ProjectedMesh ProjectMesh(const TriangleMesh& camera_frame,
                          const CameraIntrinsics& k,
                          double z_near = kDefaultZNear);

/// Binary silhouette of a camera-frame mesh.
SilhouetteImage RasterizeHard(const TriangleMesh& camera_frame,
                              const CameraIntrinsics& k);

// d(alpha) / d(projected vertex) for one band pixel; the vertex ids follow
// the winding stored in the mesh triangle.
struct TapeEntry {
  std::uint32_t pixel = 0;
  int triangle = 0;
  std::array<Vec2, 3> d_alpha = {Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
};

struct GradientTape {
  int width = 0;
  int height = 0;
  std::size_t num_vertices = 0;
  std::size_t num_triangles = 0;
  std::vector<TapeEntry> entries;  // pixel-major order
};

struct SoftRender {
  SilhouetteImage image;
  GradientTape tape;
};

/**
 * Differentiable silhouette. Coverage of triangle f at pixel p is 1 inside
 * its projection and exp(-d^2 / sigma^2) outside, d being the distance to
 * the projected boundary, zero beyond the truncation radius. Pixels take the
 * max over triangles (ties go to the lowest triangle index). The tape holds
 * the gradient of the winning triangle for every exterior band pixel.
 */
SoftRender RasterizeSoft(const TriangleMesh& camera_frame,
                         const CameraIntrinsics& k,
                         const SoftRasterConfig& cfg = {});

// Coverage of a single screen triangle at p (the soft rule for one f).
double SoftCoverage(const ScreenTriangle& tri, const Vec2& p,
                    const SoftRasterConfig& cfg);

struct PoseGradient {
  Vec6 rotation6d = Vec6::Zero();
  Vec3 translation = Vec3::Zero();

  double SquaredNorm() const {
    return rotation6d.squaredNorm() + translation.squaredNorm();
  }
};

/// Chains per-pixel dL/dalpha through the tape, the pinhole projection and
/// the rigid transform to the 6d rotation and translation parameters.
/// `pose.rotation` must equal Rot6dToMatrix(a).
PoseGradient BackpropToPose(const GradientTape& tape,
                            std::span<const double> upstream,
                            const TriangleMesh& model, const Pose& pose,
                            const CameraIntrinsics& k, const Rotation6D& a);

}  // namespace silref
