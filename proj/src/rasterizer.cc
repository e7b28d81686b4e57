#include "silref/rasterizer.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace silref {
namespace {

// Edge function (b - a) x (p - a), evaluated from a canonical endpoint so
// that two triangles sharing an edge get exactly negated values.
double EdgeFunction(const Vec2& a, const Vec2& b, const Vec2& p) {
  const bool swap = b.x() < a.x() || (b.x() == a.x() && b.y() < a.y());
  const Vec2& o = swap ? b : a;
  const Vec2& e = swap ? a : b;
  const double v =
      (e.x() - o.x()) * (p.y() - o.y()) - (e.y() - o.y()) * (p.x() - o.x());
  return swap ? -v : v;
}

double SignedArea2(const ScreenTriangle& t) {
  return (t[1].x() - t[0].x()) * (t[2].y() - t[0].y()) -
         (t[1].y() - t[0].y()) * (t[2].x() - t[0].x());
}

// With positive orientation in y-down pixel space, the top edge runs in +x
// and left edges run in -y.
bool IsTopLeft(const Vec2& a, const Vec2& b) {
  const double dx = b.x() - a.x();
  const double dy = b.y() - a.y();
  return (dy == 0.0 && dx > 0.0) || dy < 0.0;
}

bool EdgeAccepts(const Vec2& a, const Vec2& b, const Vec2& p) {
  const double e = EdgeFunction(a, b, p);
  return e > 0.0 || (e == 0.0 && IsTopLeft(a, b));
}

struct PixelBox {
  int x0, x1, y0, y1;  // inclusive; empty when x0 > x1 or y0 > y1
};

PixelBox BoundsOf(const ScreenTriangle& t, double margin, int width,
                  int height) {
  double lo_x = std::min({t[0].x(), t[1].x(), t[2].x()}) - margin;
  double hi_x = std::max({t[0].x(), t[1].x(), t[2].x()}) + margin;
  double lo_y = std::min({t[0].y(), t[1].y(), t[2].y()}) - margin;
  double hi_y = std::max({t[0].y(), t[1].y(), t[2].y()}) + margin;
  // Centres at i + 0.5; clamp in double before converting.
  auto to_lo = [](double v, int n) {
    return static_cast<int>(std::clamp(std::floor(v - 0.5), -1.0, double(n)));
  };
  auto to_hi = [](double v, int n) {
    return static_cast<int>(std::clamp(std::ceil(v - 0.5), -1.0, double(n)));
  };
  PixelBox box{to_lo(lo_x, width), to_hi(hi_x, width), to_lo(lo_y, height),
               to_hi(hi_y, height)};
  box.x0 = std::max(box.x0, 0);
  box.y0 = std::max(box.y0, 0);
  box.x1 = std::min(box.x1, width - 1);
  box.y1 = std::min(box.y1, height - 1);
  return box;
}

Vec2 PixelCenter(int x, int y) { return Vec2(x + 0.5, y + 0.5); }

ScreenTriangle TriangleOf(const ProjectedMesh& pm, const Triangle& tri) {
  return {pm.pixels[tri[0]], pm.pixels[tri[1]], pm.pixels[tri[2]]};
}

}  // namespace

void SoftRasterConfig::Validate() const {
  if (!(sigma > 0.0) || !(truncation_radius >= 2.0 * sigma)) {
    throw InvalidConfig("soft raster needs sigma > 0 and radius >= 2 sigma");
  }
}

bool CoversPoint(const ScreenTriangle& tri, const Vec2& p) {
  const double area = SignedArea2(tri);
  if (area == 0.0) return false;
  const Vec2& a = tri[0];
  const Vec2& b = area > 0 ? tri[1] : tri[2];
  const Vec2& c = area > 0 ? tri[2] : tri[1];
  return EdgeAccepts(a, b, p) && EdgeAccepts(b, c, p) && EdgeAccepts(c, a, p);
}

EdgeDistance DistanceToBoundary(const ScreenTriangle& tri, const Vec2& p) {
  EdgeDistance best;
  best.squared = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const Vec2& a = tri[i];
    const Vec2& b = tri[(i + 1) % 3];
    const Vec2 e = b - a;
    const double len2 = e.squaredNorm();
    double s = len2 > 0.0 ? (p - a).dot(e) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    const double d2 = (p - (a + s * e)).squaredNorm();
    if (d2 < best.squared) {
      best = {d2, i, s};
    }
  }
  return best;
}

double SoftCoverage(const ScreenTriangle& tri, const Vec2& p,
                    const SoftRasterConfig& cfg) {
  if (CoversPoint(tri, p)) return 1.0;
  const double d2 = DistanceToBoundary(tri, p).squared;
  if (d2 > cfg.truncation_radius * cfg.truncation_radius) return 0.0;
  return std::exp(-d2 / (cfg.sigma * cfg.sigma));
}

SilhouetteImage RasterizeScreenTriangles(std::span<const ScreenTriangle> tris,
                                         int width, int height) {
  SilhouetteImage image(width, height);
  for (const ScreenTriangle& t : tris) {
    const PixelBox box = BoundsOf(t, 0.0, width, height);
    for (int y = box.y0; y <= box.y1; ++y) {
      for (int x = box.x0; x <= box.x1; ++x) {
        if (CoversPoint(t, PixelCenter(x, y))) image(x, y) = 1.0;
      }
    }
  }
  return image;
}

ProjectedMesh ProjectMesh(const TriangleMesh& camera_frame,
                          const CameraIntrinsics& k, double z_near) {
  k.Validate();
  ProjectedMesh pm;
  const std::size_t n = camera_frame.NumVertices();
  pm.pixels.assign(n, Vec2::Zero());
  pm.in_front.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& v = camera_frame.vertices[i];
    if (v.z() > z_near) {
      pm.pixels[i] = ProjectPoint(v, k, z_near).pixel;
      pm.in_front[i] = true;
    }
  }
  for (std::size_t f = 0; f < camera_frame.NumTriangles(); ++f) {
    const Triangle& tri = camera_frame.triangles[f];
    if (pm.in_front[tri[0]] && pm.in_front[tri[1]] && pm.in_front[tri[2]]) {
      pm.kept_triangles.push_back(static_cast<int>(f));
    }
  }
  if (pm.kept_triangles.empty()) {
    throw NothingVisible("nothing visible: every triangle is behind z_near");
  }
  return pm;
}

SilhouetteImage RasterizeHard(const TriangleMesh& camera_frame,
                              const CameraIntrinsics& k) {
  const ProjectedMesh pm = ProjectMesh(camera_frame, k);
  std::vector<ScreenTriangle> tris;
  tris.reserve(pm.kept_triangles.size());
  for (int f : pm.kept_triangles) {
    tris.push_back(TriangleOf(pm, camera_frame.triangles[f]));
  }
  return RasterizeScreenTriangles(tris, k.width, k.height);
}

SoftRender RasterizeSoft(const TriangleMesh& camera_frame,
                         const CameraIntrinsics& k,
                         const SoftRasterConfig& cfg) {
  cfg.Validate();
  const ProjectedMesh pm = ProjectMesh(camera_frame, k);
  const double radius2 = cfg.truncation_radius * cfg.truncation_radius;
  const double inv_sigma2 = 1.0 / (cfg.sigma * cfg.sigma);

  SoftRender out;
  out.image = SilhouetteImage(k.width, k.height);
  std::vector<int> winner(out.image.size(), -1);
  std::vector<char> inside(out.image.size(), 0);

  for (int f : pm.kept_triangles) {
    const ScreenTriangle t = TriangleOf(pm, camera_frame.triangles[f]);
    const PixelBox box =
        BoundsOf(t, cfg.truncation_radius, k.width, k.height);
    for (int y = box.y0; y <= box.y1; ++y) {
      for (int x = box.x0; x <= box.x1; ++x) {
        const std::size_t idx = out.image.Index(x, y);
        if (inside[idx]) continue;  // already saturated
        const Vec2 p = PixelCenter(x, y);
        if (CoversPoint(t, p)) {
          out.image[idx] = 1.0;
          winner[idx] = f;
          inside[idx] = 1;
          continue;
        }
        const double d2 = DistanceToBoundary(t, p).squared;
        if (d2 > radius2) continue;
        const double c = std::exp(-d2 * inv_sigma2);
        if (c > out.image[idx]) {
          out.image[idx] = c;
          winner[idx] = f;
        }
      }
    }
  }

  GradientTape& tape = out.tape;
  tape.width = k.width;
  tape.height = k.height;
  tape.num_vertices = camera_frame.NumVertices();
  tape.num_triangles = camera_frame.NumTriangles();
  for (std::size_t idx = 0; idx < out.image.size(); ++idx) {
    if (inside[idx] || winner[idx] < 0) continue;
    const int f = winner[idx];
    const ScreenTriangle t = TriangleOf(pm, camera_frame.triangles[f]);
    const int x = static_cast<int>(idx % k.width);
    const int y = static_cast<int>(idx / k.width);
    const Vec2 p = PixelCenter(x, y);
    const EdgeDistance ed = DistanceToBoundary(t, p);
    const int i = ed.edge;
    const int j = (i + 1) % 3;
    const Vec2 r = p - (t[i] + ed.s * (t[j] - t[i]));
    // c = exp(-d^2 / s^2), d^2 = |p - q|^2 with q on edge (i, j); the
    // segment parameter is stationary so only q's explicit dependence counts.
    const double scale = 2.0 * out.image[idx] * inv_sigma2;
    TapeEntry e;
    e.pixel = static_cast<std::uint32_t>(idx);
    e.triangle = f;
    e.d_alpha[i] = scale * (1.0 - ed.s) * r;
    e.d_alpha[j] = scale * ed.s * r;
    tape.entries.push_back(e);
  }
  return out;
}

PoseGradient BackpropToPose(const GradientTape& tape,
                            std::span<const double> upstream,
                            const TriangleMesh& model, const Pose& pose,
                            const CameraIntrinsics& k, const Rotation6D& a) {
  if (tape.num_vertices != model.NumVertices() ||
      tape.num_triangles != model.NumTriangles()) {
    throw StaleTape("gradient tape does not match the mesh");
  }
  if (upstream.size() !=
      static_cast<std::size_t>(tape.width) * static_cast<std::size_t>(tape.height)) {
    throw DimensionMismatch("upstream gradient size differs from the tape");
  }

  std::vector<Vec2> vertex_grad(model.NumVertices(), Vec2::Zero());
  std::vector<char> touched(model.NumVertices(), 0);
  for (const TapeEntry& e : tape.entries) {
    const double u = upstream[e.pixel];
    if (u == 0.0) continue;
    const Triangle& tri = model.triangles[e.triangle];
    for (int c = 0; c < 3; ++c) {
      vertex_grad[tri[c]] += u * e.d_alpha[c];
      touched[tri[c]] = 1;
    }
  }

  PoseGradient g;
  Mat3 d_rotation = Mat3::Zero();
  for (std::size_t v = 0; v < model.NumVertices(); ++v) {
    if (!touched[v]) continue;
    const Vec3& xm = model.vertices[v];
    const Projection proj = ProjectPoint(pose * xm, k);
    const Vec3 d_cam = proj.jacobian.transpose() * vertex_grad[v];
    g.translation += d_cam;
    d_rotation += d_cam * xm.transpose();
  }
  g.rotation6d = Rot6dGradient(a, d_rotation);
  return g;
}

}  // namespace silref
