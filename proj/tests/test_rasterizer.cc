#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "silref/rasterizer.h"
#include "silref/scene.h"
#include "test_util.h"

namespace silref {
namespace {

// Unit focal length, principal point at the origin: a camera-frame vertex
// (x, y, 1) lands exactly on pixel coordinates (x, y).
CameraIntrinsics PixelCamera(int width, int height) {
  CameraIntrinsics k;
  k.fx = k.fy = 1.0;
  k.cx = k.cy = 0.0;
  k.width = width;
  k.height = height;
  return k;
}

TriangleMesh ScreenMesh(const std::vector<ScreenTriangle>& tris) {
  TriangleMesh m;
  for (const ScreenTriangle& t : tris) {
    const int base = static_cast<int>(m.vertices.size());
    for (const Vec2& p : t) m.vertices.emplace_back(p.x(), p.y(), 1.0);
    m.triangles.push_back({base, base + 1, base + 2});
  }
  return m;
}

// Strict interior test via barycentric signs, independent of the fill rule.
bool InsideOracle(const ScreenTriangle& t, const Vec2& p) {
  auto cross = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  };
  const double d0 = cross(t[0], t[1], p);
  const double d1 = cross(t[1], t[2], p);
  const double d2 = cross(t[2], t[0], p);
  return (d0 > 0 && d1 > 0 && d2 > 0) || (d0 < 0 && d1 < 0 && d2 < 0);
}

double SegmentDistanceOracle(const Vec2& a, const Vec2& b, const Vec2& p) {
  // Minimum over a dense parameter sweep refined by ternary search.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if ((a + m1 * (b - a) - p).norm() < (a + m2 * (b - a) - p).norm()) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return (a + 0.5 * (lo + hi) * (b - a) - p).norm();
}

TEST(HardRaster, CoverageMatchesBruteForce) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> px(-10.0, 90.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<ScreenTriangle> tris;
    for (int i = 0; i < 6; ++i) {
      tris.push_back({Vec2(px(rng), px(rng)), Vec2(px(rng), px(rng)),
                      Vec2(px(rng), px(rng))});
    }
    const SilhouetteImage img = RasterizeScreenTriangles(tris, 80, 80);
    std::size_t expected = 0;
    for (int y = 0; y < 80; ++y) {
      for (int x = 0; x < 80; ++x) {
        bool any = false;
        for (const ScreenTriangle& t : tris) any |= InsideOracle(t, Vec2(x + 0.5, y + 0.5));
        expected += any;
        ASSERT_EQ(img(x, y), any ? 1.0 : 0.0) << x << "," << y;
      }
    }
    EXPECT_EQ(img.Count(0.5), expected);
  }
}

TEST(HardRaster, SharedEdgesAreWatertight) {
  // A square split along its diagonal; the diagonal and the outer edges pass
  // through pixel centres. Every centre strictly inside or on a shared edge
  // is covered by exactly one of the two triangles.
  const Vec2 a(0.5, 0.5), b(8.5, 0.5), c(8.5, 8.5), d(0.5, 8.5);
  const ScreenTriangle t1{a, b, c};
  const ScreenTriangle t2{a, c, d};
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      const Vec2 p(x + 0.5, y + 0.5);
      const int hits = CoversPoint(t1, p) + CoversPoint(t2, p);
      EXPECT_LE(hits, 1) << x << "," << y;
      if (x >= 1 && x <= 7 && y >= 1 && y <= 7) {
        EXPECT_EQ(hits, 1) << x << "," << y;
      }
    }
  }
}

TEST(HardRaster, TopLeftRule) {
  // Axis-aligned square with corners on pixel centres: the top and left
  // edges are filled, the bottom and right edges are not.
  const ScreenTriangle t1{Vec2(0.5, 0.5), Vec2(4.5, 0.5), Vec2(4.5, 4.5)};
  const ScreenTriangle t2{Vec2(0.5, 0.5), Vec2(4.5, 4.5), Vec2(0.5, 4.5)};
  const std::vector<ScreenTriangle> tris = {t1, t2};
  const SilhouetteImage img = RasterizeScreenTriangles(tris, 6, 6);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) {
      const bool expect = x <= 3 && y <= 3;
      EXPECT_EQ(img(x, y), expect ? 1.0 : 0.0) << x << "," << y;
    }
  }
  // Orientation does not matter.
  const std::vector<ScreenTriangle> flipped = {{t1[0], t1[2], t1[1]}, {t2[0], t2[2], t2[1]}};
  const SilhouetteImage img2 = RasterizeScreenTriangles(flipped, 6, 6);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_EQ(img[i], img2[i]);
}

TEST(HardRaster, TetrahedronPixelCountMatchesOracle) {
  const TriangleMesh tet = MakeTetrahedron();
  Pose p;
  p.translation = Vec3(-0.3, -0.3, 3.0);
  const TriangleMesh posed = TransformVertices(tet, p);
  const CameraIntrinsics k = CameraIntrinsics::FromFov(64.69, 320, 240);
  const SilhouetteImage img = RasterizeHard(posed, k);
  std::vector<ScreenTriangle> tris;
  for (const Triangle& t : posed.triangles) {
    tris.push_back({ProjectPoint(posed.vertices[t[0]], k).pixel,
                    ProjectPoint(posed.vertices[t[1]], k).pixel,
                    ProjectPoint(posed.vertices[t[2]], k).pixel});
  }
  std::size_t expected = 0;
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      bool any = false;
      for (const ScreenTriangle& t : tris) any |= InsideOracle(t, Vec2(x + 0.5, y + 0.5));
      expected += any;
    }
  }
  EXPECT_GT(expected, 100u);
  EXPECT_EQ(img.Count(0.5), expected);
}

TEST(HardRaster, BehindCameraHandling) {
  const CameraIntrinsics k = CameraIntrinsics::FromFov(64.69, 320, 240);
  Pose behind;
  behind.translation = Vec3(0, 0, -5);
  EXPECT_THROW(RasterizeHard(TransformVertices(MakeCube(), behind), k), NothingVisible);
  EXPECT_THROW(RasterizeSoft(TransformVertices(MakeCube(), behind), k), NothingVisible);

  // Straddling z_near: triangles with a vertex behind are dropped.
  Pose straddle;
  straddle.translation = Vec3(-0.5, -0.5, -0.5);
  const ProjectedMesh pm = ProjectMesh(TransformVertices(MakeCube(), straddle), k);
  EXPECT_GT(pm.kept_triangles.size(), 0u);
  EXPECT_LT(pm.kept_triangles.size(), 12u);
}

TEST(SoftRaster, DefinitionValues) {
  const ScreenTriangle t{Vec2(10, 10), Vec2(40, 10), Vec2(10, 40)};
  const SoftRasterConfig cfg;
  EXPECT_EQ(SoftCoverage(t, Vec2(15, 15), cfg), 1.0);
  // Below the horizontal edge y = 10 by exactly sigma.
  EXPECT_NEAR(SoftCoverage(t, Vec2(20, 10 - cfg.sigma), cfg), std::exp(-1.0), 1e-15);
  EXPECT_EQ(SoftCoverage(t, Vec2(20, 10 - cfg.truncation_radius - 0.01), cfg), 0.0);
}

TEST(SoftRaster, DistanceMatchesOracle) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int trial = 0; trial < 300; ++trial) {
    const ScreenTriangle t{Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng))};
    const Vec2 p(u(rng), u(rng));
    double expect = 1e300;
    for (int e = 0; e < 3; ++e) {
      expect = std::min(expect, SegmentDistanceOracle(t[e], t[(e + 1) % 3], p));
    }
    ASSERT_NEAR(std::sqrt(DistanceToBoundary(t, p).squared), expect, 1e-9);
  }
}

TEST(SoftRaster, InteriorPixelsSaturateWithoutGradient) {
  const TriangleMesh m = ScreenMesh({{Vec2(5, 5), Vec2(60, 8), Vec2(12, 50)}});
  const SoftRender r = RasterizeSoft(m, PixelCamera(70, 60));
  EXPECT_EQ(r.image(20, 20), 1.0);
  for (const TapeEntry& e : r.tape.entries) {
    EXPECT_LE(r.image[e.pixel], 1.0);  // centres on an unfilled edge reach 1
    EXPECT_GT(r.image[e.pixel], 0.0);
  }
}

TEST(SoftRaster, MonotoneInDistance) {
  const ScreenTriangle t{Vec2(10, 10), Vec2(40, 12), Vec2(15, 40)};
  const SoftRasterConfig cfg;
  const Vec2 dir = Vec2(-1, -0.7).normalized();
  double prev = 2.0;
  for (double s = 0.0; s < 20.0; s += 0.05) {
    const double a = SoftCoverage(t, Vec2(10, 10) + s * dir, cfg);
    ASSERT_LE(a, prev);
    prev = a;
  }
}

TEST(SoftRaster, VertexGradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(15.0, 55.0);
  const CameraIntrinsics k = PixelCamera(70, 70);
  int checked = 0;
  while (checked < 200) {
    const ScreenTriangle tri{Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng))};
    const TriangleMesh m = ScreenMesh({tri});
    const SoftRender r = RasterizeSoft(m, k);
    if (r.tape.entries.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, r.tape.entries.size() - 1);
    const TapeEntry& e = r.tape.entries[pick(rng)];
    const int x = static_cast<int>(e.pixel % k.width);
    const int y = static_cast<int>(e.pixel / k.width);
    const double h = 1e-3;
    for (int v = 0; v < 3; ++v) {
      Vec2 numeric;
      for (int c = 0; c < 2; ++c) {
        ScreenTriangle tp = tri, tm = tri;
        tp[v][c] += h;
        tm[v][c] -= h;
        const Vec2 p(x + 0.5, y + 0.5);
        numeric[c] = (SoftCoverage(tp, p, {}) - SoftCoverage(tm, p, {})) / (2 * h);
      }
      // Components far below the gradient's own scale are compared absolutely.
      const double scale = std::max(numeric.norm(), e.d_alpha[v].norm());
      ASSERT_LT(test::MaxRelError(e.d_alpha[v], numeric, 1e-3 * scale + 1e-12), 1e-3)
          << "pixel " << x << "," << y << " vertex " << v;
    }
    ++checked;
  }
}

TEST(SoftRaster, ThresholdMatchesHardOffTheBand) {
  const DeskScene scene = MakeDeskScene();
  const TriangleMesh posed = TransformVertices(scene.mesh, scene.gt_pose);
  const SoftRasterConfig cfg;
  const SilhouetteImage hard = RasterizeHard(posed, scene.camera);
  const SilhouetteImage soft = RasterizeSoft(posed, scene.camera, cfg).image;
  const ProjectedMesh pm = ProjectMesh(posed, scene.camera);
  int differing = 0;
  for (int y = 0; y < hard.height(); ++y) {
    for (int x = 0; x < hard.width(); ++x) {
      const bool h = hard(x, y) >= 0.5;
      const bool s = soft(x, y) >= 0.5;
      if (h == s) continue;
      ++differing;
      double nearest = 1e300;
      for (int f : pm.kept_triangles) {
        const Triangle& t = posed.triangles[f];
        const ScreenTriangle st{pm.pixels[t[0]], pm.pixels[t[1]], pm.pixels[t[2]]};
        nearest = std::min(nearest, DistanceToBoundary(st, Vec2(x + 0.5, y + 0.5)).squared);
      }
      ASSERT_LE(std::sqrt(nearest), cfg.truncation_radius) << x << "," << y;
    }
  }
  EXPECT_GT(differing, 0);
}

TEST(SoftRaster, Deterministic) {
  const DeskScene scene = MakeDeskScene();
  const TriangleMesh posed = TransformVertices(scene.mesh, scene.gt_pose);
  const SoftRender a = RasterizeSoft(posed, scene.camera);
  const SoftRender b = RasterizeSoft(posed, scene.camera);
  ASSERT_EQ(a.tape.entries.size(), b.tape.entries.size());
  for (std::size_t i = 0; i < a.image.size(); ++i) ASSERT_EQ(a.image[i], b.image[i]);
  for (std::size_t i = 0; i < a.tape.entries.size(); ++i) {
    ASSERT_EQ(a.tape.entries[i].pixel, b.tape.entries[i].pixel);
    if (i > 0) {
      ASSERT_LT(a.tape.entries[i - 1].pixel, a.tape.entries[i].pixel);
    }
  }
}

TEST(SoftRaster, ConfigValidation) {
  SoftRasterConfig cfg;
  cfg.sigma = 0.0;
  EXPECT_THROW(cfg.Validate(), InvalidConfig);
  cfg.sigma = 2.0;
  cfg.truncation_radius = 3.0;
  EXPECT_THROW(cfg.Validate(), InvalidConfig);
}

TEST(Backprop, ZeroUpstreamAndStaleTape) {
  const DeskScene scene = MakeDeskScene();
  const TriangleMesh posed = TransformVertices(scene.mesh, scene.gt_pose);
  const SoftRender r = RasterizeSoft(posed, scene.camera);
  const Rotation6D a = MatrixToRot6d(scene.gt_pose.rotation);
  const std::vector<double> zeros(r.image.size(), 0.0);
  const PoseGradient g =
      BackpropToPose(r.tape, zeros, scene.mesh, scene.gt_pose, scene.camera, a);
  EXPECT_EQ(g.SquaredNorm(), 0.0);
  EXPECT_THROW(BackpropToPose(r.tape, zeros, MakeCube(), scene.gt_pose, scene.camera, a),
               StaleTape);
  EXPECT_THROW(BackpropToPose(r.tape, std::vector<double>(5, 0.0), scene.mesh,
                              scene.gt_pose, scene.camera, a),
               DimensionMismatch);
}

// L = sum_p w_p alpha_p for fixed random weights, on a convex object.
TEST(Backprop, LinearFunctionalMatchesFiniteDifferences) {
  const CameraIntrinsics k = CameraIntrinsics::FromFov(64.69, 320, 240);
  const TriangleMesh cube = MakeCube(0.3);
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  std::vector<double> weights(static_cast<std::size_t>(k.width) * k.height);
  for (double& v : weights) v = w(rng);

  Pose pose;
  pose.rotation = test::Rodrigues(Vec3(1, 2, 0.5), 0.6);
  pose.translation = Vec3(-0.1, -0.05, 1.5);
  const Rotation6D a = MatrixToRot6d(pose.rotation);
  auto loss = [&](const Rotation6D& aa, const Vec3& t) {
    const SoftRender r = RasterizeSoft(TransformVertices(cube, {Rot6dToMatrix(aa), t}), k);
    double s = 0.0;
    for (std::size_t i = 0; i < r.image.size(); ++i) s += weights[i] * r.image[i];
    return s;
  };
  const SoftRender r = RasterizeSoft(TransformVertices(cube, pose), k);
  const PoseGradient g = BackpropToPose(r.tape, weights, cube, pose, k, a);

  const double h = 1e-4;
  Vec3 numeric_t;
  for (int i = 0; i < 3; ++i) {
    Vec3 tp = pose.translation, tm = pose.translation;
    tp[i] += h;
    tm[i] -= h;
    numeric_t[i] = (loss(a, tp) - loss(a, tm)) / (2 * h);
  }
  EXPECT_LT(test::MaxRelError(g.translation, numeric_t), 1e-2);

  Vec6 numeric_a;
  for (int i = 0; i < 6; ++i) {
    Rotation6D ap = a, am = a;
    ap.values[i] += h;
    am.values[i] -= h;
    numeric_a[i] = (loss(ap, pose.translation) - loss(am, pose.translation)) / (2 * h);
  }
  int within = 0;
  for (int i = 0; i < 6; ++i) {
    const double denom = std::max(
        {std::abs(g.rotation6d[i]), std::abs(numeric_a[i]), 1e-3 * numeric_a.cwiseAbs().maxCoeff()});
    within += std::abs(g.rotation6d[i] - numeric_a[i]) / denom <= 1e-2;
  }
  EXPECT_EQ(within, 6);
}

}  // namespace
}  // namespace silref
