#include "silref/analysis.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "silref/rasterizer.h"

namespace silref {
namespace {

std::vector<double> AxisSamples(const GridAxis& axis) {
  if (axis.steps < 1 || axis.steps % 2 == 0 || !(axis.range >= 0.0)) {
    throw InvalidConfig("grid axes need an odd step count and range >= 0");
  }
  std::vector<double> out(axis.steps);
  const int h = axis.steps / 2;
  for (int i = 0; i < axis.steps; ++i) {
    // Mirror exactly around zero.
    out[i] = h == 0 ? 0.0 : axis.range * double(i - h) / double(h);
  }
  return out;
}

std::vector<Vec3> Product3(const std::vector<double>& s) {
  std::vector<Vec3> out;
  out.reserve(s.size() * s.size() * s.size());
  for (double x : s) {
    for (double y : s) {
      for (double z : s) out.emplace_back(x, y, z);
    }
  }
  return out;
}

int BinOf(double value, double max_value, int bins) {
  if (!(max_value > 0.0)) return 0;
  const int b = static_cast<int>(std::floor(value / max_value * bins));
  return std::clamp(b, 0, bins - 1);
}

template <typename Fn>
void ParallelFor(std::size_t n, int threads, Fn fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace

LandscapeGrid LandscapeGrid::Build(const LandscapeGridConfig& cfg) {
  if (cfg.bins_translation < 1 || cfg.bins_rotation < 1) {
    throw InvalidConfig("need at least one bin per axis");
  }
  LandscapeGrid grid;
  grid.translation_offsets = Product3(AxisSamples(cfg.translation));
  grid.rotation_offsets = Product3(AxisSamples(cfg.rotation));
  grid.bins_translation = cfg.bins_translation;
  grid.bins_rotation = cfg.bins_rotation;
  grid.max_translation = std::sqrt(3.0) * cfg.translation.range;
  grid.max_rotation = std::sqrt(3.0) * cfg.rotation.range;

  const std::size_t total = grid.ProductSize();
  const std::size_t zero =
      (grid.rotation_offsets.size() / 2) * grid.translation_offsets.size() +
      grid.translation_offsets.size() / 2;
  if (cfg.sample_budget >= total) {
    grid.samples.resize(total);
    std::iota(grid.samples.begin(), grid.samples.end(), 0);
    return grid;
  }
  if (cfg.sample_budget < 1) throw InvalidConfig("sample budget must be >= 1");
  std::vector<std::size_t> others;
  others.reserve(total - 1);
  for (std::size_t i = 0; i < total; ++i) {
    if (i != zero) others.push_back(i);
  }
  std::mt19937_64 rng(cfg.seed);
  grid.samples.push_back(zero);
  std::sample(others.begin(), others.end(), std::back_inserter(grid.samples),
              cfg.sample_budget - 1, rng);
  std::sort(grid.samples.begin(), grid.samples.end());
  return grid;
}

int LandscapeGrid::TranslationBin(const Vec3& dt) const {
  return BinOf(dt.norm(), max_translation, bins_translation);
}

int LandscapeGrid::RotationBin(const Vec3& dtheta) const {
  return BinOf(dtheta.norm(), max_rotation, bins_rotation);
}

double BinnedLossSurface::Mean(int r, int t) const {
  const std::size_t c = Count(r, t);
  return c == 0 ? std::numeric_limits<double>::quiet_NaN() : Sum(r, t) / c;
}

SilhouetteImage RenderHardOrEmpty(const TriangleMesh& mesh,
                                  const CameraIntrinsics& k, const Pose& pose) {
  try {
    return RasterizeHard(TransformVertices(mesh, pose), k);
  } catch (const NothingVisible&) {
    return SilhouetteImage(k.width, k.height);
  }
}

std::vector<BinnedLossSurface> LandscapeSweep(
    const TriangleMesh& mesh, const CameraIntrinsics& k, const Pose& gt_pose,
    const LandscapeGrid& grid,
    const std::vector<SilhouetteObjective>& objectives, int threads) {
  const std::size_t n = grid.samples.size();
  const std::size_t m = objectives.size();
  for (const SilhouetteObjective& obj : objectives) {
    if (obj.target().Count() == 0) {
      throw EmptyMask("landscape sweep needs a non-empty gt silhouette");
    }
  }
  std::vector<double> raw(n * m);
  ParallelFor(n, threads, [&](std::size_t i) {
    const std::size_t s = grid.samples[i];
    Pose displaced;
    displaced.rotation = ExpSO3(grid.RotationOf(s)) * gt_pose.rotation;
    displaced.translation = gt_pose.translation + grid.TranslationOf(s);
    const SilhouetteImage sil = RenderHardOrEmpty(mesh, k, displaced);
    for (std::size_t j = 0; j < m; ++j) raw[j * n + i] = objectives[j].Value(sil);
  });

  std::vector<BinnedLossSurface> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    BinnedLossSurface& surf = out[j];
    surf.kind = objectives[j].kind();
    surf.bins_rotation = grid.bins_rotation;
    surf.bins_translation = grid.bins_translation;
    const std::size_t cells =
        static_cast<std::size_t>(grid.bins_rotation) * grid.bins_translation;
    surf.sum.assign(cells, 0.0);
    surf.count.assign(cells, 0);
    surf.raw.assign(raw.begin() + j * n, raw.begin() + (j + 1) * n);
    const auto [lo, hi] = std::minmax_element(surf.raw.begin(), surf.raw.end());
    surf.raw_min = *lo;
    surf.raw_max = *hi;
    surf.degenerate = !(surf.raw_max > surf.raw_min);
    surf.normalized.assign(n, 0.0);
    const double span = surf.raw_max - surf.raw_min;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t s = grid.samples[i];
      if (!surf.degenerate) {
        surf.normalized[i] =
            std::clamp((surf.raw[i] - surf.raw_min) / span, 0.0, 1.0);
      }
      const int r = grid.RotationBin(grid.RotationOf(s));
      const int t = grid.TranslationBin(grid.TranslationOf(s));
      surf.sum[r * grid.bins_translation + t] += surf.normalized[i];
      surf.count[r * grid.bins_translation + t] += 1;
    }
  }
  return out;
}

std::size_t DistinctLevelsAlongRotation(const BinnedLossSurface& surface,
                                        int levels) {
  if (levels < 2) throw InvalidConfig("need at least 2 quantization levels");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int r = 0; r < surface.bins_rotation; ++r) {
    for (int t = 0; t < surface.bins_translation; ++t) {
      if (surface.Count(r, t) == 0) continue;
      lo = std::min(lo, surface.Mean(r, t));
      hi = std::max(hi, surface.Mean(r, t));
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::size_t total = 0;
  for (int t = 0; t < surface.bins_translation; ++t) {
    std::set<long> seen;
    for (int r = 0; r < surface.bins_rotation; ++r) {
      if (surface.Count(r, t) == 0) continue;
      seen.insert(std::lround((surface.Mean(r, t) - lo) / span * (levels - 1)));
    }
    total += seen.size();
  }
  return total;
}

std::vector<LerpRow> InterpolationExperiment(
    const TriangleMesh& mesh, const CameraIntrinsics& k, const Pose& gt_pose,
    const Pose& far_pose, int steps,
    const std::vector<SilhouetteObjective>& objectives) {
  if (steps < 2) throw InvalidConfig("interpolation needs at least 2 steps");
  const SilhouetteImage gt = RenderHardOrEmpty(mesh, k, gt_pose);
  std::vector<LerpRow> rows;
  rows.reserve(steps);
  for (int s = 0; s < steps; ++s) {
    LerpRow row;
    row.lambda = double(s) / double(steps - 1);
    const Pose pose = GeodesicInterpolate(far_pose, gt_pose, row.lambda);
    const SilhouetteImage sil = RenderHardOrEmpty(mesh, k, pose);
    for (std::size_t i = 0; i < sil.size() && !row.overlaps_gt; ++i) {
      row.overlaps_gt = sil[i] > 0.5 && gt[i] > 0.5;
    }
    for (const SilhouetteObjective& obj : objectives) {
      row.losses.push_back(obj.Value(sil));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double MaskGap(const SilhouetteImage& a, const SilhouetteImage& b) {
  if (!a.SameShape(b)) throw DimensionMismatch("mask shapes differ");
  std::vector<Vec2> pa, pb;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      const bool in_a = a(x, y) >= 0.5;
      const bool in_b = b(x, y) >= 0.5;
      if (in_a && in_b) return 0.0;
      if (in_a) pa.emplace_back(x, y);
      if (in_b) pb.emplace_back(x, y);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& p : pa) {
    for (const Vec2& q : pb) best = std::min(best, (p - q).squaredNorm());
  }
  return std::sqrt(best);
}

Pose ShiftToGap(const TriangleMesh& mesh, const CameraIntrinsics& k,
                const SilhouetteImage& target, const Pose& pose,
                const Vec2& direction, double min_gap, double max_gap) {
  if (!(direction.norm() > 0.0) || !(max_gap > min_gap) || min_gap < 0.0) {
    throw InvalidConfig("shift needs a direction and min_gap < max_gap");
  }
  const Vec3 dir = Vec3(direction.x(), direction.y(), 0.0).normalized();
  auto gap_at = [&](double s) {
    Pose p = pose;
    p.translation += s * dir;
    return MaskGap(RenderHardOrEmpty(mesh, k, p), target);
  };
  constexpr double kMaxShift = 2.0;
  // Bracket the first offset past min_gap, then bisect onto the window.
  double lo = 0.0;
  double hi = 0.01;
  while (gap_at(hi) < min_gap) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxShift) throw InvalidConfig("no offset reaches the gap");
  }
  for (int it = 0; it < 60; ++it) {
    const double g = gap_at(hi);
    if (g >= min_gap && g <= max_gap) {
      Pose p = pose;
      p.translation += hi * dir;
      return p;
    }
    const double mid = 0.5 * (lo + hi);
    if (gap_at(mid) < min_gap) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw InvalidConfig("gap window too narrow for this mesh");
}

}  // namespace silref
