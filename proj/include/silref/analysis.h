#pragma once

#include <cstdint>
#include <vector>

#include "silref/losses.h"
#include "silref/mesh.h"
#include "silref/so3.h"

namespace silref {

struct GridAxis {
  double range = 0.0;  // samples span [-range, range]
  int steps = 7;       // odd, so zero is a sample
};

struct LandscapeGridConfig {
  GridAxis translation{0.3, 7};             // meters, per axis
  GridAxis rotation{0.5235987755982988, 7};  // radians (30 deg), per axis
  int bins_translation = 20;
  int bins_rotation = 20;
  // Full product is subsampled (seeded) beyond this many poses.
  std::size_t sample_budget = 117649;
  std::uint64_t seed = 0;
};

/// Displacements of the dense pose sweep: the Cartesian product of a 3-axis
/// translation grid and a 3-axis axis-angle grid, optionally subsampled.
struct LandscapeGrid {
  std::vector<Vec3> translation_offsets;
  std::vector<Vec3> rotation_offsets;
  // Indices into the product (rotation-major); sorted, zero included once.
  std::vector<std::size_t> samples;
  int bins_translation = 20;
  int bins_rotation = 20;
  double max_translation = 0.0;  // bin range upper limits
  double max_rotation = 0.0;

  static LandscapeGrid Build(const LandscapeGridConfig& cfg);

  std::size_t ProductSize() const {
    return translation_offsets.size() * rotation_offsets.size();
  }
  Vec3 TranslationOf(std::size_t sample) const {
    return translation_offsets[sample % translation_offsets.size()];
  }
  Vec3 RotationOf(std::size_t sample) const {
    return rotation_offsets[sample / translation_offsets.size()];
  }
  int TranslationBin(const Vec3& dt) const;
  int RotationBin(const Vec3& dtheta) const;
};

/// Per-loss result of the sweep. `sum` accumulates min-max normalized
/// losses per [rotation bin x translation bin] cell.
struct BinnedLossSurface {
  LossKind kind = LossKind::kIou;
  int bins_rotation = 0;
  int bins_translation = 0;
  std::vector<double> sum;
  std::vector<std::size_t> count;
  std::vector<double> raw;         // per grid sample, sweep order
  std::vector<double> normalized;  // per grid sample
  double raw_min = 0.0;
  double raw_max = 0.0;
  bool degenerate = false;  // max == min, surface left at zero

  double Sum(int r, int t) const { return sum[r * bins_translation + t]; }
  std::size_t Count(int r, int t) const {
    return count[r * bins_translation + t];
  }
  // Mean normalized loss of a cell; NaN when empty.
  double Mean(int r, int t) const;
};

/**
 * Renders the hard silhouette at every displaced pose (R <- exp(dtheta) R,
 * t <- t + dt), evaluates each objective against its target (the gt
 * silhouette), min-max normalizes per loss and bins by |dt| and |dtheta|.
 * Evaluation may use `threads` workers; results do not depend on it.
 */
std::vector<BinnedLossSurface> LandscapeSweep(
    const TriangleMesh& mesh, const CameraIntrinsics& k, const Pose& gt_pose,
    const LandscapeGrid& grid,
    const std::vector<SilhouetteObjective>& objectives, int threads = 1);

// Heatmap color steps. Non-empty cell means are rescaled to [0, 1] over
// the cells and quantized to `levels` values; the result is the number of
// distinct levels in each translation column, summed over columns.
std::size_t DistinctLevelsAlongRotation(const BinnedLossSurface& surface,
                                        int levels = 256);

struct LerpRow {
  double lambda = 0.0;
  bool overlaps_gt = false;  // hard silhouettes intersect
  std::vector<double> losses;
};

/// Loss of every objective along the geodesic from far_pose (lambda = 0)
/// to gt_pose (lambda = 1), hard silhouettes vs the gt silhouette.
std::vector<LerpRow> InterpolationExperiment(
    const TriangleMesh& mesh, const CameraIntrinsics& k, const Pose& gt_pose,
    const Pose& far_pose, int steps,
    const std::vector<SilhouetteObjective>& objectives);

// Smallest Euclidean distance in pixels between the centres of foreground
// pixels (value >= 0.5) of two masks; 0 when they overlap, +inf when either
// is empty.
double MaskGap(const SilhouetteImage& a, const SilhouetteImage& b);

/// Slides `pose` sideways in the camera image plane along `direction`
/// (x, y in camera coordinates) until its hard silhouette sits between
/// min_gap and max_gap pixels away from `target`. Throws InvalidConfig when
/// no such offset exists within 2 m.
Pose ShiftToGap(const TriangleMesh& mesh, const CameraIntrinsics& k,
                const SilhouetteImage& target, const Pose& pose,
                const Vec2& direction, double min_gap, double max_gap);

// Hard silhouette of the posed mesh; all zeros when nothing is in front of
// the camera.
SilhouetteImage RenderHardOrEmpty(const TriangleMesh& mesh,
                                  const CameraIntrinsics& k, const Pose& pose);

}  // namespace silref
