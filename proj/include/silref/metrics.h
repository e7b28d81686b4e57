#pragma once

#include <span>
#include <string>
#include <vector>

#include "silref/mesh.h"
#include "silref/so3.h"

namespace silref {

struct PosePair {
  Pose gt;
  Pose pred;
  std::string id;
};

// Column order follows the usual results table: NPE, OE, CPE, Acc5, Acc10,
// 6D Pose-5, 6D Pose-10, then the pair count.
struct MetricReport {
  double npe = 0.0;
  double oe_radians = 0.0;
  double cpe = 0.0;
  double acc5 = 0.0;
  double acc10 = 0.0;
  double pose6d_5 = 0.0;
  double pose6d_10 = 0.0;
  std::size_t n = 0;
};

/// |t_gt - t_pred| / |t_gt|. Throws ZeroReference when t_gt = 0.
double Npe(const Pose& gt, const Pose& pred);

/// Geodesic orientation error, radians.
double Oe(const Pose& gt, const Pose& pred);

double Cpe(const Pose& gt, const Pose& pred);

// Fraction of pairs with OE < x_degrees and |dt| < x_cm / 100 (strict).
double AccX(std::span<const PosePair> pairs, double x_degrees, double x_cm);

/// Mean distance between corresponding model points under the two poses.
double Pose6dError(const Pose& gt, const Pose& pred,
                   std::span<const Vec3> points);
double Pose6dError(const Pose& gt, const Pose& pred, const TriangleMesh& mesh);

// Fraction of pairs whose ADD is below x_percent of the mesh diagonal.
double Pose6dAccuracy(std::span<const PosePair> pairs, const TriangleMesh& mesh,
                      double x_percent, std::size_t vertex_stride = 1);

MetricReport Evaluate(std::span<const PosePair> pairs, const TriangleMesh& mesh,
                      std::size_t vertex_stride = 1);

}  // namespace silref
