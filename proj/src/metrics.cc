#include "silref/metrics.h"

#include <numbers>

namespace silref {
namespace {

void RequireNonEmpty(std::span<const PosePair> pairs) {
  if (pairs.empty()) throw EmptyInput("no pose pairs to evaluate");
}

}  // namespace

double Npe(const Pose& gt, const Pose& pred) {
  const double ref = gt.translation.norm();
  if (ref == 0.0) {
    throw ZeroReference("NPE undefined for a zero ground-truth translation");
  }
  return (gt.translation - pred.translation).norm() / ref;
}

double Oe(const Pose& gt, const Pose& pred) {
  return AngularDistance(gt.rotation, pred.rotation);
}

double Cpe(const Pose& gt, const Pose& pred) {
  return Npe(gt, pred) + Oe(gt, pred);
}

double AccX(std::span<const PosePair> pairs, double x_degrees, double x_cm) {
  RequireNonEmpty(pairs);
  const double max_angle = x_degrees * std::numbers::pi / 180.0;
  const double max_dist = x_cm / 100.0;
  std::size_t hits = 0;
  for (const PosePair& p : pairs) {
    const bool ok = Oe(p.gt, p.pred) < max_angle &&
                    (p.gt.translation - p.pred.translation).norm() < max_dist;
    hits += ok;
  }
  return double(hits) / double(pairs.size());
}

double Pose6dError(const Pose& gt, const Pose& pred,
                   std::span<const Vec3> points) {
  if (points.empty()) throw EmptyInput("ADD needs at least one model point");
  double sum = 0.0;
  for (const Vec3& v : points) sum += ((gt * v) - (pred * v)).norm();
  return sum / double(points.size());
}

double Pose6dError(const Pose& gt, const Pose& pred, const TriangleMesh& mesh) {
  return Pose6dError(gt, pred, mesh.vertices);
}

double Pose6dAccuracy(std::span<const PosePair> pairs, const TriangleMesh& mesh,
                      double x_percent, std::size_t vertex_stride) {
  RequireNonEmpty(pairs);
  const std::vector<Vec3> points = StrideSubsample(mesh.vertices, vertex_stride);
  const double threshold = x_percent / 100.0 * Diagonal(mesh);
  std::size_t hits = 0;
  for (const PosePair& p : pairs) {
    hits += Pose6dError(p.gt, p.pred, points) < threshold;
  }
  return double(hits) / double(pairs.size());
}

MetricReport Evaluate(std::span<const PosePair> pairs, const TriangleMesh& mesh,
                      std::size_t vertex_stride) {
  RequireNonEmpty(pairs);
  MetricReport r;
  r.n = pairs.size();
  for (const PosePair& p : pairs) {
    const double npe = Npe(p.gt, p.pred);
    const double oe = Oe(p.gt, p.pred);
    r.npe += npe;
    r.oe_radians += oe;
    r.cpe += npe + oe;
  }
  r.npe /= double(r.n);
  r.oe_radians /= double(r.n);
  r.cpe /= double(r.n);
  r.acc5 = AccX(pairs, 5.0, 5.0);
  r.acc10 = AccX(pairs, 10.0, 10.0);
  r.pose6d_5 = Pose6dAccuracy(pairs, mesh, 5.0, vertex_stride);
  r.pose6d_10 = Pose6dAccuracy(pairs, mesh, 10.0, vertex_stride);
  return r;
}

}  // namespace silref
