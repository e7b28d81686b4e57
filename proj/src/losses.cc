#include "silref/losses.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace silref {
namespace {

void CheckShapes(const SilhouetteImage& a, const SilhouetteImage& b) {
  if (!a.SameShape(b)) {
    throw DimensionMismatch("silhouettes differ in size: " +
                            std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + " vs " +
                            std::to_string(b.width()) + "x" +
                            std::to_string(b.height()));
  }
}

struct Extents {
  int x0 = 0, x1 = -1, y0 = 0, y1 = -1;
  bool empty() const { return x1 < x0; }
};

Extents SupportExtents(const SilhouetteImage& s) {
  Extents e;
  e.x0 = s.width();
  e.y0 = s.height();
  for (int y = 0; y < s.height(); ++y) {
    for (int x = 0; x < s.width(); ++x) {
      if (s(x, y) < 0.5) continue;
      e.x0 = std::min(e.x0, x);
      e.x1 = std::max(e.x1, x);
      e.y0 = std::min(e.y0, y);
      e.y1 = std::max(e.y1, y);
    }
  }
  return e;
}

}  // namespace

std::string ToString(LossKind kind) {
  switch (kind) {
    case LossKind::kIou:
      return "iou";
    case LossKind::kGiou:
      return "giou";
    case LossKind::kSmooth:
      return "smooth";
    case LossKind::kSmoothGauss:
      return "smooth_gauss";
  }
  return "?";
}

LossKind ParseLossKind(const std::string& name) {
  if (name == "iou") return LossKind::kIou;
  if (name == "giou") return LossKind::kGiou;
  if (name == "smooth") return LossKind::kSmooth;
  if (name == "smooth_gauss" || name == "smooth-gauss") {
    return LossKind::kSmoothGauss;
  }
  throw InvalidConfig("unknown loss '" + name + "'");
}

Kernel DefaultKernelFor(LossKind kind) {
  return kind == LossKind::kSmoothGauss ? BuildKernel(KernelKind::kGaussian, 69)
                                        : BuildKernel(KernelKind::kBox, 49);
}

void LossConfig::Validate() const {
  if (!(lambda_pose >= 0.0 && lambda_pose <= 1.0) ||
      !(lambda_exo >= 0.0 && lambda_exo <= 1.0)) {
    throw InvalidConfig("loss weights must lie in [0, 1]");
  }
  if (!(epsilon > 0.0)) throw InvalidConfig("epsilon must be positive");
  if (kernel.size() < 3) throw InvalidSize("loss kernel is not initialised");
  raster.Validate();
}

std::string LossConfig::Fingerprint() const {
  std::ostringstream ss;
  ss << kernel.Fingerprint() << ";lp=" << lambda_pose << ";le=" << lambda_exo
     << ";eps=" << epsilon;
  return ss.str();
}

double TranslationLoss(const Vec3& t, const Vec3& t_pred) {
  return (t - t_pred).squaredNorm();
}

Vec3 TranslationLossGradient(const Vec3& t, const Vec3& t_pred) {
  return 2.0 * (t_pred - t);
}

// The trace form, so that the gradient below is exact for any 3x3 r_pred.
double RotationLoss(const Mat3& r, const Mat3& r_pred) {
  const double c = ((r * r_pred.transpose()).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

Mat3 RotationLossGradient(const Mat3& r, const Mat3& r_pred) {
  const double c = ((r * r_pred.transpose()).trace() - 1.0) / 2.0;
  if (c <= -1.0 || c >= 1.0) return Mat3::Zero();
  return -r / (2.0 * std::sqrt(1.0 - c * c));
}

double PoseLoss(const Pose& gt, const Pose& pred, const LossConfig& cfg) {
  return cfg.lambda_pose * TranslationLoss(gt.translation, pred.translation) +
         (1.0 - cfg.lambda_pose) * RotationLoss(gt.rotation, pred.rotation);
}

double CombinedLoss(double pose_term, double exo_term, const LossConfig& cfg) {
  return (1.0 - cfg.lambda_exo) * pose_term + cfg.lambda_exo * exo_term;
}

LossValue IouLoss(const SilhouetteImage& target,
                  const SilhouetteImage& rendered, const LossConfig& cfg) {
  CheckShapes(target, rendered);
  double inter = 0.0;
  double uni = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double prod = target[i] * rendered[i];
    inter += prod;
    uni += target[i] + rendered[i] - prod;
  }
  uni += cfg.epsilon;
  LossValue out;
  out.value = 1.0 - inter / uni;
  out.gradient = SilhouetteImage(target.width(), target.height());
  const double inv_u2 = 1.0 / (uni * uni);
  for (std::size_t i = 0; i < target.size(); ++i) {
    // d(inter)/dR = S, d(union)/dR = 1 - S
    out.gradient[i] =
        -(target[i] * uni - inter * (1.0 - target[i])) * inv_u2;
  }
  return out;
}

double GiouSilhouetteLoss(const SilhouetteImage& target,
                          const SilhouetteImage& rendered,
                          const LossConfig& /*cfg*/) {
  CheckShapes(target, rendered);
  const Extents a = SupportExtents(target);
  const Extents b = SupportExtents(rendered);
  if (a.empty() || b.empty()) {
    throw EmptyMask("GIoU needs two non-empty silhouettes");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const bool in_a = target[i] >= 0.5;
    const bool in_b = rendered[i] >= 0.5;
    inter += in_a && in_b;
    uni += in_a || in_b;
  }
  const double hull = double(std::max(a.x1, b.x1) - std::min(a.x0, b.x0) + 1) *
                      double(std::max(a.y1, b.y1) - std::min(a.y0, b.y0) + 1);
  return 1.0 - double(inter) / double(uni) + (hull - double(uni)) / hull;
}

SilhouetteImage ProximityMap(const SilhouetteImage& s, const Kernel& g) {
  SilhouetteImage complement(s.width(), s.height());
  for (std::size_t i = 0; i < s.size(); ++i) complement[i] = 1.0 - s[i];
  const SilhouetteImage outside = Convolve(complement, g);
  const SilhouetteImage inside = Convolve(s, g);
  SilhouetteImage out(s.width(), s.height());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = outside[i] - inside[i];
  return out;
}

LossValue SmoothSilhouetteLoss(const SilhouetteImage& target,
                               const SilhouetteImage& rendered,
                               const LossConfig& cfg) {
  CheckShapes(target, rendered);
  const SilhouetteImage prox_target = ProximityMap(target, cfg.kernel);
  const SilhouetteImage prox_rendered = ProximityMap(rendered, cfg.kernel);
  const double n = static_cast<double>(target.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    sum += target[i] * prox_rendered[i] + rendered[i] * prox_target[i];
  }
  LossValue out;
  out.value = sum / n;
  const SilhouetteImage back = ConvolveAdjoint(target, cfg.kernel);
  out.gradient = SilhouetteImage(target.width(), target.height());
  for (std::size_t i = 0; i < target.size(); ++i) {
    out.gradient[i] = (prox_target[i] - 2.0 * back[i]) / n;
  }
  return out;
}

SilhouetteObjective::SilhouetteObjective(LossKind kind, SilhouetteImage target,
                                         LossConfig cfg)
    : kind_(kind), target_(std::move(target)), cfg_(std::move(cfg)) {
  cfg_.Validate();
  if (kind_ == LossKind::kSmooth || kind_ == LossKind::kSmoothGauss) {
    const SilhouetteImage prox = ProximityMap(target_, cfg_.kernel);
    const SilhouetteImage back = ConvolveAdjoint(target_, cfg_.kernel);
    smooth_slope_ = SilhouetteImage(target_.width(), target_.height());
    for (std::size_t i = 0; i < target_.size(); ++i) {
      smooth_slope_[i] = prox[i] - 2.0 * back[i];
    }
    target_sum_ = target_.Sum();
  }
}

LossValue SilhouetteObjective::Evaluate(const SilhouetteImage& rendered) const {
  CheckShapes(target_, rendered);
  switch (kind_) {
    case LossKind::kIou:
      return IouLoss(target_, rendered, cfg_);
    case LossKind::kGiou:
      return {GiouSilhouetteLoss(target_, rendered, cfg_), {}};
    case LossKind::kSmooth:
    case LossKind::kSmoothGauss:
      break;
  }
  const double n = static_cast<double>(target_.size());
  LossValue out;
  double acc = 0.0;
  for (std::size_t i = 0; i < target_.size(); ++i) {
    acc += rendered[i] * smooth_slope_[i];
  }
  out.value = (target_sum_ + acc) / n;
  out.gradient = SilhouetteImage(target_.width(), target_.height());
  for (std::size_t i = 0; i < target_.size(); ++i) {
    out.gradient[i] = smooth_slope_[i] / n;
  }
  return out;
}

double SilhouetteObjective::Value(const SilhouetteImage& rendered) const {
  CheckShapes(target_, rendered);
  if (kind_ == LossKind::kSmooth || kind_ == LossKind::kSmoothGauss) {
    double acc = 0.0;
    for (std::size_t i = 0; i < target_.size(); ++i) {
      acc += rendered[i] * smooth_slope_[i];
    }
    return (target_sum_ + acc) / static_cast<double>(target_.size());
  }
  return Evaluate(rendered).value;
}

}  // namespace silref
