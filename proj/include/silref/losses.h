#pragma once

#include <string>

#include "silref/convolution.h"
#include "silref/image.h"
#include "silref/rasterizer.h"
#include "silref/so3.h"

namespace silref {

enum class LossKind { kIou, kGiou, kSmooth, kSmoothGauss };

std::string ToString(LossKind kind);
// Accepts iou, giou, smooth, smooth_gauss / smooth-gauss.
LossKind ParseLossKind(const std::string& name);

// Box 49 for kSmooth, Gaussian 69 for kSmoothGauss, box 49 otherwise.
Kernel DefaultKernelFor(LossKind kind);

struct LossConfig {
  double lambda_pose = 0.5;
  double lambda_exo = 1.0;
  double epsilon = 1e-6;
  Kernel kernel = BuildKernel(KernelKind::kBox, 49);
  SoftRasterConfig raster;

  void Validate() const;
  // Stable text tag used in CSV reports and manifests.
  std::string Fingerprint() const;
};

// Direct pose terms --------------------------------------------------------

/// |t - t_pred|^2
double TranslationLoss(const Vec3& t, const Vec3& t_pred);
Vec3 TranslationLossGradient(const Vec3& t, const Vec3& t_pred);

/// Geodesic angle between R and R_pred in radians.
double RotationLoss(const Mat3& r, const Mat3& r_pred);
// dL/dR_pred; zero where the clamped arccos argument saturates.
Mat3 RotationLossGradient(const Mat3& r, const Mat3& r_pred);

double PoseLoss(const Pose& gt, const Pose& pred, const LossConfig& cfg);
double CombinedLoss(double pose_term, double exo_term, const LossConfig& cfg);

// Silhouette terms ---------------------------------------------------------

struct LossValue {
  double value = 0.0;
  SilhouetteImage gradient;  // dL / d(rendered) per pixel
};

/**
 * Soft Jaccard over global sums:
 *   L = 1 - sum(S*R) / (sum(S + R - S*R) + eps)
 * where S is the target and R the rendered silhouette.
 */
LossValue IouLoss(const SilhouetteImage& target,
                  const SilhouetteImage& rendered, const LossConfig& cfg);

/// 1 - IoU + |C \ (A u B)| / |C| over the supports (value >= 0.5) with C the
/// axis-aligned box enclosing both. Evaluation only; throws EmptyMask.
double GiouSilhouetteLoss(const SilhouetteImage& target,
                          const SilhouetteImage& rendered,
                          const LossConfig& cfg);

/// (g * (1 - S)) - (g * S): -1 deep inside, +1 deep outside, constant beyond
/// the kernel's reach.
SilhouetteImage ProximityMap(const SilhouetteImage& s, const Kernel& g);

/**
 * Smooth silhouette consistency loss
 *   L = (1/N) sum_p S(p) P(R)(p) + R(p) P(S)(p)
 * with P the proximity map. Symmetric in its arguments. The gradient with
 * respect to R is (P(S) - 2 g^T S) / N, g^T being the convolution adjoint.
 */
LossValue SmoothSilhouetteLoss(const SilhouetteImage& target,
                               const SilhouetteImage& rendered,
                               const LossConfig& cfg);

/**
 * A silhouette loss bound to a fixed target. For the smooth loss the
 * target-only terms are precomputed: L is affine in the rendered image, so
 * each evaluation is a single pass with no convolution.
 */
class SilhouetteObjective {
 public:
  SilhouetteObjective(LossKind kind, SilhouetteImage target, LossConfig cfg);

  LossKind kind() const { return kind_; }
  const SilhouetteImage& target() const { return target_; }
  const LossConfig& config() const { return cfg_; }

  // Gradient is left empty for GIoU.
  LossValue Evaluate(const SilhouetteImage& rendered) const;
  double Value(const SilhouetteImage& rendered) const;

 private:
  LossKind kind_;
  SilhouetteImage target_;
  LossConfig cfg_;
  double target_sum_ = 0.0;
  SilhouetteImage smooth_slope_;  // P(S) - 2 g^T S
};

}  // namespace silref
