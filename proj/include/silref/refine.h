#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "silref/losses.h"
#include "silref/mesh.h"
#include "silref/rasterizer.h"
#include "silref/so3.h"

namespace silref {

struct RefineConfig {
  LossKind loss_kind = LossKind::kSmooth;
  int steps = 300;
  double learning_rate = 1e-2;              // 6d coordinates
  double translation_learning_rate = 1e-2;  // meters
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double convergence_tol = 1e-7;  // on |loss delta|
  int convergence_window = 10;
  // Stop when the best loss has not improved for this many steps (0: off).
  int patience = 0;
  // Step-0 gradient norm below which the start is declared a plateau.
  double vanished_gradient = 1e-12;
  LossConfig loss;
  // When set, the objective mixes the pose loss against this prior with
  // the silhouette term using loss.lambda_exo.
  std::optional<Pose> prior;

  void Validate() const;
};

// Config for `kind` with the matching default kernel.
RefineConfig DefaultRefineConfig(LossKind kind);

struct RefineStep {
  int step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  Pose pose;
};

enum class Termination { kStepBudget, kConverged, kStalled };
std::string ToString(Termination t);

struct RefineTrace {
  std::vector<RefineStep> steps;
  Pose final_pose;  // lowest-loss iterate
  int best_step = 0;
  Termination reason = Termination::kStepBudget;
};

// Loss of the full pipeline (soft render -> silhouette loss [-> pose mix])
// and its gradient with respect to the 6d rotation and the translation.
struct PipelineEvaluation {
  double loss = 0.0;
  PoseGradient gradient;
};

class RenderPipeline {
 public:
  RenderPipeline(const TriangleMesh& mesh, const CameraIntrinsics& k,
                 const SilhouetteImage& target, LossKind kind,
                 const LossConfig& cfg, std::optional<Pose> prior = {});

  PipelineEvaluation Evaluate(const Rotation6D& a, const Vec3& t) const;
  double Loss(const Rotation6D& a, const Vec3& t) const;

 private:
  const TriangleMesh& mesh_;
  CameraIntrinsics camera_;
  SilhouetteObjective objective_;
  std::optional<Pose> prior_;
};

/**
 * Render-and-compare refinement with Adam over (6d rotation, translation).
 * Each step renders the soft silhouette, evaluates the selected loss against
 * the target, backpropagates to the pose and re-orthonormalizes through
 * Gram-Schmidt. Throws VanishedGradient when the step-0 gradient is below
 * the floor.
 */
RefineTrace RefinePose(const TriangleMesh& mesh, const CameraIntrinsics& k,
                       const SilhouetteImage& target, const Pose& init,
                       const RefineConfig& cfg);

struct GradcheckReport {
  double loss = 0.0;
  std::array<double, 9> analytic{};
  std::array<double, 9> numeric{};
  std::array<double, 9> rel_error{};
  int num_within = 0;
  bool pass = false;
};

struct GradcheckOptions {
  double rotation_step = 1e-4;
  double translation_step = 1e-4;
  double tolerance = 1e-2;
  double pass_fraction = 0.95;
  // Components smaller than this fraction of the largest numeric component
  // are compared against that scale instead of their own magnitude.
  double relative_floor = 1e-3;
};

/// Central differences over the 9 pose parameters (6d then translation)
/// of the full render-and-loss pipeline against the analytic gradient.
GradcheckReport Gradcheck(const TriangleMesh& mesh, const CameraIntrinsics& k,
                          const Pose& pose, const SilhouetteImage& target,
                          LossKind kind, const LossConfig& cfg,
                          const GradcheckOptions& opts = {});

}  // namespace silref
