#include "silref/refine.h"

#include <algorithm>
#include <cmath>

#include "silref/adam.h"

namespace silref {
namespace {

Vec6 PackGradient(const PoseGradient& g) { return g.rotation6d; }

double NormOf(const PoseGradient& g) { return std::sqrt(g.SquaredNorm()); }

}  // namespace

void RefineConfig::Validate() const {
  if (steps < 1) throw InvalidConfig("refinement needs at least one step");
  if (!(learning_rate > 0.0) || !(translation_learning_rate > 0.0)) {
    throw InvalidConfig("learning rates must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw InvalidConfig("Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0) || convergence_window < 1 || patience < 0) {
    throw InvalidConfig("bad refinement tolerances");
  }
  if (loss_kind == LossKind::kGiou) {
    throw InvalidConfig("GIoU is evaluation-only and cannot drive refinement");
  }
  loss.Validate();
}

RefineConfig DefaultRefineConfig(LossKind kind) {
  RefineConfig cfg;
  cfg.loss_kind = kind;
  cfg.loss.kernel = DefaultKernelFor(kind);
  return cfg;
}

std::string ToString(Termination t) {
  switch (t) {
    case Termination::kStepBudget:
      return "step_budget";
    case Termination::kConverged:
      return "converged";
    case Termination::kStalled:
      return "stalled";
  }
  return "?";
}

RenderPipeline::RenderPipeline(const TriangleMesh& mesh,
                               const CameraIntrinsics& k,
                               const SilhouetteImage& target, LossKind kind,
                               const LossConfig& cfg, std::optional<Pose> prior)
    : mesh_(mesh),
      camera_(k),
      objective_(kind, target, cfg),
      prior_(std::move(prior)) {
  if (target.width() != k.width || target.height() != k.height) {
    throw DimensionMismatch("target silhouette does not match the camera");
  }
}

PipelineEvaluation RenderPipeline::Evaluate(const Rotation6D& a,
                                            const Vec3& t) const {
  const LossConfig& cfg = objective_.config();
  Pose pose{Rot6dToMatrix(a), t};
  const SoftRender render =
      RasterizeSoft(TransformVertices(mesh_, pose), camera_, cfg.raster);
  const LossValue exo = objective_.Evaluate(render.image);

  PipelineEvaluation out;
  out.gradient = BackpropToPose(render.tape, exo.gradient.values(), mesh_,
                                pose, camera_, a);
  out.loss = exo.value;
  if (!prior_) return out;

  const double w_exo = cfg.lambda_exo;
  const double w_pose = 1.0 - cfg.lambda_exo;
  out.loss = CombinedLoss(PoseLoss(*prior_, pose, cfg), exo.value, cfg);
  out.gradient.rotation6d *= w_exo;
  out.gradient.translation *= w_exo;
  out.gradient.translation +=
      w_pose * cfg.lambda_pose *
      TranslationLossGradient(prior_->translation, pose.translation);
  const Mat3 d_rot = w_pose * (1.0 - cfg.lambda_pose) *
                     RotationLossGradient(prior_->rotation, pose.rotation);
  out.gradient.rotation6d += Rot6dGradient(a, d_rot);
  return out;
}

double RenderPipeline::Loss(const Rotation6D& a, const Vec3& t) const {
  const LossConfig& cfg = objective_.config();
  const Pose pose{Rot6dToMatrix(a), t};
  const SoftRender render =
      RasterizeSoft(TransformVertices(mesh_, pose), camera_, cfg.raster);
  const double exo = objective_.Value(render.image);
  if (!prior_) return exo;
  return CombinedLoss(PoseLoss(*prior_, pose, cfg), exo, cfg);
}

RefineTrace RefinePose(const TriangleMesh& mesh, const CameraIntrinsics& k,
                       const SilhouetteImage& target, const Pose& init,
                       const RefineConfig& cfg) {
  cfg.Validate();
  const RenderPipeline pipeline(mesh, k, target, cfg.loss_kind, cfg.loss,
                                cfg.prior);

  // Parameters: 6d rotation followed by translation.
  std::array<double, 9> params{};
  const Rotation6D a0 = MatrixToRot6d(init.rotation);
  for (int i = 0; i < 6; ++i) params[i] = a0.values[i];
  for (int i = 0; i < 3; ++i) params[6 + i] = init.translation[i];

  std::vector<double> rates(9, cfg.learning_rate);
  std::fill(rates.begin() + 6, rates.end(), cfg.translation_learning_rate);
  Adam adam(rates, cfg.beta1, cfg.beta2, cfg.adam_eps);

  RefineTrace trace;
  double best_loss = 0.0;
  int quiet_steps = 0;
  for (int step = 0; step < cfg.steps; ++step) {
    Rotation6D a;
    for (int i = 0; i < 6; ++i) a.values[i] = params[i];
    const Vec3 t(params[6], params[7], params[8]);
    const PipelineEvaluation eval = pipeline.Evaluate(a, t);
    const double grad_norm = NormOf(eval.gradient);

    RefineStep record;
    record.step = step;
    record.loss = eval.loss;
    record.grad_norm = grad_norm;
    record.pose = Pose{Rot6dToMatrix(a), t};

    if (step == 0 && !(grad_norm >= cfg.vanished_gradient)) {
      throw VanishedGradient("gradient vanished at the initial pose",
                             eval.loss, grad_norm);
    }
    if (step == 0 || eval.loss < best_loss) {
      best_loss = eval.loss;
      trace.best_step = step;
      trace.final_pose = record.pose;
    }
    if (step > 0) {
      const double delta = std::abs(eval.loss - trace.steps.back().loss);
      quiet_steps = delta < cfg.convergence_tol ? quiet_steps + 1 : 0;
    }
    trace.steps.push_back(record);

    if (quiet_steps >= cfg.convergence_window) {
      trace.reason = Termination::kConverged;
      break;
    }
    if (cfg.patience > 0 && step - trace.best_step >= cfg.patience) {
      trace.reason = Termination::kStalled;
      break;
    }
    if (step + 1 == cfg.steps) break;

    std::array<double, 9> grad{};
    const Vec6 g6 = PackGradient(eval.gradient);
    for (int i = 0; i < 6; ++i) grad[i] = g6[i];
    for (int i = 0; i < 3; ++i) grad[6 + i] = eval.gradient.translation[i];
    adam.Step(params, grad);
  }
  return trace;
}

GradcheckReport Gradcheck(const TriangleMesh& mesh, const CameraIntrinsics& k,
                          const Pose& pose, const SilhouetteImage& target,
                          LossKind kind, const LossConfig& cfg,
                          const GradcheckOptions& opts) {
  const RenderPipeline pipeline(mesh, k, target, kind, cfg);
  const Rotation6D a = MatrixToRot6d(pose.rotation);
  const Vec3 t = pose.translation;
  const PipelineEvaluation eval = pipeline.Evaluate(a, t);

  GradcheckReport report;
  report.loss = eval.loss;
  for (int i = 0; i < 6; ++i) report.analytic[i] = eval.gradient.rotation6d[i];
  for (int i = 0; i < 3; ++i) report.analytic[6 + i] = eval.gradient.translation[i];

  for (int i = 0; i < 9; ++i) {
    Rotation6D ap = a, am = a;
    Vec3 tp = t, tm = t;
    double h = 0.0;
    if (i < 6) {
      h = opts.rotation_step;
      ap.values[i] += h;
      am.values[i] -= h;
    } else {
      h = opts.translation_step;
      tp[i - 6] += h;
      tm[i - 6] -= h;
    }
    report.numeric[i] =
        (pipeline.Loss(ap, tp) - pipeline.Loss(am, tm)) / (2.0 * h);
  }

  double scale = 0.0;
  for (double n : report.numeric) scale = std::max(scale, std::abs(n));
  const double floor = std::max(opts.relative_floor * scale, 1e-300);
  for (int i = 0; i < 9; ++i) {
    const double denom = std::max(
        {std::abs(report.analytic[i]), std::abs(report.numeric[i]), floor});
    report.rel_error[i] = std::abs(report.analytic[i] - report.numeric[i]) / denom;
    if (report.rel_error[i] <= opts.tolerance) ++report.num_within;
  }
  report.pass = report.num_within >= opts.pass_fraction * 9.0;
  return report;
}

}  // namespace silref
