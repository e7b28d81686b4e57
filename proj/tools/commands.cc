#include "commands.h"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "silref/analysis.h"
#include "silref/io.h"
#include "silref/metrics.h"
#include "silref/refine.h"
#include "silref/scene.h"

namespace silref::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CameraOptions {
  std::string path;
  double fov_deg = 64.69;
  int width = 320;
  int height = 240;

  void Add(CLI::App* cmd) {
    cmd->add_option("--camera", path, "Camera JSON {fx, fy, cx, cy, width, height}");
    cmd->add_option("--fov-deg", fov_deg, "Horizontal FoV when no --camera is given")
        ->capture_default_str();
    cmd->add_option("--width", width, "Image width when no --camera is given")
        ->capture_default_str();
    cmd->add_option("--height", height, "Image height when no --camera is given")
        ->capture_default_str();
  }

  CameraIntrinsics Load() const {
    if (!path.empty()) return LoadCamera(path);
    return CameraIntrinsics::FromFov(fov_deg, width, height);
  }
};

struct RasterOptions {
  double sigma = SoftRasterConfig{}.sigma;
  double radius = SoftRasterConfig{}.truncation_radius;

  void Add(CLI::App* cmd) {
    cmd->add_option("--sigma", sigma, "Soft edge width in pixels")->capture_default_str();
    cmd->add_option("--radius", radius, "Soft band truncation radius in pixels")
        ->capture_default_str();
  }

  SoftRasterConfig Config() const {
    SoftRasterConfig cfg;
    cfg.sigma = sigma;
    cfg.truncation_radius = radius;
    cfg.Validate();
    return cfg;
  }
};

// Kernel overrides shared by every command that builds a LossConfig.
struct KernelOptions {
  std::string kind;  // empty: default for the loss
  int size = 0;
  double gaussian_sigma = 0.0;

  void Add(CLI::App* cmd) {
    cmd->add_option("--kernel", kind, "Smoothing kernel: box or gaussian");
    cmd->add_option("--kernel-size", size, "Odd kernel size (default 49 box, 69 gaussian)");
    cmd->add_option("--kernel-sigma", gaussian_sigma,
                    "Gaussian kernel sigma in pixels (default size / 6)");
  }

  Kernel For(LossKind loss) const {
    const Kernel fallback = DefaultKernelFor(loss);
    const KernelKind k = kind.empty() ? fallback.kind() : ParseKernelKind(kind);
    const int n = size > 0 ? size : (k == fallback.kind() ? fallback.size() : 49);
    return BuildKernel(k, n, gaussian_sigma);
  }
};

std::vector<LossKind> ParseLossList(const std::string& list) {
  std::vector<LossKind> kinds;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) kinds.push_back(ParseLossKind(item));
  }
  if (kinds.empty()) throw InvalidConfig("no losses given");
  return kinds;
}

TriangleMesh LoadMesh(const std::string& path) {
  ObjLoadResult r = LoadObj(path);
  if (r.dropped_degenerate > 0) {
    std::cerr << "note: dropped " << r.dropped_degenerate
              << " degenerate triangles from " << path << "\n";
  }
  return std::move(r.mesh);
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

int ResolveThreads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SilhouetteObjective> MakeObjectives(const std::vector<LossKind>& kinds,
                                                const SilhouetteImage& target,
                                                const KernelOptions& kernel,
                                                json& fingerprints) {
  std::vector<SilhouetteObjective> objectives;
  for (LossKind kind : kinds) {
    LossConfig cfg;
    cfg.kernel = kernel.For(kind);
    fingerprints[ToString(kind)] = cfg.Fingerprint();
    objectives.emplace_back(kind, target, cfg);
  }
  return objectives;
}

// render ----------------------------------------------------------------

void AddRender(CLI::App& app, CommandFn& selected) {
  struct Opts {
    std::string mesh, pose, out;
    bool soft = false;
    CameraOptions camera;
    RasterOptions raster;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand("render", "Render a silhouette to PGM");
  cmd->add_option("--mesh", o->mesh, "OBJ mesh (model frame)")->required();
  cmd->add_option("--pose", o->pose, "Pose JSON")->required();
  cmd->add_option("--out", o->out, "Output PGM")->required();
  cmd->add_flag("--soft", o->soft, "Soft coverage instead of a hard mask");
  o->camera.Add(cmd);
  o->raster.Add(cmd);
  cmd->callback([o, &selected] {
    selected = [o] {
      const TriangleMesh mesh = LoadMesh(o->mesh);
      const Pose pose = LoadPose(o->pose);
      const CameraIntrinsics k = o->camera.Load();
      const TriangleMesh posed = TransformVertices(mesh, pose);
      CommandResult r;
      SilhouetteImage image;
      if (o->soft) {
        const SoftRasterConfig cfg = o->raster.Config();
        image = RasterizeSoft(posed, k, cfg).image;
        r.fingerprints["raster"] = {{"sigma", cfg.sigma},
                                    {"truncation_radius", cfg.truncation_radius}};
      } else {
        image = RasterizeHard(posed, k);
      }
      SavePgm(image, o->out);
      std::cout << "foreground pixels (>= 0.5): " << image.Count(0.5) << "\n";
      r.outputs.push_back(o->out);
      return r;
    };
  });
}

// refine ----------------------------------------------------------------

void AddRefine(CLI::App& app, CommandFn& selected) {
  struct Opts {
    std::string mesh, target, init_pose, prior_pose, out_trace, out_pose;
    std::string loss = "smooth";
    RefineConfig cfg;
    double lambda_exo = 1.0;
    CameraOptions camera;
    RasterOptions raster;
    KernelOptions kernel;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand("refine", "Refine a pose against a target silhouette");
  cmd->add_option("--mesh", o->mesh, "OBJ mesh (model frame)")->required();
  cmd->add_option("--target", o->target, "Target silhouette PGM (binarized at 128)")
      ->required();
  cmd->add_option("--init-pose", o->init_pose, "Initial pose JSON")->required();
  cmd->add_option("--loss", o->loss, "iou, smooth or smooth-gauss")->capture_default_str();
  cmd->add_option("--steps", o->cfg.steps, "Step budget")->capture_default_str();
  cmd->add_option("--lr", o->cfg.learning_rate, "Adam step size for the 6d rotation")
      ->capture_default_str();
  cmd->add_option("--translation-lr", o->cfg.translation_learning_rate,
                  "Adam step size for the translation (m)")
      ->capture_default_str();
  cmd->add_option("--beta1", o->cfg.beta1)->capture_default_str();
  cmd->add_option("--beta2", o->cfg.beta2)->capture_default_str();
  cmd->add_option("--adam-eps", o->cfg.adam_eps)->capture_default_str();
  cmd->add_option("--convergence-tol", o->cfg.convergence_tol,
                  "Stop after 10 steps with |loss delta| below this")
      ->capture_default_str();
  cmd->add_option("--patience", o->cfg.patience,
                  "Stop after this many steps without a new best loss (0: off)")
      ->capture_default_str();
  cmd->add_option("--prior-pose", o->prior_pose,
                  "Pose JSON mixed in through the pose loss");
  cmd->add_option("--lambda-exo", o->lambda_exo, "Silhouette weight when a prior is given")
      ->capture_default_str();
  cmd->add_option("--out-trace", o->out_trace, "Trace CSV")->required();
  cmd->add_option("--out-pose", o->out_pose, "Lowest-loss pose JSON")->required();
  o->camera.Add(cmd);
  o->raster.Add(cmd);
  o->kernel.Add(cmd);
  cmd->callback([o, &selected] {
    selected = [o] {
      const TriangleMesh mesh = LoadMesh(o->mesh);
      const CameraIntrinsics k = o->camera.Load();
      const SilhouetteImage target = LoadPgm(o->target, PgmMode::kBinarize);
      const Pose init = LoadPose(o->init_pose);
      RefineConfig cfg = o->cfg;
      cfg.loss_kind = ParseLossKind(o->loss);
      cfg.loss.kernel = o->kernel.For(cfg.loss_kind);
      cfg.loss.raster = o->raster.Config();
      cfg.loss.lambda_exo = o->lambda_exo;
      if (!o->prior_pose.empty()) cfg.prior = LoadPose(o->prior_pose);

      CommandResult r;
      r.fingerprints["loss"] = cfg.loss.Fingerprint();
      const RefineTrace trace = RefinePose(mesh, k, target, init, cfg);
      std::ofstream csv = OpenOut(o->out_trace);
      WriteTraceCsv(trace, csv);
      csv.close();
      SavePose(trace.final_pose, o->out_pose);
      std::cout << "steps " << trace.steps.size() << ", best step "
                << trace.best_step << " (loss "
                << FormatDouble(trace.steps[trace.best_step].loss) << "), "
                << ToString(trace.reason) << "\n";
      r.outputs = {o->out_trace, o->out_pose};
      return r;
    };
  });
}

// landscape -------------------------------------------------------------

void AddLandscape(CLI::App& app, const GlobalOptions& g, CommandFn& selected) {
  struct Opts {
    std::string mesh, pose, grid_config, out;
    std::string losses = "iou,smooth";
    CameraOptions camera;
    KernelOptions kernel;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* cmd =
      app.add_subcommand("landscape", "Binned loss surface over a dense pose sweep");
  cmd->add_option("--mesh", o->mesh, "OBJ mesh (model frame)")->required();
  cmd->add_option("--pose", o->pose, "Ground-truth pose JSON")->required();
  cmd->add_option("--grid-config", o->grid_config, "Grid config JSON (defaults otherwise)");
  cmd->add_option("--losses", o->losses, "Comma-separated losses")->capture_default_str();
  cmd->add_option("--out", o->out, "Output directory")->required();
  o->camera.Add(cmd);
  o->kernel.Add(cmd);
  cmd->callback([o, &g, &selected] {
    selected = [o, &g] {
      const TriangleMesh mesh = LoadMesh(o->mesh);
      const CameraIntrinsics k = o->camera.Load();
      const Pose pose = LoadPose(o->pose);
      LandscapeGridConfig grid_cfg;
      if (!o->grid_config.empty()) grid_cfg = GridConfigFromJson(LoadJson(o->grid_config));
      grid_cfg.seed = g.seed;
      const LandscapeGrid grid = LandscapeGrid::Build(grid_cfg);

      CommandResult r;
      const SilhouetteImage gt = RenderHardOrEmpty(mesh, k, pose);
      if (gt.Count(0.5) == 0) throw NothingVisible("ground-truth silhouette is empty");
      const std::vector<SilhouetteObjective> objectives =
          MakeObjectives(ParseLossList(o->losses), gt, o->kernel, r.fingerprints);
      const std::vector<BinnedLossSurface> surfaces = LandscapeSweep(
          mesh, k, pose, grid, objectives, ResolveThreads(g.threads));

      fs::create_directories(o->out);
      for (const BinnedLossSurface& s : surfaces) {
        const std::string stem = (fs::path(o->out) / ToString(s.kind)).string();
        std::ofstream csv = OpenOut(stem + ".csv");
        WriteSurfaceCsv(s, csv);
        csv.close();
        SavePgm(SurfaceHeatMap(s), stem + ".pgm");
        r.outputs.push_back(stem + ".csv");
        r.outputs.push_back(stem + ".pgm");
        std::cout << ToString(s.kind) << ": zero-bin mean "
                  << FormatDouble(s.Mean(0, 0)) << ", distinct levels along rotation "
                  << DistinctLevelsAlongRotation(s) << "\n";
      }
      json meta = SurfaceMetadata(grid_cfg, grid, surfaces);
      meta["levels_along_rotation"] = json::object();
      for (const BinnedLossSurface& s : surfaces) {
        meta["levels_along_rotation"][ToString(s.kind)] =
            DistinctLevelsAlongRotation(s);
      }
      const std::string meta_path = (fs::path(o->out) / "metadata.json").string();
      SaveJson(meta, meta_path);
      r.outputs.push_back(meta_path);
      return r;
    };
  });
}

// lerp ------------------------------------------------------------------

void AddLerp(CLI::App& app, CommandFn& selected) {
  struct Opts {
    std::string mesh, gt_pose, far_pose, out;
    std::string losses = "iou,smooth";
    int steps = 50;
    CameraOptions camera;
    KernelOptions kernel;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* cmd =
      app.add_subcommand("lerp", "Losses along the geodesic from a far pose to the gt");
  cmd->add_option("--mesh", o->mesh, "OBJ mesh (model frame)")->required();
  cmd->add_option("--gt-pose", o->gt_pose, "Ground-truth pose JSON")->required();
  cmd->add_option("--far-pose", o->far_pose, "Start pose JSON")->required();
  cmd->add_option("--steps", o->steps, "Samples including both ends")->capture_default_str();
  cmd->add_option("--losses", o->losses, "Comma-separated losses")->capture_default_str();
  cmd->add_option("--out", o->out, "Output CSV")->required();
  o->camera.Add(cmd);
  o->kernel.Add(cmd);
  cmd->callback([o, &selected] {
    selected = [o] {
      const TriangleMesh mesh = LoadMesh(o->mesh);
      const CameraIntrinsics k = o->camera.Load();
      const Pose gt = LoadPose(o->gt_pose);
      const Pose far = LoadPose(o->far_pose);
      CommandResult r;
      const std::vector<LossKind> kinds = ParseLossList(o->losses);
      const SilhouetteImage target = RenderHardOrEmpty(mesh, k, gt);
      if (target.Count(0.5) == 0) throw NothingVisible("ground-truth silhouette is empty");
      const std::vector<SilhouetteObjective> objectives =
          MakeObjectives(kinds, target, o->kernel, r.fingerprints);
      const std::vector<LerpRow> rows =
          InterpolationExperiment(mesh, k, gt, far, o->steps, objectives);
      std::ofstream csv = OpenOut(o->out);
      WriteLerpCsv(rows, kinds, csv);
      r.outputs.push_back(o->out);
      return r;
    };
  });
}

// gradcheck -------------------------------------------------------------

void AddGradcheck(CLI::App& app, CommandFn& selected) {
  struct Opts {
    std::string mesh, pose, target, target_pose, out;
    std::string loss = "smooth";
    GradcheckOptions check;
    CameraOptions camera;
    RasterOptions raster;
    KernelOptions kernel;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand(
      "gradcheck", "Compare the analytic pose gradient with central differences");
  cmd->add_option("--mesh", o->mesh, "OBJ mesh (model frame)")->required();
  cmd->add_option("--pose", o->pose, "Pose JSON to check at")->required();
  auto* target = cmd->add_option("--target", o->target, "Target silhouette PGM");
  cmd->add_option("--target-pose", o->target_pose,
                  "Render the target from this pose JSON instead")
      ->excludes(target);
  cmd->add_option("--loss", o->loss, "iou, smooth or smooth-gauss")->capture_default_str();
  cmd->add_option("--rotation-step", o->check.rotation_step)->capture_default_str();
  cmd->add_option("--translation-step", o->check.translation_step)->capture_default_str();
  cmd->add_option("--tolerance", o->check.tolerance)->capture_default_str();
  cmd->add_option("--out", o->out, "Report JSON")->required();
  o->camera.Add(cmd);
  o->raster.Add(cmd);
  o->kernel.Add(cmd);
  cmd->callback([o, &selected] {
    selected = [o] {
      const TriangleMesh mesh = LoadMesh(o->mesh);
      const CameraIntrinsics k = o->camera.Load();
      const Pose pose = LoadPose(o->pose);
      SilhouetteImage target;
      if (!o->target.empty()) {
        target = LoadPgm(o->target, PgmMode::kBinarize);
      } else if (!o->target_pose.empty()) {
        target = RenderHardOrEmpty(mesh, k, LoadPose(o->target_pose));
      } else {
        throw InvalidConfig("gradcheck needs --target or --target-pose");
      }
      const LossKind kind = ParseLossKind(o->loss);
      LossConfig cfg;
      cfg.kernel = o->kernel.For(kind);
      cfg.raster = o->raster.Config();
      const GradcheckReport rep = Gradcheck(mesh, k, pose, target, kind, cfg, o->check);

      static const std::array<const char*, 9> kNames = {
          "a1x", "a1y", "a1z", "a2x", "a2y", "a2z", "tx", "ty", "tz"};
      json params = json::array();
      for (int i = 0; i < 9; ++i) {
        params.push_back({{"name", kNames[i]},
                          {"analytic", rep.analytic[i]},
                          {"numeric", rep.numeric[i]},
                          {"rel_error", rep.rel_error[i]}});
        std::printf("%-4s analytic % .6e  numeric % .6e  rel %.2e\n", kNames[i],
                    rep.analytic[i], rep.numeric[i], rep.rel_error[i]);
      }
      SaveJson({{"loss", rep.loss},
                {"loss_kind", ToString(kind)},
                {"parameters", params},
                {"within_tolerance", rep.num_within},
                {"tolerance", o->check.tolerance},
                {"pass", rep.pass}},
               o->out);
      std::cout << rep.num_within << "/9 within " << o->check.tolerance << ": "
                << (rep.pass ? "pass" : "fail") << "\n";
      CommandResult r;
      r.fingerprints["loss"] = cfg.Fingerprint();
      r.outputs.push_back(o->out);
      r.exit_code = rep.pass ? kExitOk : kExitCheckFailed;
      return r;
    };
  });
}

// eval ------------------------------------------------------------------

void AddEval(CLI::App& app, CommandFn& selected) {
  struct Opts {
    std::string pairs, mesh, out;
    std::size_t vertex_stride = 1;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand("eval", "Pose metrics over JSON-lines pose pairs");
  cmd->add_option("--pairs", o->pairs, "JSON-lines of {id, gt, pred}")->required();
  cmd->add_option("--mesh", o->mesh, "OBJ mesh for the 6D pose metric")->required();
  cmd->add_option("--vertex-stride", o->vertex_stride,
                  "Use every n-th vertex for the 6D pose metric")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", o->out, "Metric CSV")->required();
  cmd->callback([o, &selected] {
    selected = [o] {
      const TriangleMesh mesh = LoadMesh(o->mesh);
      const std::vector<PosePair> pairs = LoadPosePairs(o->pairs);
      const MetricReport report = Evaluate(pairs, mesh, o->vertex_stride);
      std::ofstream csv = OpenOut(o->out);
      WriteMetricCsv(report, csv);
      csv.close();
      WriteMetricCsv(report, std::cout);
      CommandResult r;
      r.outputs.push_back(o->out);
      return r;
    };
  });
}

// scene -----------------------------------------------------------------

void AddScene(CLI::App& app, CommandFn& selected) {
  struct Opts {
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand(
      "scene", "Write the built-in quadcopter scene (mesh, camera, pose, mask)");
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->callback([o, &selected] {
    selected = [o] {
      const DeskScene scene = MakeDeskScene();
      fs::create_directories(o->out);
      const fs::path dir(o->out);
      CommandResult r;
      r.outputs = {(dir / "quadcopter.obj").string(), (dir / "camera.json").string(),
                   (dir / "gt_pose.json").string(), (dir / "target.pgm").string()};
      SaveObj(scene.mesh, r.outputs[0]);
      SaveJson(CameraToJson(scene.camera), r.outputs[1]);
      SavePose(scene.gt_pose, r.outputs[2]);
      SavePgm(RasterizeHard(TransformVertices(scene.mesh, scene.gt_pose), scene.camera),
              r.outputs[3]);
      return r;
    };
  });
}

// replay ----------------------------------------------------------------

void AddReplay(CLI::App& app, CommandFn& selected) {
  struct Opts {
    std::string manifest;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand(
      "replay", "Re-run a manifest and verify that every output is byte-identical");
  cmd->add_option("manifest", o->manifest, "Manifest JSON")->required();
  cmd->callback([o, &selected] {
    selected = [o] {
      const json m = LoadJson(o->manifest);
      std::vector<std::string> args;
      try {
        args = m.at("argv").get<std::vector<std::string>>();
      } catch (const json::exception& e) {
        throw ParseError(o->manifest + ": " + e.what(), 1);
      }
      CommandResult r;
      const int code = RunCommandLine(args, /*write_manifest=*/false);
      if (code != m.value("exit_code", 0)) {
        std::cerr << "replay exit code " << code << " differs from the recorded "
                  << m.value("exit_code", 0) << "\n";
        r.exit_code = kExitCheckFailed;
      }
      for (const auto& [path, digest] : m.at("outputs").items()) {
        const bool same = fs::exists(path) && Sha256File(path) == digest.get<std::string>();
        std::cout << (same ? "same   " : "DIFFERS") << " " << path << "\n";
        if (!same) r.exit_code = kExitCheckFailed;
      }
      return r;
    };
  });
}

std::string Timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

void WriteManifest(const std::string& path, const std::vector<std::string>& args,
                   const std::string& command, const GlobalOptions& g,
                   const CommandResult& r) {
  json outputs = json::object();
  for (const std::string& out : r.outputs) outputs[out] = Sha256File(out);
  const json manifest = {{"command", command},
                         {"argv", args},
                         {"seed", g.seed},
                         {"fingerprints", r.fingerprints},
                         {"outputs", outputs},
                         {"exit_code", r.exit_code},
                         {"timestamp", Timestamp()}};
  SaveJson(manifest, path);
}

}  // namespace

std::string Sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                             EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  }
  return hex.str();
}

void RegisterCommands(CLI::App& app, const GlobalOptions& globals,
                      CommandFn& selected) {
  AddRender(app, selected);
  AddRefine(app, selected);
  AddLandscape(app, globals, selected);
  AddLerp(app, selected);
  AddGradcheck(app, selected);
  AddEval(app, selected);
  AddScene(app, selected);
  AddReplay(app, selected);
}

int RunCommandLine(const std::vector<std::string>& args, bool write_manifest) {
  CLI::App app("Silhouette-based 6DOF pose refinement and loss analysis", "silref");
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for sampled experiments")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0: all cores)")
      ->capture_default_str();
  app.add_option("--manifest", g.manifest,
                 "Manifest path (default: next to the first output)");
  app.add_flag("--no-manifest", g.no_manifest, "Do not write a run manifest");

  CommandFn selected;
  RegisterCommands(app, g, selected);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const CommandResult r = selected();
    if (write_manifest && !g.no_manifest && command != "replay" && !r.outputs.empty()) {
      const std::string path =
          g.manifest.empty() ? r.outputs.front() + ".manifest.json" : g.manifest;
      WriteManifest(path, args, command, g, r);
    }
    return r.exit_code;
  } catch (const VanishedGradient& e) {
    std::cerr << "error: " << e.what() << " (loss " << e.loss() << ", |grad| "
              << e.grad_norm() << ")\n";
    return kExitVanished;
  } catch (const NothingVisible& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeometry;
  } catch (const BehindCamera& e) {
    std::cerr << "error: nothing visible: " << e.what() << "\n";
    return kExitGeometry;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace silref::cli
