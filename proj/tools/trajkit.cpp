/*
 * Copyright 2026 The Trajkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// trajkit: single-binary front end for the trajectory toolkit. Every
// subcommand is deterministic for a fixed --seed and re-runs produce
// byte-identical files. Failures print one machine-readable line to
// stderr, "error code=<N> class=<kind>: <message>", with a distinct exit
// code per error class.

#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trajkit/camera.hpp"
#include "trajkit/checkpoint.hpp"
#include "trajkit/error.hpp"
#include "trajkit/grad_check.hpp"
#include "trajkit/manifest.hpp"
#include "trajkit/metrics.hpp"
#include "trajkit/sampler.hpp"
#include "trajkit/scene.hpp"
#include "trajkit/serialization.hpp"
#include "trajkit/trajectory.hpp"

namespace {

// Exit codes, one per error class. 0 = success, 1 = unexpected failure.
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRange = 4;
constexpr int kExitParse = 5;
constexpr int kExitIo = 6;
constexpr int kExitPlacement = 7;
constexpr int kExitNumeric = 8;

int fail(int code, const char* kind, const std::string& message) {
  std::cerr << "error code=" << code << " class=" << kind << ": " << message
            << "\n";
  return code;
}

struct GenTrajArgs {
  bool list = false;
  std::string template_name;
  std::string prompt = "a walking figure";
  std::string out;
  int frames = 100;
  double fps = 20.0;
};

int run_gen_traj(const GenTrajArgs& args) {
  if (args.list) {
    for (const trajkit::TrajectoryTemplate& tmpl :
         trajkit::template_library()) {
      std::cout << tmpl.name << " " << trajkit::family_name(tmpl.family)
                << "\n";
    }
    return 0;
  }
  if (args.template_name.empty() || args.out.empty()) {
    throw trajkit::ValidationError(
        "gen-traj needs --template and --out (or --list)");
  }
  const trajkit::TrajectoryTemplate& tmpl =
      trajkit::find_template(args.template_name);
  trajkit::SceneComposition scene;
  trajkit::SceneEntity entity;
  entity.entity_id = "e0";
  entity.prompt = args.prompt;
  entity.scale_factor = 1.0;
  entity.poses = trajkit::generate_template(tmpl, args.frames, args.fps);
  scene.entities.push_back(std::move(entity));
  trajkit::write_file(args.out, trajkit::serialize_scene(scene));
  const trajkit::TemplateDiagnostics diag =
      trajkit::template_diagnostics(scene.entities[0].poses);
  std::cout << "template=" << tmpl.name << " frames=" << args.frames
            << " max_yaw_step_deg=" << trajkit::format_float(diag.max_yaw_step_deg)
            << "\n";
  std::cout << "wrote " << args.out << "\n";
  return 0;
}

struct ComposeArgs {
  std::vector<std::string> templates;
  std::vector<std::string> kinds;
  std::vector<std::string> prompts;
  std::string location;
  std::string out;
  int frames = 100;
  double fps = 20.0;
  std::uint64_t seed = 0;
};

int run_compose(const ComposeArgs& args) {
  if (args.templates.empty() || args.out.empty()) {
    throw trajkit::ValidationError(
        "compose-scene needs at least one --template and --out");
  }
  if (args.kinds.size() > args.templates.size() ||
      args.prompts.size() > args.templates.size()) {
    throw trajkit::ValidationError(
        "more --kind/--prompt values than --template values");
  }
  std::vector<trajkit::ComposeEntitySpec> specs;
  for (std::size_t i = 0; i < args.templates.size(); ++i) {
    trajkit::ComposeEntitySpec spec;
    spec.tmpl = trajkit::find_template(args.templates[i]);
    if (i < args.kinds.size()) {
      if (args.kinds[i] == "human") {
        spec.kind = trajkit::EntityKind::human;
      } else if (args.kinds[i] == "animal") {
        spec.kind = trajkit::EntityKind::animal;
      } else {
        throw trajkit::ValidationError("--kind must be human or animal, got " +
                                       args.kinds[i]);
      }
    }
    if (i < args.prompts.size()) {
      spec.prompt = args.prompts[i];
    }
    specs.push_back(std::move(spec));
  }
  const trajkit::SceneComposition scene = trajkit::compose_scene(
      specs, args.frames, args.fps, args.seed, args.location);
  trajkit::write_file(args.out, trajkit::serialize_scene(scene));
  std::cout << "entities=" << scene.entities.size()
            << " frames=" << scene.frame_count() << " min_clearance_m="
            << trajkit::format_float(trajkit::min_pairwise_clearance(scene))
            << "\n";
  std::cout << "wrote " << args.out << "\n";
  return 0;
}

struct RigArgs {
  std::string out;
  double radius = trajkit::kRigRadiusM;
  double height = trajkit::kRigHeightM;
};

int run_build_rig(const RigArgs& args) {
  if (args.out.empty()) {
    throw trajkit::ValidationError("build-rig needs --out");
  }
  const trajkit::CameraRig rig = trajkit::build_rig(
      trajkit::Vec3<double>::Zero(), args.radius, args.height);
  trajkit::write_file(args.out, trajkit::write_rig_doc(rig));
  std::cout << "cameras=" << rig.cameras.size() << " radius_m="
            << trajkit::format_float(rig.radius) << " height_m="
            << trajkit::format_float(rig.height) << "\n";
  std::cout << "wrote " << args.out << "\n";
  return 0;
}

struct ProjectArgs {
  std::string scene_path;
  std::string rig_path;
  std::string out;
  int camera = 0;
};

int run_project(const ProjectArgs& args) {
  if (args.scene_path.empty() || args.rig_path.empty() || args.out.empty()) {
    throw trajkit::ValidationError(
        "project-2d needs --scene, --rig, and --out");
  }
  const trajkit::SceneComposition scene =
      trajkit::parse_scene(trajkit::read_file(args.scene_path));
  const trajkit::CameraRig rig =
      trajkit::parse_rig_doc(trajkit::read_file(args.rig_path));
  if (args.camera < 0 ||
      args.camera >= static_cast<int>(rig.cameras.size())) {
    throw trajkit::RangeError("--camera must be in [0, " +
                              std::to_string(rig.cameras.size() - 1) +
                              "], got " + std::to_string(args.camera));
  }
  const std::vector<trajkit::TrackSample> samples =
      trajkit::project_scene(rig.cameras[args.camera], scene);
  trajkit::write_file(args.out, trajkit::write_track_csv(samples));
  std::cout << "camera=" << args.camera << " samples=" << samples.size()
            << "\n";
  std::cout << "wrote " << args.out << "\n";
  return 0;
}

struct ManifestArgs {
  std::string out;
  int budget = 0;
  int frames = 100;
  double fps = 20.0;
  std::uint64_t seed = 0;
};

int run_manifest(const ManifestArgs& args) {
  if (args.out.empty()) {
    throw trajkit::ValidationError("manifest needs --out");
  }
  trajkit::ManifestOptions options;
  options.compositions = args.budget;
  options.frames = args.frames;
  options.fps = args.fps;
  options.seed = args.seed;
  const trajkit::Manifest manifest = trajkit::enumerate_manifest(options);
  trajkit::write_file(args.out, trajkit::serialize_manifest(manifest));
  std::cout << "compositions=" << manifest.compositions.size()
            << " clips=" << manifest.clips.size() << "\n";
  std::cout << "wrote " << args.out << "\n";
  return 0;
}

struct EvalArgs {
  std::string est_path;
  std::string gt_path;
  std::string out;
  std::string histogram_out;
  std::string clip_id = "clip";
};

int run_eval(const EvalArgs& args) {
  if (args.est_path.empty() || args.gt_path.empty()) {
    throw trajkit::ValidationError("eval needs --est and --gt");
  }
  const trajkit::SceneComposition est =
      trajkit::parse_scene(trajkit::read_file(args.est_path));
  const trajkit::SceneComposition gt =
      trajkit::parse_scene(trajkit::read_file(args.gt_path));
  if (est.entities.size() != gt.entities.size()) {
    throw trajkit::ValidationError(
        "estimate and reference disagree on entity count");
  }

  std::vector<trajkit::ClipEntityError> rows;
  double trans_sum = 0.0;
  double rot_sum = 0.0;
  for (const trajkit::SceneEntity& gt_entity : gt.entities) {
    const trajkit::SceneEntity* matched = nullptr;
    for (const trajkit::SceneEntity& est_entity : est.entities) {
      if (est_entity.entity_id == gt_entity.entity_id) {
        matched = &est_entity;
        break;
      }
    }
    if (matched == nullptr) {
      throw trajkit::ValidationError("estimate is missing entity '" +
                                     gt_entity.entity_id + "'");
    }
    trajkit::ClipEntityError row;
    row.clip_id = args.clip_id;
    row.entity_id = gt_entity.entity_id;
    row.error = trajkit::trajectory_error(matched->poses, gt_entity.poses);
    trans_sum += row.error.trans_err_m;
    rot_sum += row.error.rot_err_deg;
    rows.push_back(std::move(row));
  }

  const std::string report = trajkit::write_metric_report(rows);
  if (!args.out.empty()) {
    trajkit::write_file(args.out, report);
    std::cout << "wrote " << args.out << "\n";
  } else {
    std::cout << report;
  }
  const double n = static_cast<double>(rows.size());
  std::cout << "trans_err_m=" << trajkit::format_float(trans_sum / n)
            << " rot_err_deg=" << trajkit::format_float(rot_sum / n) << "\n";

  if (!args.histogram_out.empty()) {
    std::vector<std::string> captions;
    for (const trajkit::SceneEntity& entity : gt.entities) {
      captions.push_back(entity.prompt);
    }
    trajkit::write_file(
        args.histogram_out,
        trajkit::write_histogram_csv(trajkit::entity_distribution(captions)));
    std::cout << "wrote " << args.histogram_out << "\n";
  }
  return 0;
}

struct SampleArgs {
  std::string out;
  int steps = 50;
  double w = 12.5;
  int tc = 25;
  double alpha = 0.4;
  double eta = 0.0;
  std::uint64_t seed = 0;
  std::string negative = "uncond";
};

int run_sample_demo(const SampleArgs& args) {
  if (args.out.empty()) {
    throw trajkit::ValidationError("sample-demo needs --out");
  }
  trajkit::NegativeMode mode;
  if (args.negative == "uncond") {
    mode = trajkit::NegativeMode::uncond;
  } else if (args.negative == "static_pose") {
    mode = trajkit::NegativeMode::static_pose;
  } else {
    throw trajkit::ValidationError(
        "--negative must be uncond or static_pose, got " + args.negative);
  }

  trajkit::ScheduleConfig config;
  config.steps = args.steps;
  config.guidance_w = args.w;
  config.annealed_steps = args.tc;
  config.alpha_lora = args.alpha;
  config.eta = args.eta;
  const trajkit::SamplerSchedule schedule = trajkit::make_schedule(config);

  // Toy denoiser: one DiT block over 2 latent frames of 4 tokens, fed by
  // two entity trajectories sampled at 5 frames (downsample 4 keeps
  // frames 0 and 4). The injector gate is opened so conditioning flows.
  trajkit::InjectorDims dims;
  trajkit::DitBlockParams<double> params =
      trajkit::init_dit_block<double>(dims, 2 * dims.d_model, args.seed);
  params.injector.gate_gamma = 0.5;
  const int pose_frames = 1 + dims.downsample;
  trajkit::ToyDitDenoiser denoiser(params, dims, 2, 4);

  std::vector<trajkit::EntityTrajectoryPair> pairs;
  const char* prompts[2] = {"a red fox", "a tall man walking"};
  const char* templates[2] = {"line_len3", "arc_r1.5_sweep90_ccw"};
  for (int i = 0; i < 2; ++i) {
    trajkit::EntityTrajectoryPair pair;
    pair.prompt = prompts[i];
    pair.poses = trajkit::generate_template(
        trajkit::find_template(templates[i]), pose_frames, 20.0);
    pairs.push_back(std::move(pair));
  }

  const trajkit::SampleResult result = trajkit::annealed_sample(
      denoiser, schedule, "two subjects crossing a courtyard", pairs, mode,
      args.seed, denoiser.latent_dim());

  trajkit::NamedTensor latent;
  latent.name = "latent";
  latent.values = result.latent;
  trajkit::write_file(args.out, trajkit::serialize_checkpoint({latent}));
  std::cout << "steps=" << config.steps
            << " conditioned=" << result.conditioned_steps
            << " base=" << result.base_steps << "\n";
  std::cout << "latent_dim=" << result.latent.size() << "\n";
  std::cout << "wrote " << args.out << "\n";
  return 0;
}

struct GradCheckArgs {
  std::uint64_t seed = 7;
  double step = 1e-5;
  double tol = 1e-5;
};

int run_grad_check(const GradCheckArgs& args) {
  const trajkit::GradCheckSetup<double> setup =
      trajkit::make_grad_check_setup<double>(args.seed);
  const trajkit::GradCheckReport report =
      trajkit::grad_check<double>(setup.batch, setup.params, setup.head,
                                  args.step);
  for (const auto& [group, value] : report.group_max) {
    std::cout << "group " << group << " max_rel_error="
              << trajkit::format_float(value) << "\n";
  }
  std::cout << "max_rel_error=" << trajkit::format_float(report.max_rel_error)
            << " tol=" << trajkit::format_float(args.tol) << "\n";
  if (!(report.max_rel_error < args.tol)) {
    throw trajkit::NumericError(
        "gradient check failed: max relative error " +
        trajkit::format_float(report.max_rel_error) + " >= " +
        trajkit::format_float(args.tol));
  }
  std::cout << "gradient check passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "trajkit: deterministic 6DoF trajectory, dataset, and sampler "
      "toolkit"};
  app.require_subcommand(1);
  app.footer("All randomness flows from --seed; flags also read the "
             "TRAJKIT_* environment (e.g. TRAJKIT_SEED).");

  GenTrajArgs gen_args;
  CLI::App* gen = app.add_subcommand(
      "gen-traj", "Sample a library template into a .poseq file");
  gen->add_flag("--list", gen_args.list, "List template names and exit");
  gen->add_option("--template", gen_args.template_name, "Template name");
  gen->add_option("--prompt", gen_args.prompt, "Entity caption")
      ->capture_default_str();
  gen->add_option("--frames", gen_args.frames, "Frame count")
      ->capture_default_str();
  gen->add_option("--fps", gen_args.fps, "Frames per second")
      ->capture_default_str();
  gen->add_option("--out", gen_args.out, "Output .poseq path");

  ComposeArgs compose_args;
  CLI::App* compose = app.add_subcommand(
      "compose-scene", "Place 1-3 templates on the stage with seeded "
                       "collision-free offsets");
  compose->add_option("--template", compose_args.templates,
                      "Template name (repeat per entity)");
  compose->add_option("--kind", compose_args.kinds,
                      "Entity kind, human or animal (repeat per entity)");
  compose->add_option("--prompt", compose_args.prompts,
                      "Entity caption (repeat per entity)");
  compose->add_option("--location", compose_args.location, "Location tag")
      ->capture_default_str();
  compose->add_option("--frames", compose_args.frames, "Frame count")
      ->capture_default_str();
  compose->add_option("--fps", compose_args.fps, "Frames per second")
      ->capture_default_str();
  compose->add_option("--seed", compose_args.seed, "Placement seed")
      ->envname("TRAJKIT_SEED")
      ->capture_default_str();
  compose->add_option("--out", compose_args.out, "Output .poseq path");

  RigArgs rig_args;
  CLI::App* rig = app.add_subcommand(
      "build-rig", "Export the 12-camera surround rig");
  rig->add_option("--radius", rig_args.radius, "Ring radius in meters")
      ->capture_default_str();
  rig->add_option("--height", rig_args.height, "Camera height in meters")
      ->capture_default_str();
  rig->add_option("--out", rig_args.out, "Output rig document path");

  ProjectArgs project_args;
  CLI::App* project = app.add_subcommand(
      "project-2d", "Project a scene through one rig camera into CSV "
                    "tracks");
  project->add_option("--scene", project_args.scene_path, "Scene .poseq path");
  project->add_option("--rig", project_args.rig_path, "Rig document path");
  project->add_option("--camera", project_args.camera, "Camera index")
      ->capture_default_str();
  project->add_option("--out", project_args.out, "Output CSV path");

  ManifestArgs manifest_args;
  CLI::App* manifest = app.add_subcommand(
      "manifest", "Enumerate a seeded dataset manifest");
  manifest->add_option("--budget", manifest_args.budget,
                       "Composition count")
      ->required();
  manifest->add_option("--frames", manifest_args.frames, "Frames per clip")
      ->capture_default_str();
  manifest->add_option("--fps", manifest_args.fps, "Frames per second")
      ->capture_default_str();
  manifest->add_option("--seed", manifest_args.seed, "Enumeration seed")
      ->envname("TRAJKIT_SEED")
      ->capture_default_str();
  manifest->add_option("--out", manifest_args.out, "Output manifest path");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "eval", "Score an estimated scene against a reference scene");
  eval->add_option("--est", eval_args.est_path, "Estimated .poseq path");
  eval->add_option("--gt", eval_args.gt_path, "Reference .poseq path");
  eval->add_option("--out", eval_args.out,
                   "Metric report CSV path (stdout when omitted)");
  eval->add_option("--histogram", eval_args.histogram_out,
                   "Optional entity-class histogram CSV path");
  eval->add_option("--clip-id", eval_args.clip_id, "Clip id for the report")
      ->capture_default_str();

  SampleArgs sample_args;
  CLI::App* sample = app.add_subcommand(
      "sample-demo", "Run annealed guided sampling with the toy denoiser");
  sample->add_option("--steps", sample_args.steps, "Respaced DDIM steps")
      ->capture_default_str();
  sample->add_option("--w", sample_args.w, "CFG guidance strength")
      ->capture_default_str();
  sample->add_option("--tc", sample_args.tc,
                     "Conditioned steps before handing off to the base "
                     "model")
      ->capture_default_str();
  sample->add_option("--alpha", sample_args.alpha, "Adaptor scalar")
      ->capture_default_str();
  sample->add_option("--eta", sample_args.eta,
                     "Ancestral noise scale (0 = deterministic)")
      ->capture_default_str();
  sample->add_option("--negative", sample_args.negative,
                     "Negative branch: uncond or static_pose")
      ->capture_default_str();
  sample->add_option("--seed", sample_args.seed, "Noise seed")
      ->envname("TRAJKIT_SEED")
      ->capture_default_str();
  sample->add_option("--out", sample_args.out, "Latent checkpoint path");

  GradCheckArgs grad_args;
  CLI::App* grad = app.add_subcommand(
      "grad-check", "Compare analytic gradients against finite "
                    "differences");
  grad->add_option("--seed", grad_args.seed, "Batch seed")
      ->envname("TRAJKIT_SEED")
      ->capture_default_str();
  grad->add_option("--step", grad_args.step, "Finite-difference step")
      ->capture_default_str();
  grad->add_option("--tol", grad_args.tol, "Max relative error tolerance")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitUsage, "usage", e.what());
  }

  try {
    if (gen->parsed()) return run_gen_traj(gen_args);
    if (compose->parsed()) return run_compose(compose_args);
    if (rig->parsed()) return run_build_rig(rig_args);
    if (project->parsed()) return run_project(project_args);
    if (manifest->parsed()) return run_manifest(manifest_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (sample->parsed()) return run_sample_demo(sample_args);
    if (grad->parsed()) return run_grad_check(grad_args);
    return fail(kExitUsage, "usage", "no subcommand given");
  } catch (const trajkit::ParseError& e) {
    return fail(kExitParse, "parse", e.what());
  } catch (const trajkit::RangeError& e) {
    return fail(kExitRange, "range", e.what());
  } catch (const trajkit::PlacementError& e) {
    return fail(kExitPlacement, "placement", e.what());
  } catch (const trajkit::NumericError& e) {
    return fail(kExitNumeric, "numeric", e.what());
  } catch (const trajkit::IoError& e) {
    return fail(kExitIo, "io", e.what());
  } catch (const trajkit::ValidationError& e) {
    return fail(kExitValidation, "validation", e.what());
  } catch (const trajkit::Error& e) {
    return fail(kExitValidation, "validation", e.what());
  }
}
