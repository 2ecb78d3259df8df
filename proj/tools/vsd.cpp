// vsd command-line front end.
//
//   simulate     synthesize a crowd scene: annotations + calibration + truth
//   gen-gt       annotations + calibration -> density maps, masks, compliance
//   densify      blur one frame's annotations into a density raster
//   seg-gt       plane density raster -> segmentation masks
//   postprocess  predicted raster -> labeled NSDC regions (or soft-mask cut)
//   evaluate     predicted mask/raster vs D_n / D_c -> metrics report
//
// Exit codes: 0 ok, 2 parse error, 3 geometry error, 4 constraint violation.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vsd/config.hpp"
#include "vsd/io.hpp"
#include "vsd/metrics.hpp"
#include "vsd/pipeline.hpp"
#include "vsd/postprocess.hpp"
#include "vsd/simulate.hpp"

namespace fs = std::filesystem;

namespace {

struct ConfigArgs {
  std::string config_path;
  std::string preset;
  std::optional<double> d_t;
  std::string calibration_path;
};

void add_config_flags(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.config_path, "pipeline config JSON");
  cmd->add_option("--preset", args.preset,
                  "parameter preset: citystreet or pets2009");
  cmd->add_option("--d-t", args.d_t, "social-distance threshold (m)");
  cmd->add_option("--calibration", args.calibration_path,
                  "camera calibration JSON (overrides config)");
}

// Config file first, then preset, then individual flag overrides.
vsd::PipelineConfig resolve_config(const ConfigArgs& args) {
  vsd::PipelineConfig cfg;
  if (!args.config_path.empty()) {
    cfg = vsd::read_pipeline_config(args.config_path);
  } else {
    // default plane grid: 24 x 24 m around the origin at 0.1 m cells
    cfg.plane.grid = vsd::GridSpec{-2.0, -2.0, 0.1, 240, 240};
  }
  if (!args.preset.empty()) vsd::apply_preset(cfg, args.preset);
  if (args.d_t) cfg.d_t = *args.d_t;
  if (!args.calibration_path.empty())
    cfg.calibration_path = args.calibration_path;
  cfg.validate();
  return cfg;
}

std::vector<vsd::CameraModel> load_cameras(const vsd::PipelineConfig& cfg) {
  if (cfg.calibration_path.empty())
    throw vsd::InvalidConfig(
        "no calibration file given (--calibration or config key)");
  return vsd::read_calibration(cfg.calibration_path);
}

int cmd_simulate(const std::string& scene_path, const std::string& out_dir,
                 int frames, std::optional<uint64_t> seed_override,
                 double d_t) {
  std::vector<vsd::CameraModel> cameras;
  vsd::SceneConfig scene_cfg = vsd::read_scene_config(scene_path, &cameras);
  if (seed_override) scene_cfg.seed = *seed_override;
  if (cameras.empty())
    cameras = vsd::default_camera_rig(scene_cfg.area_width,
                                      scene_cfg.area_height, 1.75);

  vsd::HeadPlane plane;
  plane.h_h = 1.75;
  plane.grid = vsd::GridSpec{-2.0, -2.0, 0.1,
                             static_cast<int>(scene_cfg.area_width * 10) + 40,
                             static_cast<int>(scene_cfg.area_height * 10) + 40};

  fs::create_directories(out_dir);
  std::vector<vsd::HeadAnnotation> all_annotations;
  vsd::TruthSidecar truth;
  truth.seed = scene_cfg.seed;
  truth.d_t = d_t;

  for (int f = 0; f < frames; ++f) {
    vsd::SceneConfig frame_cfg = scene_cfg;
    frame_cfg.seed = scene_cfg.seed + static_cast<uint64_t>(f);
    const vsd::Scene scene = vsd::generate_scene(frame_cfg, d_t);

    for (const auto& cam : cameras) {
      auto rendered = vsd::render_annotations(scene, cam, plane, f);
      all_annotations.insert(all_annotations.end(), rendered.begin(),
                             rendered.end());
    }

    // Ground-truth compliance of the synthetic world positions.
    std::vector<vsd::HeadAnnotation> world;
    for (size_t i = 0; i < scene.heads.size(); ++i) {
      vsd::HeadAnnotation a;
      a.frame_id = f;
      a.position = scene.heads[i];
      a.space = vsd::Space::plane();
      a.person_id = static_cast<int64_t>(i);
      world.push_back(a);
    }
    const vsd::CompliancePartition part = vsd::classify_compliance(world, d_t);

    vsd::TruthFrame tf;
    tf.frame_id = f;
    for (size_t i = 0; i < scene.heads.size(); ++i) {
      tf.persons.push_back({static_cast<int>(i), scene.heads[i],
                            scene.cluster_id[i],
                            static_cast<bool>(part.compliant[i]),
                            part.min_distance[i]});
    }
    truth.frames.push_back(std::move(tf));
  }

  vsd::write_annotations_csv(fs::path(out_dir) / "annotations.csv",
                             all_annotations);
  vsd::write_calibration(fs::path(out_dir) / "calibration.json", cameras);
  vsd::write_truth(fs::path(out_dir) / "truth.json", truth);
  return 0;
}

int cmd_gen_gt(const std::string& annotations_path, const ConfigArgs& args,
               const std::string& out_dir) {
  const vsd::PipelineConfig cfg = resolve_config(args);
  const auto annotations = vsd::read_annotations_csv(annotations_path);
  const std::vector<vsd::CameraModel> cameras = load_cameras(cfg);
  const auto setups = vsd::build_camera_setups(cameras, cfg.plane);
  const auto frames = vsd::group_frames(annotations);

  const auto results = vsd::gen_gt_all(frames, setups, cfg);

  fs::create_directories(out_dir);
  std::vector<vsd::ComplianceRow> rows;
  for (const auto& art : results) {
    vsd::write_frame_artifacts(out_dir, art);
    rows.insert(rows.end(), art.compliance.begin(), art.compliance.end());
  }
  vsd::write_file_atomic(fs::path(out_dir) / "compliance.csv",
                         vsd::compliance_to_csv(rows));
  // effective parameters only; input paths would make re-runs diverge
  vsd::PipelineConfig effective = cfg;
  effective.calibration_path.clear();
  vsd::write_pipeline_config(fs::path(out_dir) / "config.json", effective);
  return 0;
}

int cmd_densify(const std::string& annotations_path, const ConfigArgs& args,
                const std::string& space_name, const std::string& camera_id,
                std::optional<int64_t> frame_id, const std::string& kind_name,
                const std::string& out_path) {
  const vsd::PipelineConfig cfg = resolve_config(args);
  auto annotations = vsd::read_annotations_csv(annotations_path);

  if (frame_id) {
    std::erase_if(annotations,
                  [&](const auto& a) { return a.frame_id != *frame_id; });
  } else {
    for (const auto& a : annotations) {
      if (a.frame_id != annotations.front().frame_id)
        throw vsd::InvalidConfig(
            "annotations span multiple frames; select one with --frame-id");
    }
  }

  vsd::Space space = vsd::Space::plane();
  vsd::GridSpec grid = cfg.plane.grid;
  vsd::GaussianKernelSpec kernel = cfg.plane_kernel;
  if (space_name == "image") {
    if (camera_id.empty())
      throw vsd::InvalidConfig("--camera is required for image space");
    const auto cameras = load_cameras(cfg);
    const auto it =
        std::find_if(cameras.begin(), cameras.end(),
                     [&](const auto& c) { return c.id == camera_id; });
    if (it == cameras.end())
      throw vsd::InvalidConfig("camera '" + camera_id + "' not in calibration");
    space = vsd::Space::image(camera_id);
    grid = it->image_grid();
    kernel = cfg.image_kernel;
  } else if (space_name != "plane") {
    throw vsd::InvalidConfig("--space must be image or plane");
  }

  vsd::MapKind kind = vsd::MapKind::Predicted;
  if (kind_name == "nsdc")
    kind = vsd::MapKind::Nsdc;
  else if (kind_name == "sdc")
    kind = vsd::MapKind::Sdc;
  else if (kind_name != "predicted")
    throw vsd::InvalidConfig("--kind must be nsdc, sdc or predicted");

  const vsd::DensityMap map =
      vsd::densify(annotations, kernel, grid, space, kind);
  vsd::write_density(out_path, map);
  return 0;
}

int cmd_seg_gt(const std::string& dn_path, const ConfigArgs& args,
               const std::string& out_dir) {
  const vsd::PipelineConfig cfg = resolve_config(args);
  const vsd::DensityMap d_n = vsd::read_density(dn_path);
  if (!d_n.space.is_plane())
    throw vsd::WrongSpace("seg-gt expects a plane-space density raster");

  fs::create_directories(out_dir);
  const vsd::BinaryMask plane_mask = vsd::make_plane_mask(d_n, cfg.morph);
  vsd::write_mask_pgm(fs::path(out_dir) / "mask_plane.pgm", plane_mask);

  if (!cfg.calibration_path.empty()) {
    const auto cameras = load_cameras(cfg);
    const auto setups = vsd::build_camera_setups(cameras, cfg.plane);
    for (const auto& s : setups) {
      const vsd::BinaryMask cam_mask = vsd::project_mask_to_camera(
          plane_mask, s.hom, s.model.image_grid());
      vsd::write_mask_pgm(
          fs::path(out_dir) / ("mask_image_" + s.model.id + ".pgm"), cam_mask);
    }
  }
  return 0;
}

int cmd_postprocess(const std::string& pred_path, const ConfigArgs& args,
                    const std::string& mode, const std::string& out_dir,
                    std::optional<int64_t> frame_id) {
  const vsd::PipelineConfig cfg = resolve_config(args);
  const vsd::DensityMap pred = vsd::read_density(pred_path);
  fs::create_directories(out_dir);

  if (mode == "softmask") {
    const vsd::BinaryMask mask =
        vsd::threshold_soft_mask(pred, cfg.post.soft_mask_threshold);
    vsd::write_mask_pgm(fs::path(out_dir) / "mask.pgm", mask);
    return 0;
  }
  if (mode != "density")
    throw vsd::InvalidConfig("--mode must be density or softmask");

  const auto regions = vsd::extract_regions(pred, cfg.post);
  std::vector<vsd::RegionReportEntry> entries;
  for (const auto& r : regions)
    entries.push_back({frame_id.value_or(0), r});
  vsd::write_region_report(fs::path(out_dir) / "regions.json", entries);
  vsd::write_overlay_pgm(
      fs::path(out_dir) / "overlay.pgm",
      vsd::region_overlay(regions, pred.cells.width(), pred.cells.height()),
      pred.space);
  return 0;
}

struct EvalFrameSpec {
  int64_t frame_id = 0;
  std::string pred;
  std::string dn;
  std::string dc;
  std::string gt_mask;  // optional
  std::optional<double> gt_count;
};

// Predicted rasters go through the density post-processing chain (the kept
// regions form the evaluated mask and the raster mass the predicted count);
// predicted masks are evaluated as-is.
vsd::FrameEval evaluate_frame(const EvalFrameSpec& spec,
                              const vsd::PipelineConfig& cfg) {
  const vsd::DensityMap d_n = vsd::read_density(spec.dn);
  const vsd::DensityMap d_c = vsd::read_density(spec.dc);

  vsd::BinaryMask pred_mask;
  vsd::FrameEval ev;
  ev.frame_id = spec.frame_id;

  if (spec.pred.ends_with(".vsdm")) {
    const vsd::DensityMap pred = vsd::read_density(spec.pred);
    const auto regions = vsd::extract_regions(pred, cfg.post);
    pred_mask.space = pred.space;
    pred_mask.grid = pred.grid;
    pred_mask.cells =
        vsd::Raster<uint8_t>(pred.cells.width(), pred.cells.height(), 0);
    for (const auto& r : regions)
      for (const auto& c : r.cells) pred_mask.cells.at(c.x, c.y) = 1;
    ev.pred_count = pred.mass();
    ev.has_counts = true;
  } else {
    pred_mask = vsd::read_mask_pgm(spec.pred);
    if (pred_mask.space.is_plane()) pred_mask.grid = d_n.grid;
  }

  ev.confusion = vsd::density_confusion(pred_mask, d_n, d_c);
  ev.scores = vsd::derive_scores(ev.confusion);
  if (ev.has_counts)
    ev.gt_count = spec.gt_count.value_or(d_n.mass() + d_c.mass());

  if (!spec.gt_mask.empty()) {
    vsd::BinaryMask gt = vsd::read_mask_pgm(spec.gt_mask);
    if (gt.space.is_plane()) gt.grid = d_n.grid;
    ev.dice = vsd::dice(pred_mask, gt);
    ev.has_dice = true;
  }
  return ev;
}

int cmd_evaluate(const std::vector<EvalFrameSpec>& specs,
                 const ConfigArgs& args, const std::string& out_dir,
                 const std::string& method) {
  const vsd::PipelineConfig cfg = resolve_config(args);
  std::vector<vsd::FrameEval> evals;
  evals.reserve(specs.size());
  for (const auto& s : specs) evals.push_back(evaluate_frame(s, cfg));
  const vsd::EvalReport report = vsd::aggregate_frames(std::move(evals));

  fs::create_directories(out_dir);
  vsd::write_eval_report(fs::path(out_dir) / "eval.json", report);
  vsd::write_eval_table(fs::path(out_dir) / "eval.txt", report, method);
  return 0;
}

std::vector<EvalFrameSpec> read_eval_manifest(const std::string& path) {
  const vsd::json j = vsd::detail::parse_json_file(path);
  if (!j.is_array())
    throw vsd::ParseError(path, 0, "manifest must be a JSON array");
  std::vector<EvalFrameSpec> specs;
  for (const auto& item : j) {
    vsd::detail::require_keys(
        item, {"frame_id", "pred", "dn", "dc", "gt_mask", "gt_count"}, path,
        "manifest entry");
    EvalFrameSpec s;
    s.frame_id =
        vsd::detail::get_field<int64_t>(item, "frame_id", path, "manifest");
    s.pred = vsd::detail::get_field<std::string>(item, "pred", path, "manifest");
    s.dn = vsd::detail::get_field<std::string>(item, "dn", path, "manifest");
    s.dc = vsd::detail::get_field<std::string>(item, "dc", path, "manifest");
    if (item.contains("gt_mask"))
      s.gt_mask =
          vsd::detail::get_field<std::string>(item, "gt_mask", path, "manifest");
    if (item.contains("gt_count"))
      s.gt_count =
          vsd::detail::get_field<double>(item, "gt_count", path, "manifest");
    specs.push_back(std::move(s));
  }
  return specs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"visual social-distancing ground-truth and evaluation toolkit"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "synthesize a crowd scene");
  std::string sim_scene, sim_out = "out";
  int sim_frames = 1;
  std::optional<uint64_t> sim_seed;
  double sim_dt = 2.0;
  sim->add_option("--scene", sim_scene, "scene config JSON")->required();
  sim->add_option("--out-dir", sim_out, "output directory");
  sim->add_option("--frames", sim_frames, "number of frames to generate")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "override the scene seed");
  sim->add_option("--d-t", sim_dt, "social-distance threshold (m)");

  // gen-gt
  auto* gen = app.add_subcommand("gen-gt", "generate ground truth");
  std::string gen_annotations, gen_out = "out";
  ConfigArgs gen_cfg;
  gen->add_option("--annotations", gen_annotations, "annotation CSV")
      ->required();
  gen->add_option("--out-dir", gen_out, "output directory");
  add_config_flags(gen, gen_cfg);

  // densify
  auto* dens = app.add_subcommand("densify", "annotations -> density raster");
  std::string dens_annotations, dens_space = "plane", dens_camera,
              dens_kind = "predicted", dens_out = "density.vsdm";
  std::optional<int64_t> dens_frame;
  ConfigArgs dens_cfg;
  dens->add_option("--annotations", dens_annotations, "annotation CSV")
      ->required();
  dens->add_option("--space", dens_space, "image or plane");
  dens->add_option("--camera", dens_camera, "camera id (image space)");
  dens->add_option("--frame-id", dens_frame, "frame to densify");
  dens->add_option("--kind", dens_kind, "nsdc, sdc or predicted");
  dens->add_option("--out", dens_out, "output raster path");
  add_config_flags(dens, dens_cfg);

  // seg-gt
  auto* seg = app.add_subcommand("seg-gt", "density raster -> GT masks");
  std::string seg_dn, seg_out = "out";
  ConfigArgs seg_cfg;
  seg->add_option("--dn", seg_dn, "plane NSDC density raster")->required();
  seg->add_option("--out-dir", seg_out, "output directory");
  add_config_flags(seg, seg_cfg);

  // postprocess
  auto* post = app.add_subcommand("postprocess",
                                  "predicted raster -> labeled regions");
  std::string post_pred, post_mode = "density", post_out = "out";
  std::optional<int64_t> post_frame;
  ConfigArgs post_cfg;
  post->add_option("--pred", post_pred, "predicted density raster")
      ->required();
  post->add_option("--mode", post_mode, "density or softmask");
  post->add_option("--frame-id", post_frame, "frame id for the report");
  post->add_option("--out-dir", post_out, "output directory");
  add_config_flags(post, post_cfg);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "score predictions");
  std::string eval_pred, eval_dn, eval_dc, eval_gt_mask, eval_manifest,
      eval_out = "out", eval_method = "toolkit";
  std::optional<int64_t> eval_frame;
  ConfigArgs eval_cfg;
  eval->add_option("--pred", eval_pred, "predicted mask (.pgm) or raster (.vsdm)");
  eval->add_option("--dn", eval_dn, "NSDC density raster");
  eval->add_option("--dc", eval_dc, "SDC density raster");
  eval->add_option("--gt-mask", eval_gt_mask, "ground-truth mask for Dice");
  eval->add_option("--frame-id", eval_frame, "frame id for the report");
  eval->add_option("--manifest", eval_manifest,
                   "JSON manifest of frames (overrides --pred/--dn/--dc)");
  eval->add_option("--out-dir", eval_out, "output directory");
  eval->add_option("--method", eval_method, "method name for the text table");
  add_config_flags(eval, eval_cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(sim_scene, sim_out, sim_frames, sim_seed, sim_dt);
    if (gen->parsed()) return cmd_gen_gt(gen_annotations, gen_cfg, gen_out);
    if (dens->parsed())
      return cmd_densify(dens_annotations, dens_cfg, dens_space, dens_camera,
                         dens_frame, dens_kind, dens_out);
    if (seg->parsed()) return cmd_seg_gt(seg_dn, seg_cfg, seg_out);
    if (post->parsed())
      return cmd_postprocess(post_pred, post_cfg, post_mode, post_out,
                             post_frame);
    if (eval->parsed()) {
      std::vector<EvalFrameSpec> specs;
      if (!eval_manifest.empty()) {
        specs = read_eval_manifest(eval_manifest);
      } else {
        if (eval_pred.empty() || eval_dn.empty() || eval_dc.empty())
          throw vsd::InvalidConfig(
              "evaluate needs --pred, --dn and --dc (or --manifest)");
        EvalFrameSpec s;
        s.frame_id = eval_frame.value_or(0);
        s.pred = eval_pred;
        s.dn = eval_dn;
        s.dc = eval_dc;
        s.gt_mask = eval_gt_mask;
        specs.push_back(std::move(s));
      }
      return cmd_evaluate(specs, eval_cfg, eval_out, eval_method);
    }
  } catch (const vsd::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const vsd::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 3;
  } catch (const vsd::ConstraintError& e) {
    std::cerr << "constraint violation: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
