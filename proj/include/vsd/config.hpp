// JSON file formats: camera calibration, head-plane spec, pipeline and scene
// configuration, the simulator truth sidecar, and the region / evaluation
// reports. Configuration parsing is strict: unknown keys are rejected so a
// typo never silently falls back to a default.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsd/density.hpp"
#include "vsd/errors.hpp"
#include "vsd/geometry.hpp"
#include "vsd/io.hpp"
#include "vsd/maskgen.hpp"
#include "vsd/metrics.hpp"
#include "vsd/postprocess.hpp"
#include "vsd/simulate.hpp"

namespace vsd {

using json = nlohmann::json;

namespace detail {

inline void require_keys(const json& obj,
                         std::initializer_list<const char*> allowed,
                         const std::string& file, const std::string& where) {
  if (!obj.is_object())
    throw ParseError(file, 0, where + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ParseError(file, 0, where + ": unknown key '" + key + "'");
  }
}

inline json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw ParseError(path.string(), 0, "invalid JSON");
  return j;
}

template <typename T>
T get_field(const json& obj, const char* key, const std::string& file,
            const std::string& where) {
  if (!obj.contains(key))
    throw ParseError(file, 0, where + ": missing key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(file, 0, where + ": bad value for '" + key + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// camera calibration

inline json camera_to_json(const CameraModel& cam) {
  json j;
  j["id"] = cam.id;
  j["fx"] = cam.intrinsics.fx;
  j["fy"] = cam.intrinsics.fy;
  j["cx"] = cam.intrinsics.cx;
  j["cy"] = cam.intrinsics.cy;
  j["skew"] = cam.intrinsics.skew;
  j["R"] = cam.extrinsics.rotation.m;
  j["t"] = {cam.extrinsics.translation.x, cam.extrinsics.translation.y,
            cam.extrinsics.translation.z};
  j["width"] = cam.image_width;
  j["height"] = cam.image_height;
  return j;
}

inline CameraModel camera_from_json(const json& j, const std::string& file) {
  detail::require_keys(
      j, {"id", "fx", "fy", "cx", "cy", "skew", "R", "t", "width", "height"},
      file, "camera");
  CameraModel cam;
  cam.id = detail::get_field<std::string>(j, "id", file, "camera");
  cam.intrinsics.fx = detail::get_field<double>(j, "fx", file, "camera");
  cam.intrinsics.fy = detail::get_field<double>(j, "fy", file, "camera");
  cam.intrinsics.cx = detail::get_field<double>(j, "cx", file, "camera");
  cam.intrinsics.cy = detail::get_field<double>(j, "cy", file, "camera");
  cam.intrinsics.skew = detail::get_field<double>(j, "skew", file, "camera");
  const auto r =
      detail::get_field<std::vector<double>>(j, "R", file, "camera");
  if (r.size() != 9)
    throw ParseError(file, 0, "camera '" + cam.id + "': R must have 9 values");
  std::copy(r.begin(), r.end(), cam.extrinsics.rotation.m.begin());
  const auto t =
      detail::get_field<std::vector<double>>(j, "t", file, "camera");
  if (t.size() != 3)
    throw ParseError(file, 0, "camera '" + cam.id + "': t must have 3 values");
  cam.extrinsics.translation = {t[0], t[1], t[2]};
  cam.image_width = detail::get_field<int>(j, "width", file, "camera");
  cam.image_height = detail::get_field<int>(j, "height", file, "camera");
  return cam;
}

inline void write_calibration(const std::filesystem::path& path,
                              const std::vector<CameraModel>& cams) {
  json j = json::array();
  for (const auto& c : cams) j.push_back(camera_to_json(c));
  write_file_atomic(path, j.dump(2) + "\n");
}

inline std::vector<CameraModel> read_calibration(
    const std::filesystem::path& path) {
  const json j = detail::parse_json_file(path);
  if (!j.is_array())
    throw ParseError(path.string(), 0, "calibration must be a JSON array");
  std::vector<CameraModel> cams;
  for (const auto& item : j) cams.push_back(camera_from_json(item, path.string()));
  for (size_t i = 0; i < cams.size(); ++i) {
    for (size_t k = i + 1; k < cams.size(); ++k) {
      if (cams[i].id == cams[k].id)
        throw ParseError(path.string(), 0,
                         "duplicate camera id '" + cams[i].id + "'");
    }
  }
  return cams;
}

// ---------------------------------------------------------------------------
// head-plane spec

inline json plane_to_json(const HeadPlane& plane) {
  json j;
  j["h_h"] = plane.h_h;
  j["origin_x"] = plane.grid.origin_x;
  j["origin_y"] = plane.grid.origin_y;
  j["cell_size"] = plane.grid.cell_size;
  j["cells_x"] = plane.grid.width;
  j["cells_y"] = plane.grid.height;
  return j;
}

inline HeadPlane plane_from_json(const json& j, const std::string& file) {
  detail::require_keys(
      j, {"h_h", "origin_x", "origin_y", "cell_size", "cells_x", "cells_y"},
      file, "plane");
  HeadPlane p;
  p.h_h = detail::get_field<double>(j, "h_h", file, "plane");
  p.grid.origin_x = detail::get_field<double>(j, "origin_x", file, "plane");
  p.grid.origin_y = detail::get_field<double>(j, "origin_y", file, "plane");
  p.grid.cell_size = detail::get_field<double>(j, "cell_size", file, "plane");
  p.grid.width = detail::get_field<int>(j, "cells_x", file, "plane");
  p.grid.height = detail::get_field<int>(j, "cells_y", file, "plane");
  return p;
}

// ---------------------------------------------------------------------------
// pipeline configuration

struct PipelineConfig {
  HeadPlane plane;
  double d_t = 2.0;
  double merge_radius = 0.25;
  GaussianKernelSpec plane_kernel = kernel_presets::citystreet_plane;
  GaussianKernelSpec image_kernel = kernel_presets::citystreet_image;
  MorphSchedule morph = morph_presets::citystreet;
  PostprocessConfig post = postprocess_presets::citystreet;
  std::string calibration_path;

  void validate() const {
    plane.validate();
    if (!(d_t > 0.0)) throw InvalidConfig("d_t must be > 0");
    if (!(merge_radius > 0.0)) throw InvalidConfig("merge_radius must be > 0");
    plane_kernel.validate();
    image_kernel.validate();
    morph.validate();
    post.validate();
  }
};

// Fill kernel / morphology / post-processing defaults from a dataset preset.
inline void apply_preset(PipelineConfig& cfg, const std::string& name) {
  if (name == "citystreet") {
    cfg.plane_kernel = kernel_presets::citystreet_plane;
    cfg.image_kernel = kernel_presets::citystreet_image;
    cfg.morph = morph_presets::citystreet;
    cfg.post = postprocess_presets::citystreet;
  } else if (name == "pets2009") {
    cfg.plane_kernel = kernel_presets::pets2009_plane;
    cfg.image_kernel = kernel_presets::pets2009_image;
    cfg.morph = morph_presets::pets2009;
    cfg.post = postprocess_presets::pets2009;
  } else {
    throw InvalidConfig("unknown preset '" + name +
                        "' (expected citystreet or pets2009)");
  }
}

namespace detail {

inline GaussianKernelSpec kernel_from_json(const json& j,
                                           const std::string& file,
                                           const std::string& where) {
  require_keys(j, {"size", "sigma"}, file, where);
  GaussianKernelSpec k;
  k.size = get_field<int>(j, "size", file, where);
  k.sigma = get_field<double>(j, "sigma", file, where);
  return k;
}

inline json kernel_to_json(const GaussianKernelSpec& k) {
  return json{{"size", k.size}, {"sigma", k.sigma}};
}

}  // namespace detail

inline PipelineConfig pipeline_config_from_json(const json& j,
                                                const std::string& file) {
  detail::require_keys(j,
                       {"preset", "plane", "d_t", "merge_radius",
                        "calibration", "plane_kernel", "image_kernel", "morph",
                        "postprocess"},
                       file, "config");
  PipelineConfig cfg;
  if (j.contains("preset"))
    apply_preset(cfg, detail::get_field<std::string>(j, "preset", file, "config"));
  if (!j.contains("plane"))
    throw ParseError(file, 0, "config: missing key 'plane'");
  cfg.plane = plane_from_json(j.at("plane"), file);
  if (j.contains("d_t"))
    cfg.d_t = detail::get_field<double>(j, "d_t", file, "config");
  if (j.contains("merge_radius"))
    cfg.merge_radius =
        detail::get_field<double>(j, "merge_radius", file, "config");
  if (j.contains("calibration"))
    cfg.calibration_path =
        detail::get_field<std::string>(j, "calibration", file, "config");
  if (j.contains("plane_kernel"))
    cfg.plane_kernel =
        detail::kernel_from_json(j.at("plane_kernel"), file, "plane_kernel");
  if (j.contains("image_kernel"))
    cfg.image_kernel =
        detail::kernel_from_json(j.at("image_kernel"), file, "image_kernel");
  if (j.contains("morph")) {
    const json& m = j.at("morph");
    detail::require_keys(m,
                         {"dilation_side", "dilation_passes", "erosion_side",
                          "erosion_passes", "t_s"},
                         file, "morph");
    if (m.contains("dilation_side"))
      cfg.morph.dilation_side =
          detail::get_field<int>(m, "dilation_side", file, "morph");
    if (m.contains("dilation_passes"))
      cfg.morph.dilation_passes =
          detail::get_field<int>(m, "dilation_passes", file, "morph");
    if (m.contains("erosion_side"))
      cfg.morph.erosion_side =
          detail::get_field<int>(m, "erosion_side", file, "morph");
    if (m.contains("erosion_passes"))
      cfg.morph.erosion_passes =
          detail::get_field<int>(m, "erosion_passes", file, "morph");
    if (m.contains("t_s"))
      cfg.morph.t_s = detail::get_field<double>(m, "t_s", file, "morph");
  }
  if (j.contains("postprocess")) {
    const json& p = j.at("postprocess");
    detail::require_keys(p,
                         {"density_threshold", "soft_mask_threshold",
                          "min_count", "danger_count"},
                         file, "postprocess");
    if (p.contains("density_threshold"))
      cfg.post.density_threshold =
          detail::get_field<double>(p, "density_threshold", file, "postprocess");
    if (p.contains("soft_mask_threshold"))
      cfg.post.soft_mask_threshold = detail::get_field<double>(
          p, "soft_mask_threshold", file, "postprocess");
    if (p.contains("min_count"))
      cfg.post.min_count =
          detail::get_field<double>(p, "min_count", file, "postprocess");
    if (p.contains("danger_count"))
      cfg.post.danger_count =
          detail::get_field<double>(p, "danger_count", file, "postprocess");
  }
  cfg.validate();
  return cfg;
}

inline json pipeline_config_to_json(const PipelineConfig& cfg) {
  json j;
  j["plane"] = plane_to_json(cfg.plane);
  j["d_t"] = cfg.d_t;
  j["merge_radius"] = cfg.merge_radius;
  if (!cfg.calibration_path.empty()) j["calibration"] = cfg.calibration_path;
  j["plane_kernel"] = detail::kernel_to_json(cfg.plane_kernel);
  j["image_kernel"] = detail::kernel_to_json(cfg.image_kernel);
  j["morph"] = {{"dilation_side", cfg.morph.dilation_side},
                {"dilation_passes", cfg.morph.dilation_passes},
                {"erosion_side", cfg.morph.erosion_side},
                {"erosion_passes", cfg.morph.erosion_passes},
                {"t_s", cfg.morph.t_s}};
  j["postprocess"] = {{"density_threshold", cfg.post.density_threshold},
                      {"soft_mask_threshold", cfg.post.soft_mask_threshold},
                      {"min_count", cfg.post.min_count},
                      {"danger_count", cfg.post.danger_count}};
  return j;
}

inline PipelineConfig read_pipeline_config(const std::filesystem::path& path) {
  return pipeline_config_from_json(detail::parse_json_file(path),
                                   path.string());
}

inline void write_pipeline_config(const std::filesystem::path& path,
                                  const PipelineConfig& cfg) {
  write_file_atomic(path, pipeline_config_to_json(cfg).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// scene configuration

inline json scene_config_to_json(const SceneConfig& cfg,
                                 const std::vector<CameraModel>& cameras) {
  json j;
  j["seed"] = cfg.seed;
  j["area"] = {{"width", cfg.area_width}, {"height", cfg.area_height}};
  j["n_isolated"] = cfg.n_isolated;
  json cl = json::array();
  for (const auto& c : cfg.clusters)
    cl.push_back(json{{"center", {c.center.x, c.center.y}},
                      {"n", c.n},
                      {"spread", c.spread}});
  j["clusters"] = cl;
  j["min_isolated_spacing"] = cfg.min_isolated_spacing;
  j["occlusion_dropout"] = cfg.occlusion_dropout;
  j["max_attempts"] = cfg.max_attempts;
  if (!cameras.empty()) {
    json cams = json::array();
    for (const auto& c : cameras) cams.push_back(camera_to_json(c));
    j["cameras"] = cams;
  }
  return j;
}

inline SceneConfig scene_config_from_json(const json& j,
                                          const std::string& file,
                                          std::vector<CameraModel>* cameras) {
  detail::require_keys(j,
                       {"seed", "area", "n_isolated", "clusters",
                        "min_isolated_spacing", "occlusion_dropout",
                        "max_attempts", "cameras"},
                       file, "scene");
  SceneConfig cfg;
  cfg.seed = detail::get_field<uint64_t>(j, "seed", file, "scene");
  if (!j.contains("area")) throw ParseError(file, 0, "scene: missing 'area'");
  detail::require_keys(j.at("area"), {"width", "height"}, file, "area");
  cfg.area_width = detail::get_field<double>(j.at("area"), "width", file, "area");
  cfg.area_height =
      detail::get_field<double>(j.at("area"), "height", file, "area");
  if (j.contains("n_isolated"))
    cfg.n_isolated = detail::get_field<int>(j, "n_isolated", file, "scene");
  if (j.contains("clusters")) {
    for (const auto& c : j.at("clusters")) {
      detail::require_keys(c, {"center", "n", "spread"}, file, "cluster");
      ClusterSpec cl;
      const auto center =
          detail::get_field<std::vector<double>>(c, "center", file, "cluster");
      if (center.size() != 2)
        throw ParseError(file, 0, "cluster center must have 2 values");
      cl.center = {center[0], center[1]};
      cl.n = detail::get_field<int>(c, "n", file, "cluster");
      cl.spread = detail::get_field<double>(c, "spread", file, "cluster");
      cfg.clusters.push_back(cl);
    }
  }
  if (j.contains("min_isolated_spacing"))
    cfg.min_isolated_spacing =
        detail::get_field<double>(j, "min_isolated_spacing", file, "scene");
  if (j.contains("occlusion_dropout"))
    cfg.occlusion_dropout =
        detail::get_field<double>(j, "occlusion_dropout", file, "scene");
  if (j.contains("max_attempts"))
    cfg.max_attempts = detail::get_field<int>(j, "max_attempts", file, "scene");
  if (cameras != nullptr) {
    cameras->clear();
    if (j.contains("cameras")) {
      for (const auto& c : j.at("cameras"))
        cameras->push_back(camera_from_json(c, file));
    }
  }
  return cfg;
}

inline SceneConfig read_scene_config(const std::filesystem::path& path,
                                     std::vector<CameraModel>* cameras) {
  return scene_config_from_json(detail::parse_json_file(path), path.string(),
                                cameras);
}

// ---------------------------------------------------------------------------
// simulator truth sidecar

struct TruthPerson {
  int index = 0;
  Vec2 position;
  int cluster_id = 0;
  bool compliant = false;
  double min_distance = 0.0;
};

struct TruthFrame {
  int64_t frame_id = 0;
  std::vector<TruthPerson> persons;

  int nsdc_count() const {
    int n = 0;
    for (const auto& p : persons) n += p.compliant ? 0 : 1;
    return n;
  }
  int sdc_count() const {
    return static_cast<int>(persons.size()) - nsdc_count();
  }
};

struct TruthSidecar {
  uint64_t seed = 0;
  double d_t = 2.0;
  std::vector<TruthFrame> frames;
};

inline void write_truth(const std::filesystem::path& path,
                        const TruthSidecar& truth) {
  json j;
  j["seed"] = truth.seed;
  j["d_t"] = truth.d_t;
  json frames = json::array();
  for (const auto& f : truth.frames) {
    json persons = json::array();
    for (const auto& p : f.persons) {
      json pj;
      pj["index"] = p.index;
      pj["x"] = p.position.x;
      pj["y"] = p.position.y;
      pj["cluster_id"] = p.cluster_id;
      pj["compliant"] = p.compliant;
      // infinity is not representable in JSON; null means "alone"
      if (std::isfinite(p.min_distance))
        pj["min_distance"] = p.min_distance;
      else
        pj["min_distance"] = nullptr;
      persons.push_back(pj);
    }
    frames.push_back(json{{"frame_id", f.frame_id}, {"persons", persons}});
  }
  j["frames"] = frames;
  write_file_atomic(path, j.dump(2) + "\n");
}

inline TruthSidecar read_truth(const std::filesystem::path& path) {
  const json j = detail::parse_json_file(path);
  const std::string& file = path.string();
  detail::require_keys(j, {"seed", "d_t", "frames"}, file, "truth");
  TruthSidecar t;
  t.seed = detail::get_field<uint64_t>(j, "seed", file, "truth");
  t.d_t = detail::get_field<double>(j, "d_t", file, "truth");
  for (const auto& fj : j.at("frames")) {
    detail::require_keys(fj, {"frame_id", "persons"}, file, "frame");
    TruthFrame f;
    f.frame_id = detail::get_field<int64_t>(fj, "frame_id", file, "frame");
    for (const auto& pj : fj.at("persons")) {
      detail::require_keys(
          pj, {"index", "x", "y", "cluster_id", "compliant", "min_distance"},
          file, "person");
      TruthPerson p;
      p.index = detail::get_field<int>(pj, "index", file, "person");
      p.position.x = detail::get_field<double>(pj, "x", file, "person");
      p.position.y = detail::get_field<double>(pj, "y", file, "person");
      p.cluster_id = detail::get_field<int>(pj, "cluster_id", file, "person");
      p.compliant = detail::get_field<bool>(pj, "compliant", file, "person");
      p.min_distance = pj.at("min_distance").is_null()
                           ? std::numeric_limits<double>::infinity()
                           : detail::get_field<double>(pj, "min_distance",
                                                       file, "person");
      f.persons.push_back(p);
    }
    t.frames.push_back(std::move(f));
  }
  return t;
}

// ---------------------------------------------------------------------------
// region report

struct RegionReportEntry {
  int64_t frame_id = 0;
  RegionMask region;
};

inline void write_region_report(const std::filesystem::path& path,
                                const std::vector<RegionReportEntry>& entries) {
  json arr = json::array();
  for (const auto& e : entries) {
    json j;
    j["frame_id"] = e.frame_id;
    j["region_id"] = e.region.id;
    j["count"] = e.region.count;
    j["risk"] = risk_label_name(e.region.risk);
    j["bbox"] = {e.region.bbox_x0, e.region.bbox_y0, e.region.bbox_x1,
                 e.region.bbox_y1};
    j["area_cells"] = e.region.cells.size();
    arr.push_back(j);
  }
  write_file_atomic(path, arr.dump(2) + "\n");
}

inline std::vector<RegionReportEntry> read_region_report(
    const std::filesystem::path& path) {
  const json arr = detail::parse_json_file(path);
  const std::string& file = path.string();
  if (!arr.is_array())
    throw ParseError(file, 0, "region report must be a JSON array");
  std::vector<RegionReportEntry> out;
  for (const auto& j : arr) {
    detail::require_keys(
        j, {"frame_id", "region_id", "count", "risk", "bbox", "area_cells"},
        file, "region");
    RegionReportEntry e;
    e.frame_id = detail::get_field<int64_t>(j, "frame_id", file, "region");
    e.region.id = detail::get_field<int>(j, "region_id", file, "region");
    e.region.count = detail::get_field<double>(j, "count", file, "region");
    const auto risk = detail::get_field<std::string>(j, "risk", file, "region");
    if (risk == "Danger")
      e.region.risk = RiskLabel::Danger;
    else if (risk == "Warning")
      e.region.risk = RiskLabel::Warning;
    else
      throw ParseError(file, 0, "bad risk label '" + risk + "'");
    const auto bbox =
        detail::get_field<std::vector<int>>(j, "bbox", file, "region");
    if (bbox.size() != 4)
      throw ParseError(file, 0, "bbox must have 4 values");
    e.region.bbox_x0 = bbox[0];
    e.region.bbox_y0 = bbox[1];
    e.region.bbox_x1 = bbox[2];
    e.region.bbox_y1 = bbox[3];
    // cell lists are not serialized; keep area as a scalar via cells capacity
    const auto area =
        detail::get_field<size_t>(j, "area_cells", file, "region");
    e.region.cells.resize(area);
    out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// evaluation report

inline json scores_to_json(const Scores& s) {
  json j;
  j["precision"] = s.precision;
  j["recall"] = s.recall;
  j["specificity"] = s.specificity;
  j["f1"] = s.f1;
  json flags = json::array();
  if (!s.precision_defined) flags.push_back("precision_undefined");
  if (!s.recall_defined) flags.push_back("recall_undefined");
  if (!s.specificity_defined) flags.push_back("specificity_undefined");
  if (!s.f1_defined) flags.push_back("f1_undefined");
  j["flags"] = flags;
  return j;
}

inline void write_eval_report(const std::filesystem::path& path,
                              const EvalReport& r) {
  json j;
  j["mae"] = r.has_counts ? json(r.mae) : json(nullptr);
  j["mse"] = r.has_counts ? json(r.mse) : json(nullptr);
  j["dice"] = r.has_dice ? json(r.dice) : json(nullptr);
  j["precision"] = r.scores.precision;
  j["recall"] = r.scores.recall;
  j["specificity"] = r.scores.specificity;
  j["f1"] = r.scores.f1;
  j["confusion"] = {{"tp", r.confusion.tp},
                    {"fp", r.confusion.fp},
                    {"tn", r.confusion.tn},
                    {"fn", r.confusion.fn}};
  j["scores"] = scores_to_json(r.scores);
  json frames = json::array();
  for (const auto& f : r.frames) {
    json fj;
    fj["frame_id"] = f.frame_id;
    fj["confusion"] = {{"tp", f.confusion.tp},
                       {"fp", f.confusion.fp},
                       {"tn", f.confusion.tn},
                       {"fn", f.confusion.fn}};
    fj["scores"] = scores_to_json(f.scores);
    if (f.has_counts) {
      fj["gt_count"] = f.gt_count;
      fj["pred_count"] = f.pred_count;
    }
    if (f.has_dice) fj["dice"] = f.dice;
    frames.push_back(fj);
  }
  j["frames"] = frames;
  write_file_atomic(path, j.dump(2) + "\n");
}

inline EvalReport read_eval_report(const std::filesystem::path& path) {
  const json j = detail::parse_json_file(path);
  const std::string& file = path.string();
  detail::require_keys(j,
                       {"mae", "mse", "dice", "precision", "recall",
                        "specificity", "f1", "confusion", "scores", "frames"},
                       file, "report");
  EvalReport r;
  r.has_counts = !j.at("mae").is_null();
  if (r.has_counts) {
    r.mae = j.at("mae").get<double>();
    r.mse = j.at("mse").get<double>();
  }
  r.has_dice = !j.at("dice").is_null();
  if (r.has_dice) r.dice = j.at("dice").get<double>();
  const json& c = j.at("confusion");
  r.confusion = {c.at("tp").get<double>(), c.at("fp").get<double>(),
                 c.at("tn").get<double>(), c.at("fn").get<double>()};
  r.scores.precision = j.at("precision").get<double>();
  r.scores.recall = j.at("recall").get<double>();
  r.scores.specificity = j.at("specificity").get<double>();
  r.scores.f1 = j.at("f1").get<double>();
  const json& flags = j.at("scores").at("flags");
  for (const auto& f : flags) {
    const std::string name = f.get<std::string>();
    if (name == "precision_undefined") r.scores.precision_defined = false;
    if (name == "recall_undefined") r.scores.recall_defined = false;
    if (name == "specificity_undefined") r.scores.specificity_defined = false;
    if (name == "f1_undefined") r.scores.f1_defined = false;
  }
  for (const auto& fj : j.at("frames")) {
    FrameEval f;
    f.frame_id = fj.at("frame_id").get<int64_t>();
    const json& fc = fj.at("confusion");
    f.confusion = {fc.at("tp").get<double>(), fc.at("fp").get<double>(),
                   fc.at("tn").get<double>(), fc.at("fn").get<double>()};
    f.scores.precision = fj.at("scores").at("precision").get<double>();
    f.scores.recall = fj.at("scores").at("recall").get<double>();
    f.scores.specificity = fj.at("scores").at("specificity").get<double>();
    f.scores.f1 = fj.at("scores").at("f1").get<double>();
    if (fj.contains("gt_count")) {
      f.has_counts = true;
      f.gt_count = fj.at("gt_count").get<double>();
      f.pred_count = fj.at("pred_count").get<double>();
    }
    if (fj.contains("dice")) {
      f.has_dice = true;
      f.dice = fj.at("dice").get<double>();
    }
    r.frames.push_back(std::move(f));
  }
  return r;
}

// Plain-text table mirroring the usual method / precision / recall /
// specificity / F1 layout.
inline std::string eval_table(const EvalReport& r, const std::string& method) {
  auto fmt3 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };
  std::string out;
  out += "Method     | Precision | Recall | Specificity | F1\n";
  out += "-----------+-----------+--------+-------------+------\n";
  out += method;
  if (method.size() < 10) out += std::string(10 - method.size(), ' ');
  out += " | " + fmt3(r.scores.precision) + "     | " + fmt3(r.scores.recall) +
         "  | " + fmt3(r.scores.specificity) + "       | " +
         fmt3(r.scores.f1) + "\n";
  return out;
}

inline void write_eval_table(const std::filesystem::path& path,
                             const EvalReport& r, const std::string& method) {
  write_file_atomic(path, eval_table(r, method));
}

}  // namespace vsd
