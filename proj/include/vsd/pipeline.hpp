// Ground-truth generation wiring: group annotations by frame, lift every
// camera view onto the head plane, merge views, partition by compliance,
// and emit density maps plus segmentation masks in the plane and in every
// camera. Frames are independent; the driver may process them on a thread
// pool (capped by VSD_THREADS) and artifacts are written in frame order.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "vsd/annotations.hpp"
#include "vsd/config.hpp"
#include "vsd/density.hpp"
#include "vsd/errors.hpp"
#include "vsd/geometry.hpp"
#include "vsd/io.hpp"
#include "vsd/maskgen.hpp"

namespace vsd {

struct ComplianceRow {
  int64_t frame_id = 0;
  int person = 0;  // index into the merged plane set
  Vec2 position;
  double min_distance = 0.0;
  bool compliant = false;
};

struct CameraArtifacts {
  std::string camera_id;
  DensityMap d_n;
  DensityMap d_c;
  BinaryMask mask;
};

struct FrameArtifacts {
  int64_t frame_id = 0;
  DensityMap d_n_plane;
  DensityMap d_c_plane;
  BinaryMask plane_mask;
  std::vector<CameraArtifacts> cameras;
  std::vector<ComplianceRow> compliance;
};

// Cameras paired with their head-plane homographies.
struct CameraSetup {
  CameraModel model;
  PlaneHomography hom;
};

inline std::vector<CameraSetup> build_camera_setups(
    const std::vector<CameraModel>& cams, const HeadPlane& plane) {
  std::vector<CameraSetup> out;
  out.reserve(cams.size());
  for (const auto& c : cams) out.push_back({c, plane_homography(c, plane)});
  return out;
}

// One frame of the ground-truth pipeline.
inline FrameArtifacts gen_gt_frame(int64_t frame_id,
                                   std::vector<HeadAnnotation> annotations,
                                   const std::vector<CameraSetup>& cameras,
                                   const PipelineConfig& cfg) {
  // Views: one per camera (projected to the plane) plus any annotations
  // already given in plane space.
  std::vector<std::vector<HeadAnnotation>> views;
  std::vector<HeadAnnotation> plane_view;
  for (const auto& cam : cameras) {
    std::vector<HeadAnnotation> cam_view;
    for (const auto& a : annotations) {
      if (a.space.is_image() && a.space.camera_id == cam.model.id) {
        if (a.position.x < 0.0 || a.position.x >= cam.model.image_width ||
            a.position.y < 0.0 || a.position.y >= cam.model.image_height)
          throw ConstraintError(
              "frame " + std::to_string(frame_id) + ": annotation at (" +
              fmt_double(a.position.x) + ", " + fmt_double(a.position.y) +
              ") outside camera '" + cam.model.id + "' bounds");
        cam_view.push_back(a);
      }
    }
    if (!cam_view.empty())
      views.push_back(project_annotations(cam_view, cam.hom));
  }
  for (const auto& a : annotations) {
    if (a.space.is_plane()) plane_view.push_back(a);
    if (a.space.is_image()) {
      const bool known =
          std::any_of(cameras.begin(), cameras.end(), [&](const auto& c) {
            return c.model.id == a.space.camera_id;
          });
      if (!known)
        throw ConstraintError("frame " + std::to_string(frame_id) +
                              ": annotation references unknown camera '" +
                              a.space.camera_id + "'");
    }
  }
  if (!plane_view.empty()) views.push_back(std::move(plane_view));

  const std::vector<HeadAnnotation> merged =
      merge_views(views, cfg.merge_radius);
  const CompliancePartition part = classify_compliance(merged, cfg.d_t);

  FrameArtifacts out;
  out.frame_id = frame_id;
  out.d_n_plane = densify(part.nsdc, cfg.plane_kernel, cfg.plane.grid,
                          Space::plane(), MapKind::Nsdc);
  out.d_c_plane = densify(part.sdc, cfg.plane_kernel, cfg.plane.grid,
                          Space::plane(), MapKind::Sdc);
  out.plane_mask = make_plane_mask(out.d_n_plane, cfg.morph);

  for (size_t i = 0; i < merged.size(); ++i) {
    out.compliance.push_back({frame_id, static_cast<int>(i),
                              merged[i].position, part.min_distance[i],
                              static_cast<bool>(part.compliant[i])});
  }

  for (const auto& cam : cameras) {
    CameraArtifacts art;
    art.camera_id = cam.model.id;
    const GridSpec grid = cam.model.image_grid();
    const Space img_space = Space::image(cam.model.id);

    // Back-project merged plane annotations into this camera; heads behind
    // the camera or outside the frame do not contribute here.
    std::vector<HeadAnnotation> nsdc_img, sdc_img;
    for (size_t i = 0; i < merged.size(); ++i) {
      const Vec2& p = merged[i].position;
      if (cam.model.depth(Vec3{p.x, p.y, cfg.plane.h_h}) <= 1e-9) continue;
      Vec2 px;
      try {
        px = plane_to_image(p, cam.hom);
      } catch (const PointAtInfinity&) {
        continue;
      }
      if (px.x < 0.0 || px.x >= cam.model.image_width || px.y < 0.0 ||
          px.y >= cam.model.image_height)
        continue;
      HeadAnnotation a = merged[i];
      a.position = px;
      a.space = img_space;
      (part.compliant[i] ? sdc_img : nsdc_img).push_back(std::move(a));
    }
    art.d_n = densify(nsdc_img, cfg.image_kernel, grid, img_space,
                      MapKind::Nsdc);
    art.d_c = densify(sdc_img, cfg.image_kernel, grid, img_space,
                      MapKind::Sdc);
    art.mask = project_mask_to_camera(out.plane_mask, cam.hom, grid);
    out.cameras.push_back(std::move(art));
  }
  return out;
}

// Thread cap: VSD_THREADS when set, hardware concurrency otherwise.
inline unsigned effective_thread_cap() {
  if (const char* env = std::getenv("VSD_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Group by frame id (ascending). An empty annotation set still yields one
// empty frame so downstream artifacts exist.
inline std::map<int64_t, std::vector<HeadAnnotation>> group_frames(
    const std::vector<HeadAnnotation>& annotations) {
  std::map<int64_t, std::vector<HeadAnnotation>> frames;
  for (const auto& a : annotations) frames[a.frame_id].push_back(a);
  if (frames.empty()) frames[0] = {};
  return frames;
}

// Run gen_gt_frame over all frames, parallel up to the thread cap; results
// come back in frame order.
inline std::vector<FrameArtifacts> gen_gt_all(
    const std::map<int64_t, std::vector<HeadAnnotation>>& frames,
    const std::vector<CameraSetup>& cameras, const PipelineConfig& cfg) {
  std::vector<int64_t> ids;
  std::vector<const std::vector<HeadAnnotation>*> sets;
  for (const auto& [id, set] : frames) {
    ids.push_back(id);
    sets.push_back(&set);
  }

  std::vector<FrameArtifacts> results(ids.size());
  const unsigned cap = std::min<size_t>(effective_thread_cap(), ids.size());
  if (cap <= 1) {
    for (size_t i = 0; i < ids.size(); ++i)
      results[i] = gen_gt_frame(ids[i], *sets[i], cameras, cfg);
    return results;
  }

  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= ids.size()) return;
      try {
        results[i] = gen_gt_frame(ids[i], *sets[i], cameras, cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < cap; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

inline std::string frame_dir_name(int64_t frame_id) {
  std::string n = std::to_string(frame_id);
  if (n.size() < 6) n.insert(0, 6 - n.size(), '0');
  return "frame_" + n;
}

inline std::string compliance_to_csv(const std::vector<ComplianceRow>& rows) {
  std::string out = "frame_id,person,x,y,min_distance,label\n";
  for (const auto& r : rows) {
    out += fmt_int(r.frame_id);
    out += ',';
    out += fmt_int(r.person);
    out += ',';
    out += fmt_double(r.position.x);
    out += ',';
    out += fmt_double(r.position.y);
    out += ',';
    out += fmt_double(r.min_distance);
    out += ',';
    out += r.compliant ? "SDC" : "NSDC";
    out += '\n';
  }
  return out;
}

// Write one frame's artifact bundle under <out>/frame_<id>/.
inline void write_frame_artifacts(const std::filesystem::path& out_dir,
                                  const FrameArtifacts& art) {
  const std::filesystem::path dir = out_dir / frame_dir_name(art.frame_id);
  std::filesystem::create_directories(dir);
  write_density(dir / "d_n_plane.vsdm", art.d_n_plane);
  write_density(dir / "d_c_plane.vsdm", art.d_c_plane);
  write_mask_pgm(dir / "mask_plane.pgm", art.plane_mask);
  for (const auto& cam : art.cameras) {
    write_density(dir / ("d_n_image_" + cam.camera_id + ".vsdm"), cam.d_n);
    write_density(dir / ("d_c_image_" + cam.camera_id + ".vsdm"), cam.d_c);
    write_mask_pgm(dir / ("mask_image_" + cam.camera_id + ".pgm"), cam.mask);
  }
}

}  // namespace vsd
