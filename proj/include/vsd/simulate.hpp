// Synthetic multi-camera crowd scenes used as a ground-truth oracle: cluster
// members are non-conforming by construction (each chained within d_t of an
// earlier member), isolated persons conforming (strictly farther than d_t
// from everyone). Generation is reproducible: a fixed SplitMix64 stream plus
// explicit uniform / Box-Muller transforms, no library distributions.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vsd/annotations.hpp"
#include "vsd/errors.hpp"
#include "vsd/geometry.hpp"

namespace vsd {

// SplitMix64 (Steele, Lea, Flood 2014): state += 0x9E3779B97F4A7C15;
// output = mix(state). Small, seedable, and identical on every platform.
class SplitMix64 {
public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Box-Muller; consumes exactly two draws.
  double gaussian() {
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

private:
  uint64_t state_;
};

inline uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct ClusterSpec {
  Vec2 center;
  int n = 2;
  double spread = 1.0;  // sigma of member placement around the chain, meters
};

struct SceneConfig {
  uint64_t seed = 1;
  double area_width = 20.0;
  double area_height = 20.0;
  int n_isolated = 0;
  std::vector<ClusterSpec> clusters;
  double min_isolated_spacing = 2.5;   // meters
  double occlusion_dropout = 0.0;      // per-camera drop probability
  int max_attempts = 10000;

  void validate() const {
    if (!(area_width > 0.0) || !(area_height > 0.0))
      throw InvalidConfig("scene area must be positive");
    if (n_isolated < 0) throw InvalidConfig("n_isolated must be >= 0");
    if (occlusion_dropout < 0.0 || occlusion_dropout >= 1.0)
      throw InvalidConfig("occlusion dropout must be in [0, 1)");
    if (max_attempts < 1) throw InvalidConfig("max_attempts must be >= 1");
    for (const auto& c : clusters) {
      if (c.n < 2)
        throw InvalidConfig("clusters need n >= 2 to be non-conforming");
      if (!(c.spread > 0.0)) throw InvalidConfig("cluster spread must be > 0");
    }
  }
};

struct Scene {
  uint64_t seed = 1;
  double occlusion_dropout = 0.0;
  std::vector<Vec2> heads;       // world head positions at plane height
  std::vector<int> cluster_id;   // 0 = isolated, 1.. = cluster index
};

namespace detail {

// Everyone keeps at least this separation so multi-view merging can never
// collapse two distinct persons (default merge radius is 0.25 m).
constexpr double kMinSeparation = 0.5;
// Distance slack so compliance decisions survive projection round-trips.
constexpr double kComplianceMargin = 1e-3;

inline double min_distance_to(const std::vector<Vec2>& heads, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : heads) best = std::min(best, distance(h, p));
  return best;
}

}  // namespace detail

// Deterministic scene synthesis. Cluster members are placed first (config
// order), then isolated persons, each by rejection sampling against the
// placement constraints; the attempt budget applies per placed person.
inline Scene generate_scene(const SceneConfig& cfg, double d_t) {
  cfg.validate();
  if (!(d_t > 0.0)) throw InvalidConfig("d_t must be > 0");

  SplitMix64 rng(cfg.seed);
  Scene scene;
  scene.seed = cfg.seed;
  scene.occlusion_dropout = cfg.occlusion_dropout;

  auto in_area = [&](const Vec2& p) {
    return p.x >= 0.0 && p.x <= cfg.area_width && p.y >= 0.0 &&
           p.y <= cfg.area_height;
  };

  for (size_t ci = 0; ci < cfg.clusters.size(); ++ci) {
    const ClusterSpec& cl = cfg.clusters[ci];
    std::vector<Vec2> members;
    for (int m = 0; m < cl.n; ++m) {
      bool placed = false;
      for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        Vec2 p{cl.center.x + rng.gaussian() * cl.spread,
               cl.center.y + rng.gaussian() * cl.spread};
        if (!in_area(p)) continue;
        if (detail::min_distance_to(scene.heads, p) < detail::kMinSeparation ||
            detail::min_distance_to(members, p) < detail::kMinSeparation)
          continue;
        if (m > 0 &&
            detail::min_distance_to(members, p) >
                d_t - detail::kComplianceMargin)
          continue;  // must chain within d_t of an existing member
        members.push_back(p);
        placed = true;
        break;
      }
      if (!placed)
        throw Infeasible("generate_scene: cluster " + std::to_string(ci + 1) +
                         " member " + std::to_string(m + 1) +
                         " not placeable after " +
                         std::to_string(cfg.max_attempts) + " attempts");
    }
    for (const auto& p : members) {
      scene.heads.push_back(p);
      scene.cluster_id.push_back(static_cast<int>(ci) + 1);
    }
  }

  const double iso_gap =
      std::max(cfg.min_isolated_spacing, d_t) + detail::kComplianceMargin;
  for (int i = 0; i < cfg.n_isolated; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
      Vec2 p{rng.uniform(0.0, cfg.area_width),
             rng.uniform(0.0, cfg.area_height)};
      if (detail::min_distance_to(scene.heads, p) <= iso_gap) continue;
      scene.heads.push_back(p);
      scene.cluster_id.push_back(0);
      placed = true;
      break;
    }
    if (!placed)
      throw Infeasible("generate_scene: isolated person " +
                       std::to_string(i + 1) + " not placeable after " +
                       std::to_string(cfg.max_attempts) + " attempts");
  }
  return scene;
}

// Project scene heads into one camera: heads behind the camera or outside
// the frame are dropped, then each survivor is independently occluded with
// the configured probability. The dropout draw depends only on
// (seed, camera id, head index), never on visibility order.
inline std::vector<HeadAnnotation> render_annotations(const Scene& scene,
                                                      const CameraModel& cam,
                                                      const HeadPlane& plane,
                                                      int64_t frame_id = 0) {
  const PlaneHomography hom = plane_homography(cam, plane);
  std::vector<HeadAnnotation> out;
  out.reserve(scene.heads.size());
  const uint64_t cam_hash = fnv1a64(cam.id);
  for (size_t i = 0; i < scene.heads.size(); ++i) {
    const Vec2& w = scene.heads[i];
    if (cam.depth(Vec3{w.x, w.y, plane.h_h}) <= 1e-9) continue;
    Vec2 px;
    try {
      px = plane_to_image(w, hom);
    } catch (const PointAtInfinity&) {
      continue;
    }
    if (px.x < 0.0 || px.x >= cam.image_width || px.y < 0.0 ||
        px.y >= cam.image_height)
      continue;
    if (scene.occlusion_dropout > 0.0) {
      SplitMix64 drop(scene.seed ^ cam_hash ^
                      (0x51ED270B9C1AULL + static_cast<uint64_t>(i) *
                                               0x2545F4914F6CDD1DULL));
      if (drop.next_double() < scene.occlusion_dropout) continue;
    }
    HeadAnnotation a;
    a.frame_id = frame_id;
    a.position = px;
    a.space = Space::image(cam.id);
    a.person_id = static_cast<int64_t>(i);
    out.push_back(std::move(a));
  }
  return out;
}

// Three fixed cameras around the area, tilted down steeply enough that the
// whole area sits inside every frustum.
inline std::vector<CameraModel> default_camera_rig(double area_width,
                                                   double area_height,
                                                   double plane_height) {
  const double m = std::max(area_width, area_height);
  const Vec3 target{area_width / 2.0, area_height / 2.0, plane_height};

  auto look_at = [&](const Vec3& center, const std::string& id) {
    // Camera axes: z forward (toward target), x right, y down-ish;
    // rows of R are the axes expressed in world coordinates.
    Vec3 f{target.x - center.x, target.y - center.y, target.z - center.z};
    const double fn = std::sqrt(f.x * f.x + f.y * f.y + f.z * f.z);
    f = {f.x / fn, f.y / fn, f.z / fn};
    // right = f x world_up, world_up = (0,0,1)
    Vec3 r{f.y * 1.0 - f.z * 0.0, f.z * 0.0 - f.x * 1.0,
           f.x * 0.0 - f.y * 0.0};
    const double rn = std::sqrt(r.x * r.x + r.y * r.y + r.z * r.z);
    r = {r.x / rn, r.y / rn, r.z / rn};
    // down = f x r completes the right-handed frame
    const Vec3 d{f.y * r.z - f.z * r.y, f.z * r.x - f.x * r.z,
                 f.x * r.y - f.y * r.x};

    CameraModel cam;
    cam.id = id;
    cam.image_width = 640;
    cam.image_height = 480;
    cam.intrinsics = {400.0, 400.0, 320.0, 240.0, 0.0};
    cam.extrinsics.rotation.m = {r.x, r.y, r.z, d.x, d.y, d.z, f.x, f.y, f.z};
    cam.extrinsics.translation = {
        -(r.x * center.x + r.y * center.y + r.z * center.z),
        -(d.x * center.x + d.y * center.y + d.z * center.z),
        -(f.x * center.x + f.y * center.y + f.z * center.z)};
    return cam;
  };

  return {
      look_at({area_width / 2.0, -0.9 * m, 1.2 * m}, "cam1"),
      look_at({-0.9 * m, area_height / 2.0, 1.3 * m}, "cam2"),
      look_at({area_width + 0.9 * m, area_height + 0.9 * m, 1.25 * m}, "cam3"),
  };
}

}  // namespace vsd
