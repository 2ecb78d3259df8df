// Head-annotation model, multi-view merging into the head plane, and the
// compliance partition: a person is conforming iff the minimum inter-personal
// distance d_i is strictly greater than the threshold d_t.
//
// Nearest-neighbor distances are computed on a uniform bucket grid with
// expanding ring search, comparing squared distances throughout so the
// partition is bit-for-bit reproducible.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vsd/errors.hpp"
#include "vsd/geometry.hpp"
#include "vsd/raster.hpp"

namespace vsd {

struct HeadAnnotation {
  int64_t frame_id = 0;
  Vec2 position;  // pixels in image space, meters in plane space
  Space space = Space::plane();
  std::optional<int64_t> person_id;

  bool operator==(const HeadAnnotation&) const = default;
};

inline void require_plane_space(std::span<const HeadAnnotation> heads,
                                const char* op) {
  for (const auto& h : heads) {
    if (!h.space.is_plane())
      throw WrongSpace(std::string(op) + ": annotation in image space '" +
                       h.space.camera_id + "', expected plane space");
  }
}

struct CompliancePartition {
  double d_t = 2.0;
  std::vector<HeadAnnotation> sdc;
  std::vector<HeadAnnotation> nsdc;
  // Aligned with the input set: min inter-personal distance (infinity when
  // alone) and the resulting compliance bit.
  std::vector<double> min_distance;
  std::vector<bool> compliant;
};

namespace detail {

// Exact all-nearest-neighbor squared distances via spatial hashing. Buckets
// of side `cell`; ring r can only be skipped once the best squared distance
// is <= ((r-1)*cell)^2.
inline std::vector<double> nearest_neighbor_sq(const std::vector<Vec2>& pts,
                                               double cell) {
  const size_t n = pts.size();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  if (n < 2) return best;

  double min_x = pts[0].x, min_y = pts[0].y, max_x = pts[0].x, max_y = pts[0].y;
  for (const auto& p : pts) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  const int bw = std::max(1, static_cast<int>((max_x - min_x) / cell) + 1);
  const int bh = std::max(1, static_cast<int>((max_y - min_y) / cell) + 1);

  std::vector<std::vector<uint32_t>> buckets(static_cast<size_t>(bw) * bh);
  std::vector<int> bx(n), by(n);
  for (size_t i = 0; i < n; ++i) {
    bx[i] = std::min(bw - 1, static_cast<int>((pts[i].x - min_x) / cell));
    by[i] = std::min(bh - 1, static_cast<int>((pts[i].y - min_y) / cell));
    buckets[static_cast<size_t>(by[i]) * bw + bx[i]].push_back(
        static_cast<uint32_t>(i));
  }

  const int max_ring = std::max(bw, bh);
  for (size_t i = 0; i < n; ++i) {
    for (int ring = 0; ring <= max_ring; ++ring) {
      if (ring > 0) {
        const double reach = (ring - 1) * cell;
        if (best[i] <= reach * reach) break;
      }
      const int x_lo = std::max(0, bx[i] - ring);
      const int x_hi = std::min(bw - 1, bx[i] + ring);
      const int y_lo = std::max(0, by[i] - ring);
      const int y_hi = std::min(bh - 1, by[i] + ring);
      for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
          if (std::max(std::abs(x - bx[i]), std::abs(y - by[i])) != ring)
            continue;
          for (uint32_t j : buckets[static_cast<size_t>(y) * bw + x]) {
            if (j == i) continue;
            best[i] = std::min(best[i], distance_sq(pts[i], pts[j]));
          }
        }
      }
    }
  }
  return best;
}

}  // namespace detail

// Partition plane annotations into conforming / non-conforming sets.
// Singletons are conforming (empty minimum is infinity); the boundary
// d_i == d_t is non-conforming because compliance requires d_i strictly
// greater than d_t.
inline CompliancePartition classify_compliance(
    std::span<const HeadAnnotation> heads, double d_t) {
  if (!(d_t > 0.0)) throw InvalidConfig("d_t must be > 0");
  require_plane_space(heads, "classify_compliance");

  std::vector<Vec2> pts;
  pts.reserve(heads.size());
  for (const auto& h : heads) pts.push_back(h.position);

  CompliancePartition out;
  out.d_t = d_t;
  out.min_distance.resize(heads.size());
  out.compliant.resize(heads.size());

  const std::vector<double> nn_sq = detail::nearest_neighbor_sq(pts, d_t);
  const double d_t_sq = d_t * d_t;
  for (size_t i = 0; i < heads.size(); ++i) {
    out.min_distance[i] = std::sqrt(nn_sq[i]);
    const bool ok = nn_sq[i] > d_t_sq;
    out.compliant[i] = ok;
    (ok ? out.sdc : out.nsdc).push_back(heads[i]);
  }
  return out;
}

// Merge per-view plane annotation sets: greedy nearest-first agglomeration of
// cluster centroids until no mergeable pair remains within r_merge. Only
// annotations from different views are redundant, so a cluster never holds
// two members of the same view; this also guarantees the output is at least
// as large as the largest single view. Annotations seen by one camera only
// survive untouched; redundant ones collapse to the centroid of their
// members.
inline std::vector<HeadAnnotation> merge_views(
    const std::vector<std::vector<HeadAnnotation>>& per_view, double r_merge) {
  if (!(r_merge > 0.0)) throw InvalidConfig("r_merge must be > 0");
  if (per_view.size() > 64)
    throw InvalidConfig("merge_views supports at most 64 views");

  struct Cluster {
    std::vector<HeadAnnotation> members;
    Vec2 sum{0.0, 0.0};
    uint64_t views = 0;
    Vec2 centroid() const {
      return Vec2{sum.x / members.size(), sum.y / members.size()};
    }
  };

  std::vector<Cluster> clusters;
  for (size_t v = 0; v < per_view.size(); ++v) {
    require_plane_space(per_view[v], "merge_views");
    for (const auto& h : per_view[v]) {
      Cluster c;
      c.members.push_back(h);
      c.sum = h.position;
      c.views = uint64_t{1} << v;
      clusters.push_back(std::move(c));
    }
  }

  while (clusters.size() > 1) {
    double best_sq = std::numeric_limits<double>::infinity();
    size_t bi = 0, bj = 0;
    for (size_t i = 0; i + 1 < clusters.size(); ++i) {
      for (size_t j = i + 1; j < clusters.size(); ++j) {
        if (clusters[i].views & clusters[j].views) continue;
        const double d = distance_sq(clusters[i].centroid(),
                                     clusters[j].centroid());
        if (d < best_sq) {
          best_sq = d;
          bi = i;
          bj = j;
        }
      }
    }
    if (best_sq > r_merge * r_merge) break;
    Cluster& a = clusters[bi];
    Cluster& b = clusters[bj];
    a.members.insert(a.members.end(), b.members.begin(), b.members.end());
    a.sum.x += b.sum.x;
    a.sum.y += b.sum.y;
    a.views |= b.views;
    clusters.erase(clusters.begin() + static_cast<ptrdiff_t>(bj));
  }

  std::vector<HeadAnnotation> merged;
  merged.reserve(clusters.size());
  for (const auto& c : clusters) {
    HeadAnnotation h;
    h.frame_id = c.members.front().frame_id;
    h.position = c.centroid();
    h.space = Space::plane();
    // person id survives only when every member agrees on it
    h.person_id = c.members.front().person_id;
    for (const auto& m : c.members) {
      if (m.person_id != h.person_id) {
        h.person_id.reset();
        break;
      }
    }
    merged.push_back(std::move(h));
  }
  return merged;
}

// Lift a camera's image annotations onto the head plane.
inline std::vector<HeadAnnotation> project_annotations(
    std::span<const HeadAnnotation> heads, const PlaneHomography& hom) {
  std::vector<HeadAnnotation> out;
  out.reserve(heads.size());
  for (const auto& h : heads) {
    if (!h.space.is_image() || h.space.camera_id != hom.camera_id)
      throw WrongSpace("project_annotations: annotation space '" +
                       h.space.str() + "' does not match camera '" +
                       hom.camera_id + "'");
    HeadAnnotation p = h;
    p.position = image_to_plane(h.position, hom);
    p.space = Space::plane();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace vsd
