// Density-map generation: each head annotation deposits one normalized
// Gaussian kernel, so the map integrates to the person count.
//
// "Size k" means a k x k window anchored at cell (k/2, k/2); kernels clipped
// at the grid border are renormalized so every person contributes exactly
// mass 1. The shipped presets keep the published parameter pairs even where
// sigma exceeds the window (size 5, sigma 15 is nearly uniform).
#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "vsd/annotations.hpp"
#include "vsd/errors.hpp"
#include "vsd/mask.hpp"
#include "vsd/raster.hpp"

namespace vsd {

struct GaussianKernelSpec {
  int size = 5;        // window side length, cells
  double sigma = 15.0; // standard deviation, cells

  void validate() const {
    if (size < 1) throw InvalidConfig("kernel size must be >= 1");
    if (!(sigma > 0.0)) throw InvalidConfig("kernel sigma must be > 0");
  }
};

// Dataset presets for (plane, image) kernel pairs.
namespace kernel_presets {
inline constexpr GaussianKernelSpec citystreet_plane{5, 15.0};
inline constexpr GaussianKernelSpec citystreet_image{10, 30.0};
inline constexpr GaussianKernelSpec pets2009_plane{4, 15.0};
inline constexpr GaussianKernelSpec pets2009_image{4, 15.0};
}  // namespace kernel_presets

enum class MapKind : uint8_t { Nsdc, Sdc, Predicted };

inline const char* map_kind_name(MapKind k) {
  switch (k) {
    case MapKind::Nsdc: return "nsdc";
    case MapKind::Sdc: return "sdc";
    case MapKind::Predicted: return "predicted";
  }
  return "predicted";
}

struct DensityMap {
  Raster<double> cells;
  GridSpec grid;
  Space space = Space::plane();
  MapKind kind = MapKind::Predicted;

  double mass() const { return raster_sum(cells); }
};

// Discrete kernel weights over the anchored window, normalized to sum 1.
// Offsets run over [-k/2, k-1-k/2] in each axis.
inline Raster<double> gaussian_kernel(const GaussianKernelSpec& spec) {
  spec.validate();
  const int anchor = spec.size / 2;
  Raster<double> k(spec.size, spec.size, 0.0);
  double sum = 0.0;
  for (int y = 0; y < spec.size; ++y) {
    for (int x = 0; x < spec.size; ++x) {
      const double ox = x - anchor;
      const double oy = y - anchor;
      const double w =
          std::exp(-(ox * ox + oy * oy) / (2.0 * spec.sigma * spec.sigma));
      k.at(x, y) = w;
      sum += w;
    }
  }
  for (double& v : k.data()) v /= sum;
  return k;
}

// Blur point annotations into a density map. All annotations must lie inside
// the grid; offenders are reported together.
inline DensityMap densify(std::span<const HeadAnnotation> heads,
                          const GaussianKernelSpec& kernel,
                          const GridSpec& grid, const Space& space,
                          MapKind kind) {
  grid.validate();
  const Raster<double> k = gaussian_kernel(kernel);
  const int anchor = kernel.size / 2;

  std::string offenders;
  int offender_count = 0;
  for (size_t i = 0; i < heads.size(); ++i) {
    const auto& h = heads[i];
    if (h.space != space)
      throw WrongSpace("densify: annotation space '" + h.space.str() +
                       "' does not match map space '" + space.str() + "'");
    if (!grid.contains_point(h.position.x, h.position.y)) {
      if (offender_count < 8) {
        offenders += (offender_count ? ", " : "") + std::string("#") +
                     std::to_string(i) + " (" + std::to_string(h.position.x) +
                     ", " + std::to_string(h.position.y) + ")";
      }
      ++offender_count;
    }
  }
  if (offender_count > 0)
    throw OutOfGrid("densify: " + std::to_string(offender_count) +
                    " annotation(s) outside the grid: " + offenders);

  DensityMap map;
  map.cells = Raster<double>(grid.width, grid.height, 0.0);
  map.grid = grid;
  map.space = space;
  map.kind = kind;

  for (const auto& h : heads) {
    const int cx = grid.cell_x(h.position.x);
    const int cy = grid.cell_y(h.position.y);

    // Clip the window, then renormalize so this person deposits mass 1.
    double clipped_sum = 0.0;
    for (int ky = 0; ky < kernel.size; ++ky) {
      const int gy = cy + ky - anchor;
      if (gy < 0 || gy >= grid.height) continue;
      for (int kx = 0; kx < kernel.size; ++kx) {
        const int gx = cx + kx - anchor;
        if (gx < 0 || gx >= grid.width) continue;
        clipped_sum += k.at(kx, ky);
      }
    }
    for (int ky = 0; ky < kernel.size; ++ky) {
      const int gy = cy + ky - anchor;
      if (gy < 0 || gy >= grid.height) continue;
      for (int kx = 0; kx < kernel.size; ++kx) {
        const int gx = cx + kx - anchor;
        if (gx < 0 || gx >= grid.width) continue;
        map.cells.at(gx, gy) += k.at(kx, ky) / clipped_sum;
      }
    }
  }
  return map;
}

// Scale cells into [0, 1] by the max value; the all-zero map is unchanged.
inline DensityMap normalize(const DensityMap& map) {
  if (map.cells.empty()) throw EmptySet("normalize: map has no cells");
  double max_v = 0.0;
  for (double v : map.cells.data()) max_v = std::max(max_v, v);
  if (max_v == 0.0) return map;
  DensityMap out = map;
  for (double& v : out.cells.data()) v /= max_v;
  return out;
}

// Integrated person count, optionally restricted to a region mask. Counting
// is meaningful on the raw (un-normalized) map.
inline double count(const DensityMap& map, const BinaryMask* region = nullptr) {
  if (region == nullptr) return raster_sum(map.cells);
  if (!region->cells.same_dims(map.cells))
    throw DimMismatch("count: region dims " +
                      std::to_string(region->cells.width()) + "x" +
                      std::to_string(region->cells.height()) +
                      " do not match map dims " +
                      std::to_string(map.cells.width()) + "x" +
                      std::to_string(map.cells.height()));
  double s = 0.0;
  const auto& m = map.cells.data();
  const auto& r = region->cells.data();
  for (size_t i = 0; i < m.size(); ++i)
    if (r[i]) s += m[i];
  return s;
}

}  // namespace vsd
