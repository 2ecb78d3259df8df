// Segmentation ground truth from non-conforming density maps: normalize,
// binarize at t_s, run the dilation/erosion schedule, back-project to a
// camera grid.
//
// Morphology uses a flat side x side all-ones element anchored at
// (side/2, side/2) with zero padding. Dilation is the Minkowski sum
// out(p) = OR in(p - o); erosion the adjoint out(p) = AND in(p + o), with
// offsets o in [-side/2, side-1-side/2]^2. The adjoint pairing keeps
// dilate-then-erode a true closing (extensive away from borders, idempotent)
// for even element sizes too.
#pragma once

#include <string>

#include "vsd/density.hpp"
#include "vsd/errors.hpp"
#include "vsd/geometry.hpp"
#include "vsd/mask.hpp"

namespace vsd {

struct MorphSchedule {
  int dilation_side = 7;
  int dilation_passes = 2;
  int erosion_side = 4;
  int erosion_passes = 2;
  double t_s = 0.0;  // binarize threshold on the normalized map

  void validate() const {
    if (dilation_side < 1 || erosion_side < 1)
      throw InvalidConfig("structuring-element sides must be >= 1");
    if (dilation_passes < 0 || erosion_passes < 0)
      throw InvalidConfig("morphology pass counts must be >= 0");
    if (t_s < 0.0 || t_s >= 1.0) throw InvalidConfig("t_s must be in [0, 1)");
  }
};

namespace morph_presets {
inline constexpr MorphSchedule citystreet{7, 2, 4, 2, 0.0};
inline constexpr MorphSchedule pets2009{7, 2, 5, 2, 0.0};
}  // namespace morph_presets

// Threshold a normalized density map; cell = 1 iff value > t_s.
inline BinaryMask binarize(const DensityMap& map, double t_s) {
  if (t_s < 0.0 || t_s >= 1.0) throw InvalidConfig("t_s must be in [0, 1)");
  for (double v : map.cells.data()) {
    if (v > 1.0)
      throw NotNormalized("binarize: cell value " + std::to_string(v) +
                          " exceeds 1; normalize the map first");
  }
  BinaryMask mask;
  mask.grid = map.grid;
  mask.space = map.space;
  mask.cells = Raster<uint8_t>(map.cells.width(), map.cells.height(), 0);
  const auto& src = map.cells.data();
  auto& dst = mask.cells.data();
  for (size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > t_s ? 1 : 0;
  return mask;
}

namespace detail {

enum class MorphOp { Dilate, Erode };

// One separable pass over rows then columns. For the k x k ones element both
// operations reduce to 1D window scans; `lo`/`hi` are the window extents
// around each output cell.
inline Raster<uint8_t> morph(const Raster<uint8_t>& in, int side, MorphOp op) {
  const int a = side / 2;
  const int b = side - 1 - a;
  // Dilation window for out(x) = OR in(x - o), o in [-a, b]: in[x-b .. x+a].
  // Erosion window for out(x) = AND in(x + o): in[x-a .. x+b].
  const int lo = (op == MorphOp::Dilate) ? -b : -a;
  const int hi = (op == MorphOp::Dilate) ? a : b;
  const int w = in.width();
  const int h = in.height();

  Raster<uint8_t> tmp(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      uint8_t acc = (op == MorphOp::Dilate) ? 0 : 1;
      for (int o = lo; o <= hi; ++o) {
        const uint8_t v = in.at_or_zero(x + o, y);
        if (op == MorphOp::Dilate)
          acc = acc | v;
        else
          acc = acc & v;
      }
      tmp.at(x, y) = acc;
    }
  }
  Raster<uint8_t> out(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      uint8_t acc = (op == MorphOp::Dilate) ? 0 : 1;
      for (int o = lo; o <= hi; ++o) {
        const uint8_t v = tmp.at_or_zero(x, y + o);
        if (op == MorphOp::Dilate)
          acc = acc | v;
        else
          acc = acc & v;
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

}  // namespace detail

inline BinaryMask dilate(const BinaryMask& mask, int side) {
  if (side < 1) throw InvalidConfig("dilate: side must be >= 1");
  BinaryMask out = mask;
  out.cells = detail::morph(mask.cells, side, detail::MorphOp::Dilate);
  return out;
}

inline BinaryMask erode(const BinaryMask& mask, int side) {
  if (side < 1) throw InvalidConfig("erode: side must be >= 1");
  BinaryMask out = mask;
  out.cells = detail::morph(mask.cells, side, detail::MorphOp::Erode);
  return out;
}

// Plane-space portion of the pipeline (normalize, threshold, morphology),
// before camera back-projection.
inline BinaryMask make_plane_mask(const DensityMap& d_nsdc,
                                  const MorphSchedule& sched) {
  sched.validate();
  if (!d_nsdc.space.is_plane())
    throw WrongSpace("make_plane_mask: density map must be plane-space");
  BinaryMask mask = binarize(normalize(d_nsdc), sched.t_s);
  for (int i = 0; i < sched.dilation_passes; ++i)
    mask = dilate(mask, sched.dilation_side);
  for (int i = 0; i < sched.erosion_passes; ++i)
    mask = erode(mask, sched.erosion_side);
  return mask;
}

// Project a plane mask into a camera grid with nearest-neighbor sampling,
// re-binarizing the result.
inline BinaryMask project_mask_to_camera(const BinaryMask& plane_mask,
                                         const PlaneHomography& hom,
                                         const GridSpec& camera_grid) {
  camera_grid.validate();
  if (!plane_mask.space.is_plane())
    throw WrongSpace("project_mask_to_camera: mask must be plane-space");

  BinaryMask out;
  out.grid = camera_grid;
  out.space = Space::image(hom.camera_id);
  out.cells = Raster<uint8_t>(camera_grid.width, camera_grid.height, 0);
  for (int py = 0; py < camera_grid.height; ++py) {
    const double v = camera_grid.center_y(py);
    for (int px = 0; px < camera_grid.width; ++px) {
      const double u = camera_grid.center_x(px);
      const Vec3 p = hom.H_inv * Vec3{u, v, 1.0};
      if (std::abs(p.z) < kHomogeneousEps) continue;
      const int cx = plane_mask.grid.cell_x(p.x / p.z);
      const int cy = plane_mask.grid.cell_y(p.y / p.z);
      const uint8_t s = plane_mask.cells.at_or_zero(cx, cy);
      out.cells.at(px, py) = s ? 1 : 0;  // re-binarize
    }
  }
  return out;
}

// Full ground-truth pipeline for one camera: normalize -> binarize(t_s) ->
// dilation passes -> erosion passes -> nearest-neighbor projection into the
// camera grid.
inline BinaryMask make_segmentation_gt(const DensityMap& d_nsdc,
                                       const MorphSchedule& sched,
                                       const PlaneHomography& hom,
                                       const GridSpec& camera_grid) {
  return project_mask_to_camera(make_plane_mask(d_nsdc, sched), hom,
                                camera_grid);
}

}  // namespace vsd
