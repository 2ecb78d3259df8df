// Inference-time post-processing of externally produced density maps:
// threshold the normalized map, label 8-connected components, integrate each
// region's person count from the raw map, drop low-count regions, and attach
// a risk label.
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "vsd/density.hpp"
#include "vsd/errors.hpp"
#include "vsd/mask.hpp"

namespace vsd {

enum class RiskLabel : uint8_t { Warning, Danger };

inline const char* risk_label_name(RiskLabel r) {
  return r == RiskLabel::Danger ? "Danger" : "Warning";
}

struct PostprocessConfig {
  double density_threshold = 20.0 / 255.0;  // on the normalized map
  double soft_mask_threshold = 0.3;
  double min_count = 0.5;          // regions with count <= min_count are dropped
  double danger_count = 5.0;       // count >= danger_count escalates the label

  void validate() const {
    if (density_threshold < 0.0 || density_threshold > 1.0 ||
        soft_mask_threshold < 0.0 || soft_mask_threshold > 1.0)
      throw InvalidConfig("thresholds must be in [0, 1]");
    if (min_count < 0.0) throw InvalidConfig("min_count must be >= 0");
  }
};

namespace postprocess_presets {
// CityStreet: soft-mask threshold 0.3, count filter 0.5 persons.
inline constexpr PostprocessConfig citystreet{20.0 / 255.0, 0.3, 0.5, 5.0};
// PETS2009: count filter 2 persons; soft-mask threshold 0.6 (FCN_7 flavor;
// 0.9 suits U-Net-style outputs).
inline constexpr PostprocessConfig pets2009{20.0 / 255.0, 0.6, 2.0, 5.0};
}  // namespace postprocess_presets

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

struct RegionMask {
  int id = 0;
  std::vector<Cell> cells;  // row-major discovery order
  int bbox_x0 = 0, bbox_y0 = 0, bbox_x1 = 0, bbox_y1 = 0;  // inclusive
  double count = 0.0;  // integrated from the raw map
  RiskLabel risk = RiskLabel::Warning;
};

// Label 8-connected foreground components. Labels are 1-based and assigned
// in row-major discovery order, so ids are canonical (sorted by top-left
// cell) regardless of traversal details. Returns the component count.
inline int label_components(const Raster<uint8_t>& mask,
                            Raster<int32_t>& labels) {
  const int w = mask.width();
  const int h = mask.height();
  labels = Raster<int32_t>(w, h, 0);
  int next = 0;
  std::vector<Cell> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y) || labels.at(x, y) != 0) continue;
      ++next;
      stack.push_back({x, y});
      labels.at(x, y) = next;
      while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = c.x + dx;
            const int ny = c.y + dy;
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            if (!mask.at(nx, ny) || labels.at(nx, ny) != 0) continue;
            labels.at(nx, ny) = next;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  return next;
}

// Danger iff count reaches the configured danger threshold.
inline RiskLabel label_risk(double count, const PostprocessConfig& cfg) {
  cfg.validate();
  if (!(count > cfg.min_count))
    throw BelowMinimum("label_risk: count " + std::to_string(count) +
                       " does not exceed min_count " +
                       std::to_string(cfg.min_count));
  return count >= cfg.danger_count ? RiskLabel::Danger : RiskLabel::Warning;
}

// Normalize, threshold, label components, integrate counts from the raw map,
// filter, and attach risk labels. Region ids are renumbered 1..m in
// top-left-first order after filtering.
inline std::vector<RegionMask> extract_regions(const DensityMap& d_pred,
                                               const PostprocessConfig& cfg) {
  cfg.validate();
  const DensityMap norm = normalize(d_pred);

  Raster<uint8_t> binary(norm.cells.width(), norm.cells.height(), 0);
  {
    const auto& src = norm.cells.data();
    auto& dst = binary.data();
    for (size_t i = 0; i < src.size(); ++i)
      dst[i] = src[i] > cfg.density_threshold ? 1 : 0;
  }

  Raster<int32_t> labels;
  const int n = label_components(binary, labels);

  std::vector<RegionMask> regions(static_cast<size_t>(n));
  std::vector<bool> seen(static_cast<size_t>(n), false);
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const int32_t l = labels.at(x, y);
      if (l == 0) continue;
      RegionMask& r = regions[static_cast<size_t>(l - 1)];
      if (!seen[static_cast<size_t>(l - 1)]) {
        seen[static_cast<size_t>(l - 1)] = true;
        r.bbox_x0 = r.bbox_x1 = x;
        r.bbox_y0 = r.bbox_y1 = y;
      } else {
        r.bbox_x0 = std::min(r.bbox_x0, x);
        r.bbox_x1 = std::max(r.bbox_x1, x);
        r.bbox_y0 = std::min(r.bbox_y0, y);
        r.bbox_y1 = std::max(r.bbox_y1, y);
      }
      r.cells.push_back({x, y});
      r.count += d_pred.cells.at(x, y);
    }
  }

  std::vector<RegionMask> kept;
  for (auto& r : regions) {
    if (r.count <= cfg.min_count) continue;
    r.id = static_cast<int>(kept.size()) + 1;
    r.risk = label_risk(r.count, cfg);
    kept.push_back(std::move(r));
  }
  return kept;
}

// Threshold a soft mask (values in [0, 1]); cell = 1 iff value > t.
inline BinaryMask threshold_soft_mask(const DensityMap& soft, double t) {
  if (t < 0.0 || t > 1.0) throw InvalidConfig("threshold must be in [0, 1]");
  for (double v : soft.cells.data()) {
    if (v < 0.0 || v > 1.0)
      throw OutOfRange("threshold_soft_mask: value " + std::to_string(v) +
                       " outside [0, 1]");
  }
  BinaryMask mask;
  mask.grid = soft.grid;
  mask.space = soft.space;
  mask.cells = Raster<uint8_t>(soft.cells.width(), soft.cells.height(), 0);
  const auto& src = soft.cells.data();
  auto& dst = mask.cells.data();
  for (size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > t ? 1 : 0;
  return mask;
}

// Overlay raster for reports: Warning cells 128, Danger cells 255.
inline Raster<uint8_t> region_overlay(const std::vector<RegionMask>& regions,
                                      int width, int height) {
  Raster<uint8_t> overlay(width, height, 0);
  for (const auto& r : regions) {
    const uint8_t v = r.risk == RiskLabel::Danger ? 255 : 128;
    for (const Cell& c : r.cells) overlay.at(c.x, c.y) = v;
  }
  return overlay;
}

}  // namespace vsd
