// Dense row-major raster grid plus the world<->cell addressing used by both
// head-plane grids (meters) and image grids (pixels, origin 0, cell size 1).
//
// Cell (i, j) covers the half-open box
//   [origin_x + i*cell, origin_x + (i+1)*cell) x [origin_y + j*cell, ...)
// and its center sits at origin + (i + 0.5) * cell. Nearest-cell lookup and
// containing-cell lookup therefore coincide.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vsd/errors.hpp"

namespace vsd {

struct GridSpec {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell_size = 1.0;
  int width = 0;   // cells along x
  int height = 0;  // cells along y

  static GridSpec image(int width, int height) {
    return GridSpec{0.0, 0.0, 1.0, width, height};
  }

  void validate() const {
    if (cell_size <= 0.0) throw InvalidConfig("grid cell size must be > 0");
    if (width <= 0 || height <= 0)
      throw InvalidConfig("grid dimensions must be positive");
  }

  // Containing cell of a world coordinate; may be outside [0,w)x[0,h).
  int cell_x(double x) const {
    return static_cast<int>(std::floor((x - origin_x) / cell_size));
  }
  int cell_y(double y) const {
    return static_cast<int>(std::floor((y - origin_y) / cell_size));
  }
  bool contains_cell(int cx, int cy) const {
    return cx >= 0 && cx < width && cy >= 0 && cy < height;
  }
  bool contains_point(double x, double y) const {
    return contains_cell(cell_x(x), cell_y(y));
  }

  double center_x(int cx) const { return origin_x + (cx + 0.5) * cell_size; }
  double center_y(int cy) const { return origin_y + (cy + 0.5) * cell_size; }

  // Fractional cell index such that index i corresponds to the center of
  // cell i. Used by bilinear sampling.
  double frac_x(double x) const { return (x - origin_x) / cell_size - 0.5; }
  double frac_y(double y) const { return (y - origin_y) / cell_size - 0.5; }

  bool operator==(const GridSpec&) const = default;
};

template <typename T>
class Raster {
public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height),
        cells_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  T& at(int x, int y) { return cells_[static_cast<size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const {
    return cells_[static_cast<size_t>(y) * width_ + x];
  }

  // Zero-padded read: anything outside the grid is T{}.
  T at_or_zero(int x, int y) const {
    if (x < 0 || x >= width_ || y < 0 || y >= height_) return T{};
    return at(x, y);
  }

  std::vector<T>& data() { return cells_; }
  const std::vector<T>& data() const { return cells_; }

  template <typename U>
  bool same_dims(const Raster<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Raster&) const = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

// Row-major sum; deterministic accumulation order.
template <typename T>
double raster_sum(const Raster<T>& r) {
  double s = 0.0;
  for (const T& v : r.data()) s += static_cast<double>(v);
  return s;
}

enum class SpaceKind : uint8_t { Plane, Image };

// Coordinate space of annotations and rasters. Image space is tied to one
// camera; plane space is the shared head plane.
struct Space {
  SpaceKind kind = SpaceKind::Plane;
  std::string camera_id;  // empty for plane space

  static Space plane() { return Space{SpaceKind::Plane, {}}; }
  static Space image(std::string camera) {
    return Space{SpaceKind::Image, std::move(camera)};
  }

  bool is_plane() const { return kind == SpaceKind::Plane; }
  bool is_image() const { return kind == SpaceKind::Image; }

  bool operator==(const Space&) const = default;

  std::string str() const {
    return is_plane() ? std::string("plane") : "image:" + camera_id;
  }
};

}  // namespace vsd
