// Pinhole camera model and the plane-induced homography between a camera's
// image plane and the head plane at height h_h.
//
// World -> camera: X_c = R * X_w + t. For points on the plane z = h_h the
// projection collapses to the 3x3 homography
//   H = K * [r1  r2  (h_h * r3 + t)]
// with r_k the columns of R, mapping (x, y, 1) on the plane to homogeneous
// pixels. Its inverse is composed as inv(B) * inv(K) so both factors stay
// well conditioned (K carries the pixel scale, B is near-orthonormal).
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "vsd/errors.hpp"
#include "vsd/raster.hpp"

namespace vsd {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

inline double distance(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

inline double distance_sq(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Minimal 3x3 matrix; row-major storage.
struct Mat3 {
  std::array<double, 9> m{};

  static Mat3 identity() {
    Mat3 r;
    r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    return r;
  }

  double& operator()(int row, int col) { return m[row * 3 + col]; }
  double operator()(int row, int col) const { return m[row * 3 + col]; }

  Vec3 operator*(const Vec3& v) const {
    return Vec3{m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j) +
                  (*this)(i, 2) * o(2, j);
    return r;
  }

  Mat3 transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) -
           m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }

  // Adjugate / determinant. Caller guards against singularity.
  Mat3 inverse() const {
    const double d = det();
    Mat3 r;
    r.m = {m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8],
           m[1] * m[5] - m[2] * m[4], m[5] * m[6] - m[3] * m[8],
           m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
           m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7],
           m[0] * m[4] - m[1] * m[3]};
    for (double& v : r.m) v /= d;
    return r;
  }

  bool operator==(const Mat3&) const = default;
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double skew = 0.0;

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
      throw InvalidConfig("focal lengths must be > 0");
  }

  Mat3 matrix() const {
    Mat3 k;
    k.m = {fx, skew, cx, 0, fy, cy, 0, 0, 1};
    return k;
  }

  // Closed-form inverse of the upper-triangular K.
  Mat3 inverse_matrix() const {
    Mat3 k;
    k.m = {1.0 / fx,
           -skew / (fx * fy),
           (skew * cy - cx * fy) / (fx * fy),
           0,
           1.0 / fy,
           -cy / fy,
           0,
           0,
           1};
    return k;
  }
};

struct CameraExtrinsics {
  Mat3 rotation;     // world -> camera
  Vec3 translation;  // meters

  void validate() const {
    const Mat3 rtr = rotation.transposed() * rotation;
    const Mat3 eye = Mat3::identity();
    for (int i = 0; i < 9; ++i) {
      if (std::abs(rtr.m[i] - eye.m[i]) > 1e-9)
        throw InvalidConfig("rotation is not orthonormal within 1e-9");
    }
    if (std::abs(rotation.det() - 1.0) > 1e-9)
      throw InvalidConfig("rotation determinant is not 1 within 1e-9");
  }

  // Camera center in world coordinates: C = -R^T t.
  Vec3 center() const {
    const Mat3 rt = rotation.transposed();
    return Vec3{-(rt.m[0] * translation.x + rt.m[1] * translation.y +
                  rt.m[2] * translation.z),
                -(rt.m[3] * translation.x + rt.m[4] * translation.y +
                  rt.m[5] * translation.z),
                -(rt.m[6] * translation.x + rt.m[7] * translation.y +
                  rt.m[8] * translation.z)};
  }
};

struct CameraModel {
  CameraIntrinsics intrinsics;
  CameraExtrinsics extrinsics;
  int image_width = 0;
  int image_height = 0;
  std::string id;

  void validate(double plane_height) const {
    intrinsics.validate();
    extrinsics.validate();
    if (image_width <= 0 || image_height <= 0)
      throw InvalidConfig("camera '" + id + "': image size must be positive");
    if (std::abs(extrinsics.center().z - plane_height) <= 1e-6)
      throw DegenerateCamera("camera '" + id +
                             "': center lies on the head plane");
  }

  GridSpec image_grid() const { return GridSpec::image(image_width, image_height); }

  // Depth of a world point along the camera z axis.
  double depth(const Vec3& world) const {
    const Mat3& r = extrinsics.rotation;
    return r.m[6] * world.x + r.m[7] * world.y + r.m[8] * world.z +
           extrinsics.translation.z;
  }
};

// Horizontal world plane at head height, with the raster grid used for
// plane-space density maps and masks.
struct HeadPlane {
  double h_h = 1.75;
  GridSpec grid;

  void validate() const {
    if (!(h_h > 0.0)) throw InvalidConfig("head-plane height must be > 0");
    grid.validate();
  }
};

struct PlaneHomography {
  Mat3 H;      // plane (x, y, 1) -> image homogeneous
  Mat3 H_inv;  // image (u, v, 1) -> plane homogeneous
  std::string camera_id;
};

constexpr double kHomogeneousEps = 1e-12;
constexpr double kDetEps = 1e-12;

inline PlaneHomography plane_homography(const CameraModel& camera,
                                        const HeadPlane& plane) {
  camera.validate(plane.h_h);
  plane.validate();

  const Mat3& r = camera.extrinsics.rotation;
  const Vec3& t = camera.extrinsics.translation;

  // B = [r1  r2  h_h*r3 + t], columns of R.
  Mat3 b;
  b.m = {r.m[0], r.m[1], plane.h_h * r.m[2] + t.x,
         r.m[3], r.m[4], plane.h_h * r.m[5] + t.y,
         r.m[6], r.m[7], plane.h_h * r.m[8] + t.z};

  const double det_b = b.det();
  const double det_h = camera.intrinsics.fx * camera.intrinsics.fy * det_b;
  if (std::abs(det_h) <= kDetEps)
    throw DegenerateCamera("camera '" + camera.id +
                           "': plane homography is singular");

  PlaneHomography hom;
  hom.H = camera.intrinsics.matrix() * b;
  hom.H_inv = b.inverse() * camera.intrinsics.inverse_matrix();
  hom.camera_id = camera.id;

  const Mat3 check = hom.H * hom.H_inv;
  const Mat3 eye = Mat3::identity();
  for (int i = 0; i < 9; ++i) {
    if (std::abs(check.m[i] - eye.m[i]) > 1e-9)
      throw DegenerateCamera("camera '" + camera.id +
                             "': homography inverse check failed");
  }
  return hom;
}

inline Vec2 apply_homography(const Mat3& h, const Vec2& p) {
  const Vec3 v = h * Vec3{p.x, p.y, 1.0};
  if (std::abs(v.z) < kHomogeneousEps)
    throw PointAtInfinity("homogeneous w below guard threshold");
  return Vec2{v.x / v.z, v.y / v.z};
}

// Pixel -> head-plane coordinates (meters).
inline Vec2 image_to_plane(const Vec2& pixel, const PlaneHomography& hom) {
  return apply_homography(hom.H_inv, pixel);
}

// Head-plane coordinates (meters) -> pixel.
inline Vec2 plane_to_image(const Vec2& plane_pt, const PlaneHomography& hom) {
  return apply_homography(hom.H, plane_pt);
}

enum class WarpDirection { ImageToPlane, PlaneToImage };

namespace detail {

inline double bilinear_sample(const Raster<double>& src, double fx, double fy) {
  const double x0f = std::floor(fx);
  const double y0f = std::floor(fy);
  const int x0 = static_cast<int>(x0f);
  const int y0 = static_cast<int>(y0f);
  const double ax = fx - x0f;
  const double ay = fy - y0f;
  const double v00 = src.at_or_zero(x0, y0);
  const double v10 = src.at_or_zero(x0 + 1, y0);
  const double v01 = src.at_or_zero(x0, y0 + 1);
  const double v11 = src.at_or_zero(x0 + 1, y0 + 1);
  return v00 * (1.0 - ax) * (1.0 - ay) + v10 * ax * (1.0 - ay) +
         v01 * (1.0 - ax) * ay + v11 * ax * ay;
}

}  // namespace detail

// Resample src onto the target grid through the homography. Each target cell
// center is mapped back into the source space and sampled bilinearly; samples
// falling outside the source grid (or mapping to infinity) read as 0.
inline Raster<double> warp_raster(const Raster<double>& src,
                                  const GridSpec& src_grid,
                                  const PlaneHomography& hom,
                                  WarpDirection direction,
                                  const GridSpec& target_grid) {
  src_grid.validate();
  target_grid.validate();
  if (src.width() != src_grid.width || src.height() != src_grid.height)
    throw DimMismatch("source raster does not match its grid spec");

  // Inverse map: target cell center -> source coordinates.
  const Mat3& back = (direction == WarpDirection::ImageToPlane) ? hom.H
                                                                : hom.H_inv;

  Raster<double> out(target_grid.width, target_grid.height, 0.0);
  for (int cy = 0; cy < target_grid.height; ++cy) {
    const double wy = target_grid.center_y(cy);
    for (int cx = 0; cx < target_grid.width; ++cx) {
      const double wx = target_grid.center_x(cx);
      const Vec3 v = back * Vec3{wx, wy, 1.0};
      if (std::abs(v.z) < kHomogeneousEps) continue;  // horizon: reads as 0
      const double sx = v.x / v.z;
      const double sy = v.y / v.z;
      out.at(cx, cy) =
          detail::bilinear_sample(src, src_grid.frac_x(sx), src_grid.frac_y(sy));
    }
  }
  return out;
}

}  // namespace vsd
