#pragma once

#include "pregi/geom.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace pregi {

struct ImageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Row-major 2D scalar image. Pixel (row, col) at data[row * cols + col].
struct Image2D {
  int rows = 0;
  int cols = 0;
  double pixel_spacing = 1.0;  // mm / pixel
  std::vector<float> data;

  Image2D() = default;
  Image2D(int r, int c, double spacing = 1.0, float fill = 0.0f)
      : rows(r), cols(c), pixel_spacing(spacing), data(static_cast<size_t>(r) * c, fill)
  {
  }

  float& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  float at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  size_t size() const { return data.size(); }
};

/// 3D scalar grid. Voxel (i, j, k) = (x, y, z) index at data[(k*dims[1] + j)*dims[0] + i].
/// Physical position of voxel v: origin + v * spacing (componentwise).
template <typename T>
struct Grid3 {
  std::array<int, 3> dims = {0, 0, 0};
  Vec3 spacing = Vec3::Ones();
  Vec3 origin = Vec3::Zero();
  std::vector<T> data;

  Grid3() = default;
  Grid3(const std::array<int, 3>& d, const Vec3& sp, const Vec3& org, T fill = T(0))
      : dims(d), spacing(sp), origin(org),
        data(static_cast<size_t>(d[0]) * d[1] * d[2], fill)
  {
  }

  size_t index(int i, int j, int k) const
  {
    return (static_cast<size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  T& at(int i, int j, int k) { return data[index(i, j, k)]; }
  T at(int i, int j, int k) const { return data[index(i, j, k)]; }
  size_t size() const { return data.size(); }

  bool in_bounds(int i, int j, int k) const
  {
    return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
  }

  Vec3 index_to_world(const Vec3& idx) const
  {
    return origin + idx.cwiseProduct(spacing);
  }
  Vec3 world_to_index(const Vec3& p) const
  {
    return (p - origin).cwiseQuotient(spacing);
  }
  /// Center of the voxel grid in world coordinates.
  Vec3 center() const
  {
    return origin + 0.5 * Vec3(dims[0] - 1, dims[1] - 1, dims[2] - 1).cwiseProduct(spacing);
  }
};

using Volume3D = Grid3<float>;
using LabelVolume = Grid3<uint16_t>;

/// Trilinear interpolation at a continuous index; 0 outside [0, dims-1].
inline double trilinear_sample_index(const Volume3D& vol, const Vec3& idx)
{
  const double x = idx.x(), y = idx.y(), z = idx.z();
  if (x < 0.0 || y < 0.0 || z < 0.0 ||
      x > vol.dims[0] - 1 || y > vol.dims[1] - 1 || z > vol.dims[2] - 1)
  {
    return 0.0;
  }
  int i0 = static_cast<int>(x);
  int j0 = static_cast<int>(y);
  int k0 = static_cast<int>(z);
  if (i0 == vol.dims[0] - 1) --i0;
  if (j0 == vol.dims[1] - 1) --j0;
  if (k0 == vol.dims[2] - 1) --k0;
  const double fx = x - i0, fy = y - j0, fz = z - k0;

  const size_t base = vol.index(i0, j0, k0);
  const size_t sx = 1;
  const size_t sy = vol.dims[0];
  const size_t sz = static_cast<size_t>(vol.dims[0]) * vol.dims[1];
  const float* d = vol.data.data();

  const double c00 = d[base] + fx * (d[base + sx] - d[base]);
  const double c10 = d[base + sy] + fx * (d[base + sy + sx] - d[base + sy]);
  const double c01 = d[base + sz] + fx * (d[base + sz + sx] - d[base + sz]);
  const double c11 = d[base + sz + sy] + fx * (d[base + sz + sy + sx] - d[base + sz + sy]);
  const double c0 = c00 + fy * (c10 - c00);
  const double c1 = c01 + fy * (c11 - c01);
  return c0 + fz * (c1 - c0);
}

double trilinear_sample(const Volume3D& vol, const Vec3& p_world);

/// Nearest-neighbor label at a continuous index; 0 outside the grid.
inline uint16_t nearest_label_index(const LabelVolume& lab, const Vec3& idx)
{
  const int i = static_cast<int>(std::lround(idx.x()));
  const int j = static_cast<int>(std::lround(idx.y()));
  const int k = static_cast<int>(std::lround(idx.z()));
  if (!lab.in_bounds(i, j, k)) return 0;
  return lab.at(i, j, k);
}

uint16_t nearest_label(const LabelVolume& lab, const Vec3& p_world);

/// Block-average downsampling; output dims = floor(input / factor).
Image2D downsample(const Image2D& img, int factor);

/// 3x3 Sobel derivatives with edge-replication padding.
void sobel_gradients(const Image2D& img, Image2D& gx, Image2D& gy);

/// Morphological dilation of a binary mask with a square element of
/// half-width `radius`.
Image2D dilate(const Image2D& mask, int radius);

}  // namespace pregi
