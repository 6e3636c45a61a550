#include "pregi/projector.hpp"

#include "pregi/threading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pregi {

namespace {

/// Per-projection precomputation mapping detector pixels to rays in
/// continuous volume index space. The ray parameter stays in world mm.
struct RaySetup {
  CameraModel cam;       // downsampled camera
  Vec3 origin_idx;       // source position, index space
  Mat3 pixel_to_idx;     // maps detector-plane point (cam frame, mm) to index-space direction
  Vec3 bounds;           // dims - 1
  double step = 1.0;

  template <typename G>
  explicit RaySetup(const Grid3<G>& grid, const ProjectionRequest& req)
  {
    cam = req.camera.downsampled(req.downsample_factor);
    step = req.step_length;

    const RigidPose cam_to_world = cam.extrinsic.inverse();
    const RigidPose world_to_vol = req.object_pose.inverse();
    const Vec3 inv_spacing = grid.spacing.cwiseInverse();

    const Vec3 source_world = cam_to_world.translation;
    origin_idx = (world_to_vol.apply(source_world) - grid.origin).cwiseProduct(inv_spacing);
    pixel_to_idx = inv_spacing.asDiagonal() *
                   (world_to_vol.rotation * cam_to_world.rotation);
    bounds = Vec3(grid.dims[0] - 1, grid.dims[1] - 1, grid.dims[2] - 1);
  }

  /// Index-space direction for pixel (row, col); parameter t is world mm.
  Vec3 direction(int row, int col) const
  {
    const Vec3 det_pt((col - cam.principal_point.x()) * cam.pixel_spacing,
                      (row - cam.principal_point.y()) * cam.pixel_spacing,
                      cam.source_to_detector);
    return pixel_to_idx * (det_pt / det_pt.norm());
  }

  /// Clip [0, inf) against the index-space box; false when the ray misses.
  bool clip(const Vec3& dir, double& t0, double& t1) const
  {
    t0 = 0.0;
    t1 = std::numeric_limits<double>::max();
    for (int a = 0; a < 3; ++a)
    {
      const double d = dir(a);
      const double o = origin_idx(a);
      if (std::abs(d) < 1e-14)
      {
        if (o < 0.0 || o > bounds(a)) return false;
        continue;
      }
      const double ta = (0.0 - o) / d;
      const double tb = (bounds(a) - o) / d;
      t0 = std::max(t0, std::min(ta, tb));
      t1 = std::min(t1, std::max(ta, tb));
    }
    return t1 > t0;
  }
};

template <typename PerPixel>
Image2D raster(const RaySetup& setup, int workers, const PerPixel& per_pixel)
{
  Image2D out(setup.cam.detector_rows, setup.cam.detector_cols, setup.cam.pixel_spacing);
  parallel_for(static_cast<size_t>(out.rows), workers, [&](size_t r_begin, size_t r_end) {
    for (size_t r = r_begin; r < r_end; ++r)
    {
      for (int c = 0; c < out.cols; ++c)
      {
        out.at(static_cast<int>(r), c) = per_pixel(static_cast<int>(r), c);
      }
    }
  });
  return out;
}

float integrate_ray(const Volume3D& vol, const RaySetup& setup, int row, int col)
{
  const Vec3 dir = setup.direction(row, col);
  double t0, t1;
  if (!setup.clip(dir, t0, t1)) return 0.0f;

  const double span = t1 - t0;
  const int n = std::max(1, static_cast<int>(std::lround(span / setup.step)));
  const double dt = span / n;

  double sum = 0.0;
  Vec3 p = setup.origin_idx + (t0 + 0.5 * dt) * dir;
  const Vec3 dp = dt * dir;
  for (int i = 0; i < n; ++i)
  {
    sum += trilinear_sample_index(vol, p);
    p += dp;
  }
  return static_cast<float>(sum * dt);
}

}  // namespace

Image2D project_drr(const Volume3D& vol, const ProjectionRequest& req)
{
  const RaySetup setup(vol, req);
  return raster(setup, req.workers,
                [&](int r, int c) { return integrate_ray(vol, setup, r, c); });
}

void project_drr_pixels(const Volume3D& vol, const ProjectionRequest& req,
                        const std::vector<int>& pixel_indices, Image2D& out)
{
  const RaySetup setup(vol, req);
  if (out.rows != setup.cam.detector_rows || out.cols != setup.cam.detector_cols)
  {
    out = Image2D(setup.cam.detector_rows, setup.cam.detector_cols, setup.cam.pixel_spacing);
  }
  parallel_for(pixel_indices.size(), req.workers, [&](size_t begin, size_t end) {
    for (size_t k = begin; k < end; ++k)
    {
      const int idx = pixel_indices[k];
      out.data[idx] = integrate_ray(vol, setup, idx / out.cols, idx % out.cols);
    }
  });
}

Image2D project_weight_mip(const Volume3D& weight_vol, const ProjectionRequest& req)
{
  const RaySetup setup(weight_vol, req);
  return raster(setup, req.workers, [&](int r, int c) -> float {
    const Vec3 dir = setup.direction(r, c);
    double t0, t1;
    if (!setup.clip(dir, t0, t1)) return 0.0f;

    const double span = t1 - t0;
    const int n = std::max(1, static_cast<int>(std::lround(span / setup.step)));
    const double dt = span / n;

    double best = 0.0;
    Vec3 p = setup.origin_idx + (t0 + 0.5 * dt) * dir;
    const Vec3 dp = dt * dir;
    for (int i = 0; i < n; ++i)
    {
      best = std::max(best, trilinear_sample_index(weight_vol, p));
      p += dp;
    }
    return static_cast<float>(best);
  });
}

namespace {

std::vector<uint8_t> label_lookup(const LabelSet& labels)
{
  uint16_t max_label = 0;
  for (uint16_t l : labels) max_label = std::max(max_label, l);
  std::vector<uint8_t> lut(static_cast<size_t>(max_label) + 1, 0);
  for (uint16_t l : labels) lut[l] = 1;
  return lut;
}

Image2D ray_hits_labels(const LabelVolume& labels, const LabelSet& label_set,
                        const ProjectionRequest& req)
{
  const RaySetup setup(labels, req);
  if (label_set.empty())
  {
    return Image2D(setup.cam.detector_rows, setup.cam.detector_cols, setup.cam.pixel_spacing);
  }
  const auto lut = label_lookup(label_set);
  return raster(setup, req.workers, [&](int r, int c) -> float {
    const Vec3 dir = setup.direction(r, c);
    double t0, t1;
    if (!setup.clip(dir, t0, t1)) return 0.0f;

    const double span = t1 - t0;
    const int n = std::max(1, static_cast<int>(std::lround(span / setup.step)));
    const double dt = span / n;

    Vec3 p = setup.origin_idx + (t0 + 0.5 * dt) * dir;
    const Vec3 dp = dt * dir;
    for (int i = 0; i < n; ++i)
    {
      const uint16_t lab = nearest_label_index(labels, p);
      if (lab < lut.size() && lut[lab]) return 1.0f;
      p += dp;
    }
    return 0.0f;
  });
}

}  // namespace

Image2D project_mismatch_mask(const LabelVolume& labels, const LabelSet& mismatch_labels,
                              const ProjectionRequest& req)
{
  return ray_hits_labels(labels, mismatch_labels, req);
}

Image2D project_boundary_edges(const LabelVolume& labels, const LabelSet& surface_labels,
                               const ProjectionRequest& req)
{
  const Image2D hits = ray_hits_labels(labels, surface_labels, req);

  Image2D edges(hits.rows, hits.cols, hits.pixel_spacing);
  for (int r = 0; r < hits.rows; ++r)
  {
    for (int c = 0; c < hits.cols; ++c)
    {
      if (hits.at(r, c) == 0.0f) continue;
      // in-bounds 4-neighbors only: a surface filling the view has no edges
      const bool open =
          (r > 0 && hits.at(r - 1, c) == 0.0f) ||
          (r + 1 < hits.rows && hits.at(r + 1, c) == 0.0f) ||
          (c > 0 && hits.at(r, c - 1) == 0.0f) ||
          (c + 1 < hits.cols && hits.at(r, c + 1) == 0.0f);
      if (open) edges.at(r, c) = 1.0f;
    }
  }
  return edges;
}

}  // namespace pregi
