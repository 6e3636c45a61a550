#pragma once

#include "pregi/geom.hpp"
#include "pregi/image.hpp"

#include <vector>

namespace pregi {

/// Labels tested for membership during ray casting.
using LabelSet = std::vector<uint16_t>;

/// Configuration of one forward projection.
struct ProjectionRequest {
  CameraModel camera;
  RigidPose object_pose;        // volume frame -> world
  double step_length = 1.0;     // mm, ray-march step
  int downsample_factor = 1;
  int workers = 1;              // data-parallel pixel evaluation
};

/// Line integral of attenuation along each pixel ray (fixed-step marching
/// with trilinear sampling), at the requested downsample factor.
Image2D project_drr(const Volume3D& vol, const ProjectionRequest& req);

/// DRR restricted to a pixel subset; `pixel_indices` are row-major indices
/// into the downsampled detector. Pixels not listed are left at 0.
void project_drr_pixels(const Volume3D& vol, const ProjectionRequest& req,
                        const std::vector<int>& pixel_indices, Image2D& out);

/// Per-pixel maximum of sampled values along each ray.
Image2D project_weight_mip(const Volume3D& weight_vol, const ProjectionRequest& req);

/// Binary mask: pixel = 1 iff its ray passes through a voxel whose label is
/// in `mismatch_labels` (nearest-neighbor label sampling at march points).
Image2D project_mismatch_mask(const LabelVolume& labels, const LabelSet& mismatch_labels,
                              const ProjectionRequest& req);

/// Binary occluding-boundary edge map: pixel = 1 iff its ray intersects a
/// voxel with label in `surface_labels` and at least one 4-connected
/// neighbor pixel's ray does not.
Image2D project_boundary_edges(const LabelVolume& labels, const LabelSet& surface_labels,
                               const ProjectionRequest& req);

}  // namespace pregi
