#pragma once

#include "pregi/projector.hpp"
#include "pregi/similarity.hpp"

#include <cstdint>
#include <unordered_map>

namespace pregi {

struct WeightError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Signals an all-zero 2D weight map; callers fall back to uniform weights.
struct DegenerateWeightsError : WeightError {
  using WeightError::WeightError;
};

/// Label -> nonnegative weight; unknown labels map to 0.
class WeightLUT {
 public:
  WeightLUT() = default;
  WeightLUT(std::initializer_list<std::pair<const uint16_t, double>> init);

  void set(uint16_t label, double weight);
  double weight(uint16_t label) const;
  const std::unordered_map<uint16_t, double>& entries() const { return map_; }

 private:
  std::unordered_map<uint16_t, double> map_;
};

/// Categorical weighting over the patches of a grid; sums to 1.
struct PatchWeights {
  PatchGrid grid;
  std::vector<double> weights;
};

struct WeightParams {
  double edge_scale = 10.0;
  double mask_scale = 0.1;
  int edge_dilation_radius = 1;
};

/// Voxelwise LUT application; geometry copied from the label volume.
Volume3D build_weight_volume(const LabelVolume& labels, const WeightLUT& lut);

/// Pixel weight map of the 2D weighting pipeline: MIP of the 3D weights,
/// model-consistent boundary edges scaled up, expected-mismatch pixels
/// scaled down. Exposed separately so the per-pixel map can be inspected.
Image2D compute_pixel_weight_map(const Volume3D& weight_vol, const LabelVolume& labels,
                                 const LabelSet& mismatch_labels, const LabelSet& surface_labels,
                                 const ProjectionRequest& req, const WeightParams& params);

/// Full pipeline reducing the pixel weight map to normalized per-patch
/// weights (pixel weights summed over each patch footprint).
/// Throws DegenerateWeightsError when every pixel weight is zero.
PatchWeights compute_2d_weights(const Volume3D& weight_vol, const LabelVolume& labels,
                                const LabelSet& mismatch_labels, const LabelSet& surface_labels,
                                const ProjectionRequest& req, const WeightParams& params,
                                const PatchGrid& grid);

/// Draw n distinct patches with probability proportional to weight and
/// renormalize. If n covers every nonzero-weight patch, returns the
/// nonzero-weight patches directly.
PatchWeights sample_patch_subset(const PatchWeights& pw, int n, uint64_t rng_seed);

/// Golden-ratio growth schedule: round(n * (1+sqrt(5))/2).
int grow_patch_count(int n);

/// Uniform weighting over a grid.
PatchWeights uniform_patch_weights(const PatchGrid& grid);

}  // namespace pregi
