#include "pregi/weights.hpp"

#include "pregi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pregi {

WeightLUT::WeightLUT(std::initializer_list<std::pair<const uint16_t, double>> init) : map_(init)
{
  for (const auto& [label, w] : map_)
  {
    if (w < 0.0) throw WeightError("WeightLUT: negative weight");
  }
}

void WeightLUT::set(uint16_t label, double weight)
{
  if (weight < 0.0) throw WeightError("WeightLUT: negative weight");
  map_[label] = weight;
}

double WeightLUT::weight(uint16_t label) const
{
  const auto it = map_.find(label);
  return it == map_.end() ? 0.0 : it->second;
}

Volume3D build_weight_volume(const LabelVolume& labels, const WeightLUT& lut)
{
  Volume3D out(labels.dims, labels.spacing, labels.origin);
  // dense LUT over the label range; label volumes are small-alphabet
  uint16_t max_label = 0;
  for (uint16_t l : labels.data) max_label = std::max(max_label, l);
  std::vector<float> dense(static_cast<size_t>(max_label) + 1, 0.0f);
  for (size_t l = 0; l < dense.size(); ++l)
  {
    dense[l] = static_cast<float>(lut.weight(static_cast<uint16_t>(l)));
  }
  for (size_t i = 0; i < labels.data.size(); ++i) out.data[i] = dense[labels.data[i]];
  return out;
}

Image2D compute_pixel_weight_map(const Volume3D& weight_vol, const LabelVolume& labels,
                                 const LabelSet& mismatch_labels, const LabelSet& surface_labels,
                                 const ProjectionRequest& req, const WeightParams& params)
{
  const Image2D mask = project_mismatch_mask(labels, mismatch_labels, req);
  Image2D edges = project_boundary_edges(labels, surface_labels, req);

  // prune, dilate, prune again
  for (size_t i = 0; i < edges.data.size(); ++i)
  {
    if (mask.data[i] != 0.0f) edges.data[i] = 0.0f;
  }
  edges = dilate(edges, params.edge_dilation_radius);
  for (size_t i = 0; i < edges.data.size(); ++i)
  {
    if (mask.data[i] != 0.0f) edges.data[i] = 0.0f;
  }

  Image2D w = project_weight_mip(weight_vol, req);
  for (size_t i = 0; i < w.data.size(); ++i)
  {
    double v = w.data[i];
    if (edges.data[i] != 0.0f) v *= params.edge_scale;
    if (mask.data[i] != 0.0f) v *= params.mask_scale;
    w.data[i] = static_cast<float>(v);
  }
  return w;
}

PatchWeights compute_2d_weights(const Volume3D& weight_vol, const LabelVolume& labels,
                                const LabelSet& mismatch_labels, const LabelSet& surface_labels,
                                const ProjectionRequest& req, const WeightParams& params,
                                const PatchGrid& grid)
{
  const Image2D pixel_w =
      compute_pixel_weight_map(weight_vol, labels, mismatch_labels, surface_labels, req, params);

  // summed-area table for O(1) patch footprint sums
  const int rows = pixel_w.rows, cols = pixel_w.cols;
  const int w = cols + 1;
  std::vector<double> sat(static_cast<size_t>(rows + 1) * w, 0.0);
  for (int r = 0; r < rows; ++r)
  {
    double acc = 0.0;
    for (int c = 0; c < cols; ++c)
    {
      acc += pixel_w.at(r, c);
      sat[static_cast<size_t>(r + 1) * w + c + 1] = sat[static_cast<size_t>(r) * w + c + 1] + acc;
    }
  }

  PatchWeights out;
  out.grid = grid;
  out.weights.resize(grid.centers.size());
  const int rad = grid.radius;
  double total = 0.0;
  for (size_t k = 0; k < grid.centers.size(); ++k)
  {
    const auto [cr, cc] = grid.centers[k];
    const int r0 = cr - rad, c0 = cc - rad, r1 = cr + rad, c1 = cc + rad;
    const double s = sat[static_cast<size_t>(r1 + 1) * w + c1 + 1] -
                     sat[static_cast<size_t>(r0) * w + c1 + 1] -
                     sat[static_cast<size_t>(r1 + 1) * w + c0] +
                     sat[static_cast<size_t>(r0) * w + c0];
    out.weights[k] = std::max(0.0, s);
    total += out.weights[k];
  }

  if (total <= 0.0)
  {
    throw DegenerateWeightsError("compute_2d_weights: all-zero weight map");
  }
  for (double& v : out.weights) v /= total;
  return out;
}

PatchWeights sample_patch_subset(const PatchWeights& pw, int n, uint64_t rng_seed)
{
  if (n < 1) throw WeightError("sample_patch_subset: n must be >= 1");

  std::vector<size_t> nonzero;
  nonzero.reserve(pw.weights.size());
  for (size_t k = 0; k < pw.weights.size(); ++k)
  {
    if (pw.weights[k] > 0.0) nonzero.push_back(k);
  }
  if (nonzero.empty()) throw WeightError("sample_patch_subset: no nonzero-weight patches");

  std::vector<size_t> chosen;
  if (static_cast<size_t>(n) >= nonzero.size())
  {
    chosen = nonzero;
  }
  else
  {
    // weighted reservoir (Efraimidis-Spirakis): top-n keys u^(1/w) is
    // equivalent to sequential weighted draws without replacement
    Rng rng(rng_seed);
    std::vector<std::pair<double, size_t>> keys;
    keys.reserve(nonzero.size());
    for (size_t k : nonzero)
    {
      double u = rng.uniform();
      while (u <= 0.0) u = rng.uniform();
      keys.emplace_back(std::log(u) / pw.weights[k], k);
    }
    std::partial_sort(keys.begin(), keys.begin() + n, keys.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    chosen.reserve(n);
    for (int i = 0; i < n; ++i) chosen.push_back(keys[i].second);
    std::sort(chosen.begin(), chosen.end());
  }

  PatchWeights out;
  out.grid.radius = pw.grid.radius;
  out.grid.centers.reserve(chosen.size());
  out.weights.reserve(chosen.size());
  double total = 0.0;
  for (size_t k : chosen)
  {
    out.grid.centers.push_back(pw.grid.centers[k]);
    out.weights.push_back(pw.weights[k]);
    total += pw.weights[k];
  }
  for (double& v : out.weights) v /= total;
  return out;
}

int grow_patch_count(int n)
{
  if (n < 1) throw WeightError("grow_patch_count: n must be >= 1");
  constexpr double kGoldenRatio = 1.6180339887498948482;
  return static_cast<int>(std::lround(n * kGoldenRatio));
}

PatchWeights uniform_patch_weights(const PatchGrid& grid)
{
  PatchWeights pw;
  pw.grid = grid;
  pw.weights.assign(grid.centers.size(), 1.0 / static_cast<double>(grid.centers.size()));
  return pw;
}

}  // namespace pregi
