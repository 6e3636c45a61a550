#include "pregi/similarity.hpp"

#include <cmath>

namespace pregi {

PatchGrid complete_patch_grid(int rows, int cols, int radius)
{
  if (radius < 0) throw SimilarityError("complete_patch_grid: negative radius");
  if (rows < 2 * radius + 1 || cols < 2 * radius + 1)
  {
    throw SimilarityError("complete_patch_grid: image too small for patch radius");
  }
  PatchGrid grid;
  grid.radius = radius;
  grid.centers.reserve(static_cast<size_t>(rows - 2 * radius) * (cols - 2 * radius));
  for (int r = radius; r <= rows - 1 - radius; ++r)
  {
    for (int c = radius; c <= cols - 1 - radius; ++c) grid.centers.emplace_back(r, c);
  }
  return grid;
}

namespace {

void build_sat(const Image2D& img, std::vector<double>& s, std::vector<double>& ss)
{
  const int rows = img.rows, cols = img.cols;
  const int w = cols + 1;
  s.assign(static_cast<size_t>(rows + 1) * w, 0.0);
  ss.assign(static_cast<size_t>(rows + 1) * w, 0.0);
  for (int r = 0; r < rows; ++r)
  {
    double acc = 0.0, acc2 = 0.0;
    const float* src = &img.data[static_cast<size_t>(r) * cols];
    double* dst = &s[static_cast<size_t>(r + 1) * w];
    double* dst2 = &ss[static_cast<size_t>(r + 1) * w];
    const double* prev = &s[static_cast<size_t>(r) * w];
    const double* prev2 = &ss[static_cast<size_t>(r) * w];
    for (int c = 0; c < cols; ++c)
    {
      const double v = src[c];
      acc += v;
      acc2 += v * v;
      dst[c + 1] = prev[c + 1] + acc;
      dst2[c + 1] = prev2[c + 1] + acc2;
    }
  }
}

void build_sat_product(const Image2D& a, const Image2D& b, std::vector<double>& s)
{
  const int rows = a.rows, cols = a.cols;
  const int w = cols + 1;
  s.assign(static_cast<size_t>(rows + 1) * w, 0.0);
  for (int r = 0; r < rows; ++r)
  {
    double acc = 0.0;
    const float* pa = &a.data[static_cast<size_t>(r) * cols];
    const float* pb = &b.data[static_cast<size_t>(r) * cols];
    double* dst = &s[static_cast<size_t>(r + 1) * w];
    const double* prev = &s[static_cast<size_t>(r) * w];
    for (int c = 0; c < cols; ++c)
    {
      acc += static_cast<double>(pa[c]) * pb[c];
      dst[c + 1] = prev[c + 1] + acc;
    }
  }
}

constexpr double kDegenerateVarEps = 1e-24;

}  // namespace

PatchStats::PatchStats(const Image2D& a, const Image2D& b) : rows_(a.rows), cols_(a.cols)
{
  if (a.rows != b.rows || a.cols != b.cols)
  {
    throw SimilarityError("PatchStats: image dimensions differ");
  }
  std::vector<double> tmp;
  build_sat(a, sa_, saa_);
  build_sat(b, sb_, sbb_);
  build_sat_product(a, b, sab_);
}

std::optional<double> PatchStats::ncc(int r0, int c0, int r1, int c1) const
{
  const double n = static_cast<double>(r1 - r0 + 1) * (c1 - c0 + 1);
  const double s1 = rect(sa_, r0, c0, r1, c1);
  const double s2 = rect(sb_, r0, c0, r1, c1);
  const double s11 = rect(saa_, r0, c0, r1, c1);
  const double s22 = rect(sbb_, r0, c0, r1, c1);
  const double s12 = rect(sab_, r0, c0, r1, c1);

  const double var1 = s11 / n - (s1 / n) * (s1 / n);
  const double var2 = s22 / n - (s2 / n) * (s2 / n);
  if (var1 <= kDegenerateVarEps || var2 <= kDegenerateVarEps) return std::nullopt;

  const double cov = s12 / n - (s1 / n) * (s2 / n);
  return cov / std::sqrt(var1 * var2);
}

namespace {

// Direct two-pass evaluation; reference path used by the pure functions.
std::optional<double> ncc_rect_direct(const Image2D& i1, const Image2D& i2,
                                      int r0, int c0, int r1, int c1)
{
  const double n = static_cast<double>(r1 - r0 + 1) * (c1 - c0 + 1);
  double s1 = 0.0, s2 = 0.0;
  for (int r = r0; r <= r1; ++r)
  {
    for (int c = c0; c <= c1; ++c)
    {
      s1 += i1.at(r, c);
      s2 += i2.at(r, c);
    }
  }
  const double m1 = s1 / n, m2 = s2 / n;
  double v1 = 0.0, v2 = 0.0, cov = 0.0;
  for (int r = r0; r <= r1; ++r)
  {
    for (int c = c0; c <= c1; ++c)
    {
      const double d1 = i1.at(r, c) - m1;
      const double d2 = i2.at(r, c) - m2;
      v1 += d1 * d1;
      v2 += d2 * d2;
      cov += d1 * d2;
    }
  }
  if (v1 / n <= kDegenerateVarEps || v2 / n <= kDegenerateVarEps) return std::nullopt;
  return cov / std::sqrt(v1 * v2);
}

}  // namespace

std::optional<double> ncc_patch(const Image2D& i1, const Image2D& i2, const Patch& patch)
{
  if (i1.rows != i2.rows || i1.cols != i2.cols)
  {
    throw SimilarityError("ncc_patch: image dimensions differ");
  }
  if (!patch.fits(i1.rows, i1.cols)) throw SimilarityError("ncc_patch: patch does not fit");
  return ncc_rect_direct(i1, i2,
                         patch.center_row - patch.radius, patch.center_col - patch.radius,
                         patch.center_row + patch.radius, patch.center_col + patch.radius);
}

GradientPair compute_gradients(const Image2D& img)
{
  GradientPair g;
  sobel_gradients(img, g.gx, g.gy);
  return g;
}

double grad_ncc_patch(const Image2D& i1, const Image2D& i2, const Patch& patch,
                      const GradientPair* g1, const GradientPair* g2)
{
  GradientPair local1, local2;
  if (!g1)
  {
    local1 = compute_gradients(i1);
    g1 = &local1;
  }
  if (!g2)
  {
    local2 = compute_gradients(i2);
    g2 = &local2;
  }
  const auto sx = ncc_patch(g1->gx, g2->gx, patch);
  const auto sy = ncc_patch(g1->gy, g2->gy, patch);
  return sx.value_or(0.0) + sy.value_or(0.0);
}

double patch_grad_ncc(const Image2D& i1, const Image2D& i2, const PatchGrid& grid,
                      const std::vector<double>& weights)
{
  if (weights.size() != grid.centers.size())
  {
    throw SimilarityError("patch_grad_ncc: weight count does not match grid");
  }
  for (double w : weights)
  {
    if (w < 0.0) throw SimilarityError("patch_grad_ncc: negative weight");
  }

  const GradientPair g1 = compute_gradients(i1);
  const GradientPair g2 = compute_gradients(i2);
  const PatchStats sx(g1.gx, g2.gx);
  const PatchStats sy(g1.gy, g2.gy);

  const int rad = grid.radius;
  double total = 0.0;
  for (size_t k = 0; k < grid.centers.size(); ++k)
  {
    const auto [cr, cc] = grid.centers[k];
    const auto nx = sx.ncc(cr - rad, cc - rad, cr + rad, cc + rad);
    const auto ny = sy.ncc(cr - rad, cc - rad, cr + rad, cc + rad);
    total += weights[k] * (nx.value_or(0.0) + ny.value_or(0.0));
  }
  return total;
}

std::vector<double> variance_patch_weights(const Image2D& fixed_image, const PatchGrid& grid)
{
  const int rad = grid.radius;
  std::vector<double> weights(grid.centers.size(), 0.0);
  double sum = 0.0;
  for (size_t k = 0; k < grid.centers.size(); ++k)
  {
    const auto [cr, cc] = grid.centers[k];
    const int r0 = cr - rad, c0 = cc - rad, r1 = cr + rad, c1 = cc + rad;
    const double n = static_cast<double>(r1 - r0 + 1) * (c1 - c0 + 1);
    double s = 0.0, ss = 0.0;
    for (int r = r0; r <= r1; ++r)
    {
      for (int c = c0; c <= c1; ++c)
      {
        const double v = fixed_image.at(r, c);
        s += v;
        ss += v * v;
      }
    }
    const double var = std::max(0.0, ss / n - (s / n) * (s / n));
    weights[k] = var;
    sum += var;
  }
  if (sum <= 0.0)
  {
    const double u = 1.0 / static_cast<double>(weights.size());
    std::fill(weights.begin(), weights.end(), u);
    return weights;
  }
  for (double& v : weights) v /= sum;
  return weights;
}

double grad_ncc_whole_image(const Image2D& i1, const Image2D& i2,
                            const GradientPair* g1, const GradientPair* g2)
{
  GradientPair local1, local2;
  if (!g1)
  {
    local1 = compute_gradients(i1);
    g1 = &local1;
  }
  if (!g2)
  {
    local2 = compute_gradients(i2);
    g2 = &local2;
  }
  const auto nx = ncc_rect_direct(g1->gx, g2->gx, 0, 0, i1.rows - 1, i1.cols - 1);
  const auto ny = ncc_rect_direct(g1->gy, g2->gy, 0, 0, i1.rows - 1, i1.cols - 1);
  return nx.value_or(0.0) + ny.value_or(0.0);
}

}  // namespace pregi
