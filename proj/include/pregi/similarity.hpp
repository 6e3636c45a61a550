#pragma once

#include "pregi/image.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace pregi {

struct SimilarityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Square patch: rows [c_r - r, c_r + r], cols [c_c - r, c_c + r].
struct Patch {
  int center_row = 0;
  int center_col = 0;
  int radius = 0;

  bool fits(int rows, int cols) const
  {
    return center_row >= radius && center_col >= radius &&
           center_row <= rows - 1 - radius && center_col <= cols - 1 - radius;
  }
};

/// Ordered set of patch centers sharing one radius.
struct PatchGrid {
  int radius = 0;
  std::vector<std::pair<int, int>> centers;  // (row, col)

  size_t size() const { return centers.size(); }
};

/// All centers with unit stride whose patch fits: (rows-2r)*(cols-2r)
/// patches in row-major order.
PatchGrid complete_patch_grid(int rows, int cols, int radius);

/// Summed-area tables over two images and their elementwise product,
/// giving O(1) rectangle sums for patch statistics.
class PatchStats {
 public:
  PatchStats(const Image2D& a, const Image2D& b);

  /// NCC of Eq.-style patchwise normalized cross-correlation over rows
  /// [r0, r1] x cols [c0, c1] (inclusive). nullopt when either side has
  /// zero within-patch standard deviation.
  std::optional<double> ncc(int r0, int c0, int r1, int c1) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  // (cols_+1) per row, row 0 and col 0 are zero padding
  std::vector<double> sa_, sb_, saa_, sbb_, sab_;

  double rect(const std::vector<double>& s, int r0, int c0, int r1, int c1) const
  {
    const int w = cols_ + 1;
    return s[static_cast<size_t>(r1 + 1) * w + (c1 + 1)] -
           s[static_cast<size_t>(r0) * w + (c1 + 1)] -
           s[static_cast<size_t>(r1 + 1) * w + c0] +
           s[static_cast<size_t>(r0) * w + c0];
  }
};

/// Patchwise NCC with population statistics (divisor = patch area).
/// nullopt signals a degenerate (constant) patch on either side.
std::optional<double> ncc_patch(const Image2D& i1, const Image2D& i2, const Patch& patch);

/// Precomputed Sobel derivatives for one image.
struct GradientPair {
  Image2D gx;
  Image2D gy;
};

GradientPair compute_gradients(const Image2D& img);

/// NCC on the Sobel X derivatives plus NCC on the Sobel Y derivatives.
/// Degenerate components contribute 0; range [-2, 2].
double grad_ncc_patch(const Image2D& i1, const Image2D& i2, const Patch& patch,
                      const GradientPair* g1 = nullptr, const GradientPair* g2 = nullptr);

/// Weighted sum of per-patch Grad-NCC values over a grid.
double patch_grad_ncc(const Image2D& i1, const Image2D& i2, const PatchGrid& grid,
                      const std::vector<double>& weights);

/// Within-patch intensity variance of the fixed image, normalized to sum 1.
/// Falls back to uniform weights when all patches are constant.
std::vector<double> variance_patch_weights(const Image2D& fixed_image, const PatchGrid& grid);

/// Grad-NCC with a single patch covering the entire (possibly non-square)
/// image extent.
double grad_ncc_whole_image(const Image2D& i1, const Image2D& i2,
                            const GradientPair* g1 = nullptr, const GradientPair* g2 = nullptr);

}  // namespace pregi
