#include "pregi/image.hpp"

#include <algorithm>
#include <cmath>

namespace pregi {

double trilinear_sample(const Volume3D& vol, const Vec3& p_world)
{
  return trilinear_sample_index(vol, vol.world_to_index(p_world));
}

uint16_t nearest_label(const LabelVolume& lab, const Vec3& p_world)
{
  return nearest_label_index(lab, lab.world_to_index(p_world));
}

Image2D downsample(const Image2D& img, int factor)
{
  if (factor < 1) throw ImageError("downsample: factor must be >= 1");
  if (factor == 1) return img;

  Image2D out(img.rows / factor, img.cols / factor, img.pixel_spacing * factor);
  const double inv_area = 1.0 / (static_cast<double>(factor) * factor);
  for (int r = 0; r < out.rows; ++r)
  {
    for (int c = 0; c < out.cols; ++c)
    {
      double sum = 0.0;
      for (int dr = 0; dr < factor; ++dr)
      {
        const float* row = &img.data[static_cast<size_t>(r * factor + dr) * img.cols + c * factor];
        for (int dc = 0; dc < factor; ++dc) sum += row[dc];
      }
      out.at(r, c) = static_cast<float>(sum * inv_area);
    }
  }
  return out;
}

void sobel_gradients(const Image2D& img, Image2D& gx, Image2D& gy)
{
  if (img.rows < 3 || img.cols < 3) throw ImageError("sobel_gradients: image smaller than 3x3");

  gx = Image2D(img.rows, img.cols, img.pixel_spacing);
  gy = Image2D(img.rows, img.cols, img.pixel_spacing);

  const auto px = [&](int r, int c) -> double {
    r = std::clamp(r, 0, img.rows - 1);
    c = std::clamp(c, 0, img.cols - 1);
    return img.at(r, c);
  };

  for (int r = 0; r < img.rows; ++r)
  {
    for (int c = 0; c < img.cols; ++c)
    {
      const double p00 = px(r - 1, c - 1), p01 = px(r - 1, c), p02 = px(r - 1, c + 1);
      const double p10 = px(r, c - 1), p12 = px(r, c + 1);
      const double p20 = px(r + 1, c - 1), p21 = px(r + 1, c), p22 = px(r + 1, c + 1);
      gx.at(r, c) = static_cast<float>((p02 + 2.0 * p12 + p22) - (p00 + 2.0 * p10 + p20));
      gy.at(r, c) = static_cast<float>((p20 + 2.0 * p21 + p22) - (p00 + 2.0 * p01 + p02));
    }
  }
}

Image2D dilate(const Image2D& mask, int radius)
{
  if (radius < 0) throw ImageError("dilate: radius must be >= 0");
  if (radius == 0) return mask;

  Image2D out(mask.rows, mask.cols, mask.pixel_spacing);
  for (int r = 0; r < mask.rows; ++r)
  {
    for (int c = 0; c < mask.cols; ++c)
    {
      if (mask.at(r, c) == 0.0f) continue;
      const int r0 = std::max(0, r - radius), r1 = std::min(mask.rows - 1, r + radius);
      const int c0 = std::max(0, c - radius), c1 = std::min(mask.cols - 1, c + radius);
      for (int rr = r0; rr <= r1; ++rr)
      {
        for (int cc = c0; cc <= c1; ++cc) out.at(rr, cc) = 1.0f;
      }
    }
  }
  return out;
}

}  // namespace pregi
