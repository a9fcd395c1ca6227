#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "stereorect/geometry.h"
#include "stereorect/metrics.h"

namespace stereorect {

using Rgb = std::array<std::uint8_t, 3>;

//! 8-bit RGB raster, row-major, origin at the top-left pixel.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, Rgb fill = {0, 0, 0});

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb value);
  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  bool operator==(const RasterImage&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

//! Inverse-mapping warp with bilinear sampling; pixels whose source falls
//! outside the input are black. Pixel centers sit at integer coordinates.
//! Throws kSingularHomography.
RasterImage warp(const RasterImage& img, const Mat3& H, int out_width,
                 int out_height);

struct FittedWarp {
  Mat3 H = Mat3::Identity();  // input homography preceded by the offset shift
  int width = 0;
  int height = 0;
};

//! Output size and shifted homography whose frame contains all four mapped
//! corners of a width x height input.
FittedWarp auto_fit_bounds(const Mat3& H, int width, int height);

//! Common frame for a rectified pair: one shift and canvas containing the
//! mapped corners of both views, so rows stay aligned across the pair.
std::pair<FittedWarp, FittedWarp> auto_fit_pair(const Mat3& Hl, const Mat3& Hr,
                                                int width, int height);

//! Rows (left-image v, rounded) of k matches spread evenly over the vertical
//! range of the set.
std::vector<int> scanline_rows(const CorrespondenceSet& matches, int k);

//! Side-by-side composite with k horizontal lines through matches chosen by
//! scanline_rows. k = 0 gives the plain composite.
RasterImage overlay_scanlines(const RasterImage& left, const RasterImage& right,
                              const CorrespondenceSet& matches, int k = 10);

//! Binary P6 PPM, maxval 255.
void write_ppm(const std::filesystem::path& path, const RasterImage& img);
RasterImage read_ppm(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RasterImage& img);
RasterImage read_png(const std::filesystem::path& path);

//! Dispatches on the file extension (.png, .ppm).
RasterImage read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const RasterImage& img);

}  // namespace stereorect
