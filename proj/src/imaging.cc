#include "stereorect/imaging.h"

#include <png.h>

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "stereorect/error.h"

namespace stereorect {
namespace {

constexpr Rgb kLinePalette[] = {{255, 64, 64},  {64, 255, 64},  {64, 128, 255},
                                {255, 255, 64}, {255, 64, 255}, {64, 255, 255}};

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

void check_size(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be >= 1");
  }
}

}  // namespace

RasterImage::RasterImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  check_size(width, height);
  data_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

Rgb RasterImage::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void RasterImage::set(int x, int y, Rgb v) {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  data_[i] = v[0];
  data_[i + 1] = v[1];
  data_[i + 2] = v[2];
}

RasterImage warp(const RasterImage& img, const Mat3& H, int out_width,
                 int out_height) {
  check_size(out_width, out_height);
  if (img.empty()) throw Error(ErrorCode::kInvalidArgument, "empty input image");
  if (!(std::abs(H.determinant()) >= 1e-12)) {
    throw Error(ErrorCode::kSingularHomography, "warp homography is singular");
  }
  const Mat3 Hinv = H.inverse();
  const double max_x = img.width() - 1;
  const double max_y = img.height() - 1;
  RasterImage out(out_width, out_height);
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const Vec3 s = Hinv * Vec3(x, y, 1.0);
      if (std::abs(s.z()) < kHomogeneousEpsilon) continue;
      const double sx = s.x() / s.z();
      const double sy = s.y() / s.z();
      if (!(sx >= 0.0 && sx <= max_x && sy >= 0.0 && sy <= max_y)) continue;
      const int x0 = std::min(static_cast<int>(sx), img.width() - 1);
      const int y0 = std::min(static_cast<int>(sy), img.height() - 1);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const int y1 = std::min(y0 + 1, img.height() - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      const Rgb p00 = img.at(x0, y0), p10 = img.at(x1, y0);
      const Rgb p01 = img.at(x0, y1), p11 = img.at(x1, y1);
      Rgb v;
      for (int c = 0; c < 3; ++c) {
        const double top = p00[c] + fx * (p10[c] - p00[c]);
        const double bottom = p01[c] + fx * (p11[c] - p01[c]);
        v[c] = to_byte(top + fy * (bottom - top));
      }
      out.set(x, y, v);
    }
  }
  return out;
}

namespace {

FittedWarp fit_corners(const std::vector<Mat3>& Hs, int width, int height) {
  check_size(width, height);
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  for (const Mat3& H : Hs) {
    for (const Vec2& c : {Vec2(0, 0), Vec2(width - 1, 0),
                          Vec2(width - 1, height - 1), Vec2(0, height - 1)}) {
      const Vec2 p = transform_point(H, c);
      min_x = std::min(min_x, p.x());
      min_y = std::min(min_y, p.y());
      max_x = std::max(max_x, p.x());
      max_y = std::max(max_y, p.y());
    }
  }
  const double ox = std::floor(min_x);
  const double oy = std::floor(min_y);
  const double w = std::ceil(max_x) - ox + 1.0;
  const double h = std::ceil(max_y) - oy + 1.0;
  // Guard against absurd canvases from near-degenerate homographies.
  constexpr double kMaxSide = 32768.0;
  if (!(w <= kMaxSide && h <= kMaxSide)) {
    throw Error(ErrorCode::kInvalidArgument, "auto-fit canvas is too large");
  }
  Mat3 shift = Mat3::Identity();
  shift(0, 2) = -ox;
  shift(1, 2) = -oy;
  return FittedWarp{shift, static_cast<int>(w), static_cast<int>(h)};
}

}  // namespace

FittedWarp auto_fit_bounds(const Mat3& H, int width, int height) {
  FittedWarp fit = fit_corners({H}, width, height);
  fit.H = fit.H * H;
  return fit;
}

std::pair<FittedWarp, FittedWarp> auto_fit_pair(const Mat3& Hl, const Mat3& Hr,
                                                int width, int height) {
  const FittedWarp frame = fit_corners({Hl, Hr}, width, height);
  return {FittedWarp{frame.H * Hl, frame.width, frame.height},
          FittedWarp{frame.H * Hr, frame.width, frame.height}};
}

std::vector<int> scanline_rows(const CorrespondenceSet& matches, int k) {
  std::vector<int> rows;
  const std::size_t n = matches.pairs.size();
  if (k <= 0 || n == 0) return rows;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return matches.pairs[a].vl < matches.pairs[b].vl;
  });
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t pos =
        count == 1 ? n / 2
                   : static_cast<std::size_t>(std::llround(
                         static_cast<double>(i) * (n - 1) / (count - 1)));
    rows.push_back(static_cast<int>(std::lround(matches.pairs[order[pos]].vl)));
  }
  return rows;
}

RasterImage overlay_scanlines(const RasterImage& left, const RasterImage& right,
                              const CorrespondenceSet& matches, int k) {
  const int height = std::max(left.height(), right.height());
  RasterImage out(left.width() + right.width(), height);
  for (int y = 0; y < left.height(); ++y) {
    for (int x = 0; x < left.width(); ++x) out.set(x, y, left.at(x, y));
  }
  for (int y = 0; y < right.height(); ++y) {
    for (int x = 0; x < right.width(); ++x) {
      out.set(left.width() + x, y, right.at(x, y));
    }
  }
  const auto rows = scanline_rows(matches, k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int y = rows[i];
    if (y < 0 || y >= height) continue;
    const Rgb color = kLinePalette[i % std::size(kLinePalette)];
    for (int x = 0; x < out.width(); ++x) out.set(x, y, color);
  }
  return out;
}

void write_ppm(const std::filesystem::path& path, const RasterImage& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  f << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.data().data()),
          static_cast<std::streamsize>(img.data().size()));
  if (!f) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

RasterImage read_ppm(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  auto next_token = [&f]() {
    std::string tok;
    char c;
    while (f.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(f, skip);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) break;
      } else {
        tok.push_back(c);
      }
    }
    return tok;
  };
  if (next_token() != "P6") throw Error(ErrorCode::kParse, "not a binary PPM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token());
    h = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse, "malformed PPM header");
  }
  if (w < 1 || h < 1 || maxval != 255) {
    throw Error(ErrorCode::kParse, "unsupported PPM geometry or depth");
  }
  RasterImage img(w, h);
  f.read(reinterpret_cast<char*>(img.data().data()),
         static_cast<std::streamsize>(img.data().size()));
  if (f.gcount() != static_cast<std::streamsize>(img.data().size())) {
    throw Error(ErrorCode::kParse, "truncated PPM pixel data");
  }
  return img;
}

void write_png(const std::filesystem::path& path, const RasterImage& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.data().data(), 0,
                               nullptr)) {
    throw Error(ErrorCode::kIo, "failed writing PNG " + path.string() + ": " +
                                    image.message);
  }
}

RasterImage read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorCode::kIo, "cannot read PNG " + path.string() + ": " +
                                    image.message);
  }
  image.format = PNG_FORMAT_RGB;
  RasterImage img(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, img.data().data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorCode::kParse, "failed decoding PNG " + path.string());
  }
  return img;
}

RasterImage read_image(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".png" || ext == ".PNG") return read_png(path);
  if (ext == ".ppm" || ext == ".PPM") return read_ppm(path);
  throw Error(ErrorCode::kInvalidArgument, "unsupported image type " + ext);
}

void write_image(const std::filesystem::path& path, const RasterImage& img) {
  const auto ext = path.extension().string();
  if (ext == ".png" || ext == ".PNG") return write_png(path, img);
  if (ext == ".ppm" || ext == ".PPM") return write_ppm(path, img);
  throw Error(ErrorCode::kInvalidArgument, "unsupported image type " + ext);
}

}  // namespace stereorect
