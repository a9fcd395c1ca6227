#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "stereorect/error.h"
#include "stereorect/imaging.h"
#include "stereorect/synthgen.h"

namespace stereorect {
namespace {

namespace fs = std::filesystem;

RasterImage smooth_image(int w, int h) {
  RasterImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.set(x, y,
              {static_cast<std::uint8_t>(127.5 + 100 * std::sin(x * 0.05)),
               static_cast<std::uint8_t>(127.5 + 100 * std::cos(y * 0.07)),
               static_cast<std::uint8_t>(127.5 + 80 * std::sin((x + y) * 0.03))});
    }
  }
  return img;
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("stereorect_imaging_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Imaging, IdentityWarpCopies) {
  const RasterImage img = smooth_image(64, 48);
  EXPECT_EQ(warp(img, Mat3::Identity(), 64, 48), img);
}

TEST(Imaging, TranslationShiftsContent) {
  const RasterImage img = smooth_image(64, 48);
  Mat3 H = Mat3::Identity();
  H(0, 2) = 10.0;
  const RasterImage out = warp(img, H, 64, 48);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 10; ++x) EXPECT_EQ(out.at(x, y), (Rgb{0, 0, 0}));
    for (int x = 10; x < 64; ++x) ASSERT_EQ(out.at(x, y), img.at(x - 10, y));
  }
}

TEST(Imaging, BilinearHalfPixel) {
  RasterImage img(2, 1);
  img.set(0, 0, {0, 100, 200});
  img.set(1, 0, {100, 200, 0});
  Mat3 H = Mat3::Identity();
  H(0, 2) = -0.5;
  const RasterImage out = warp(img, H, 2, 1);
  EXPECT_EQ(out.at(0, 0), (Rgb{50, 150, 100}));
  EXPECT_EQ(out.at(1, 0), (Rgb{0, 0, 0}));
}

TEST(Imaging, RoundTripInteriorError) {
  const int w = 160, h = 120;
  const RasterImage img = smooth_image(w, h);
  Mat3 H;
  H << 1.05, 0.04, 3.0, -0.03, 0.97, -2.0, 1e-5, -2e-5, 1.0;
  const FittedWarp fit = auto_fit_bounds(H, w, h);
  const RasterImage mid = warp(img, fit.H, fit.width, fit.height);
  const RasterImage back = warp(mid, fit.H.inverse(), w, h);
  double sum = 0.0;
  int count = 0;
  for (int y = 3; y < h - 3; ++y) {
    for (int x = 3; x < w - 3; ++x) {
      for (int c = 0; c < 3; ++c) sum += std::abs(back.at(x, y)[c] - img.at(x, y)[c]);
      count += 3;
    }
  }
  EXPECT_LT(sum / count / 255.0, 2.0 / 255.0);
}

TEST(Imaging, WarpIsDeterministic) {
  const RasterImage img = smooth_image(50, 40);
  Mat3 H;
  H << 0.9, 0.1, 4.0, -0.1, 1.1, 2.0, 1e-4, 0.0, 1.0;
  EXPECT_EQ(warp(img, H, 60, 50), warp(img, H, 60, 50));
}

TEST(Imaging, SingularHomographyThrows) {
  const RasterImage img = smooth_image(10, 10);
  Mat3 H = Mat3::Zero();
  H(0, 0) = 1.0;
  try {
    warp(img, H, 10, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularHomography);
  }
  EXPECT_THROW(warp(img, Mat3::Identity(), 0, 10), Error);
}

TEST(Imaging, AutoFitContainsCorners) {
  Mat3 H;
  H << 0.8, 0.3, -50.0, -0.2, 1.1, 40.0, 2e-4, 1e-4, 1.0;
  const int w = 640, h = 480;
  const FittedWarp fit = auto_fit_bounds(H, w, h);
  for (const Vec2& c : {Vec2(0, 0), Vec2(w - 1, 0), Vec2(w - 1, h - 1), Vec2(0, h - 1)}) {
    const Vec2 p = transform_point(fit.H, c);
    EXPECT_GE(p.x(), 0.0);
    EXPECT_GE(p.y(), 0.0);
    EXPECT_LE(p.x(), fit.width - 1.0);
    EXPECT_LE(p.y(), fit.height - 1.0);
  }
  EXPECT_EQ(auto_fit_bounds(Mat3::Identity(), w, h).width, w);
  EXPECT_EQ(auto_fit_bounds(Mat3::Identity(), w, h).height, h);
}

TEST(Imaging, AutoFitPairSharesRowShift) {
  Mat3 Hl = Mat3::Identity(), Hr = Mat3::Identity();
  Hl(1, 2) = -20.0;
  Hr(1, 2) = 15.0;
  const auto [l, r] = auto_fit_pair(Hl, Hr, 100, 80);
  EXPECT_EQ(l.width, r.width);
  EXPECT_EQ(l.height, r.height);
  EXPECT_EQ(l.height, 80 + 35);
  const Vec2 p(30, 40);
  EXPECT_NEAR(transform_point(l.H, p).y() - transform_point(r.H, p).y(), -35.0, 1e-12);
}

TEST(Imaging, OverlayDrawsRequestedLines) {
  CorrespondenceSet m;
  m.dims = {40, 100};
  for (int i = 0; i < 50; ++i) m.pairs.push_back({5.0, 2.0 * i, 7.0, 2.0 * i});
  const RasterImage left(40, 100, {10, 10, 10}), right(30, 100, {20, 20, 20});
  const RasterImage plain = overlay_scanlines(left, right, m, 0);
  EXPECT_EQ(plain.width(), 70);
  EXPECT_EQ(plain.at(0, 0), (Rgb{10, 10, 10}));
  EXPECT_EQ(plain.at(45, 0), (Rgb{20, 20, 20}));
  const RasterImage lines = overlay_scanlines(left, right, m, 10);
  int drawn = 0;
  for (int y = 0; y < 100; ++y) {
    const bool full = lines.at(0, y) != left.at(0, y) && lines.at(69, y) != right.at(29, y);
    drawn += full;
  }
  EXPECT_EQ(drawn, 10);
  const auto rows = scanline_rows(m, 10);
  EXPECT_EQ(rows.front(), 0);
  EXPECT_EQ(rows.back(), 98);
}

TEST(Imaging, RectifiedLinesPassThroughMatches) {
  const SyntheticPair s = generate(RigConfig{});
  const auto rows = scanline_rows(s.matches, 10);
  ASSERT_EQ(rows.size(), 10u);
  for (int row : rows) {
    bool hit = false;
    for (const auto& p : s.matches.pairs) {
      hit = hit || (std::lround(p.vl) == row && std::abs(p.vl - p.vr) < 1e-9);
    }
    EXPECT_TRUE(hit) << row;
  }
}

TEST(Imaging, PpmAndPngRoundTrip) {
  const fs::path dir = temp_dir("io");
  const RasterImage img = smooth_image(33, 17);
  write_image(dir / "a.ppm", img);
  write_image(dir / "a.png", img);
  EXPECT_EQ(read_image(dir / "a.ppm"), img);
  EXPECT_EQ(read_image(dir / "a.png"), img);
  EXPECT_THROW(write_image(dir / "a.bmp", img), Error);
  EXPECT_THROW(read_image(dir / "missing.png"), Error);
  {
    std::ofstream f(dir / "bad.ppm");
    f << "P3\n1 1\n255\n0 0 0\n";
  }
  EXPECT_THROW(read_image(dir / "bad.ppm"), Error);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace stereorect
