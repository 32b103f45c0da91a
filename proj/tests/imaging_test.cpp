#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "fusebench/filters.hpp"
#include "fusebench/png_io.hpp"
#include "fusebench/pyramid.hpp"
#include "test_support.hpp"

namespace fusebench {
namespace {

using testing::random_plane;
using testing::temp_dir;

TEST(Plane, RejectsBadDimensions) {
  EXPECT_THROW(ImagePlane(0, 3), ContractError);
  EXPECT_THROW(ImagePlane(2, 2, std::vector<std::uint8_t>(3)), ContractError);
  EXPECT_THROW(RgbImage(1, 1, {1, 2}), ContractError);
}

TEST(Grayscale, Bt601Luma) {
  const RgbImage img(3, 1, {255, 255, 255, 255, 0, 0, 0, 0, 0});
  const auto g = to_grayscale(img);
  EXPECT_EQ(g(0, 0), 255);
  EXPECT_EQ(g(1, 0), 76);  // 0.299 * 255 = 76.245
  EXPECT_EQ(g(2, 0), 0);
}

TEST(Grayscale, IdempotentOnGray) {
  std::vector<std::uint8_t> rgb;
  for (int v = 0; v < 256; ++v) rgb.insert(rgb.end(), {std::uint8_t(v), std::uint8_t(v), std::uint8_t(v)});
  const auto g = to_grayscale(RgbImage(256, 1, rgb));
  for (int v = 0; v < 256; ++v) EXPECT_EQ(g(v, 0), v);
}

TEST(Png, RgbRoundTripAndByteEcho) {
  const auto dir = temp_dir("png_rgb");
  const RgbImage img(2, 1, {0, 0, 0, 255, 255, 255});
  save_png(dir / "a.png", img);
  const auto raster = load_png(dir / "a.png");
  ASSERT_TRUE(std::holds_alternative<RgbImage>(raster));
  EXPECT_EQ(std::get<RgbImage>(raster), img);
}

TEST(Png, GrayDecodesAsMask) {
  const auto dir = temp_dir("png_gray");
  save_png(dir / "m.png", ImagePlane(2, 1, {7, 9}));
  const auto raster = load_png(dir / "m.png");
  ASSERT_TRUE(std::holds_alternative<SegMask>(raster));
  EXPECT_EQ(std::get<SegMask>(raster).labels, (std::vector<std::uint8_t>{7, 9}));
  EXPECT_EQ(load_mask_png(dir / "m.png").labels, (std::vector<std::uint8_t>{7, 9}));
}

TEST(Png, RandomPlaneRoundTripIsBitExact) {
  const auto dir = temp_dir("png_random");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = random_plane(17 + static_cast<int>(seed), 9, seed);
    save_png(dir / "p.png", p);
    EXPECT_EQ(load_gray_png(dir / "p.png"), p);
  }
}

TEST(Png, RgbaAlphaIsDropped) {
  const auto dir = temp_dir("png_rgba");
  const auto path = dir / "rgba.png";
  {
    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    auto* png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    auto* info = png_create_info_struct(png);
    png_init_io(png, fp);
    png_set_IHDR(png, info, 1, 1, 8, PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_byte row[4] = {10, 20, 30, 40};
    png_write_row(png, row);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
  }
  EXPECT_EQ(std::get<RgbImage>(load_png(path)).data, (std::vector<std::uint8_t>{10, 20, 30}));
}

TEST(Png, SixteenBitIsRejected) {
  const auto dir = temp_dir("png16");
  const auto path = dir / "deep.png";
  {
    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    auto* png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    auto* info = png_create_info_struct(png);
    png_init_io(png, fp);
    png_set_IHDR(png, info, 1, 1, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_byte row[2] = {1, 2};
    png_write_row(png, row);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
  }
  try {
    (void)load_png(path);
    FAIL() << "expected an IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("bit depth"), std::string::npos);
  }
}

TEST(Png, MissingAndCorruptFiles) {
  const auto dir = temp_dir("png_bad");
  EXPECT_THROW((void)load_png(dir / "nope.png"), IoError);
  std::ofstream(dir / "junk.png") << "definitely not a png";
  EXPECT_THROW((void)load_png(dir / "junk.png"), IoError);
  std::ofstream(dir / "trunc.png", std::ios::binary) << "\x89PNG\r\n\x1a\n";
  EXPECT_THROW((void)load_png(dir / "trunc.png"), IoError);
}

void write_palette_png(const std::filesystem::path& path, int w, int h, int depth,
                       const std::vector<png_byte>& packed_rows) {
  std::FILE* fp = std::fopen(path.string().c_str(), "wb");
  auto* png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  auto* info = png_create_info_struct(png);
  png_init_io(png, fp);
  png_set_IHDR(png, info, w, h, depth, PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  std::vector<png_color> palette(1U << depth);
  for (std::size_t i = 0; i < palette.size(); ++i) palette[i] = {png_byte(i * 7), png_byte(i * 3), png_byte(i)};
  png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
  png_write_info(png, info);
  const std::size_t stride = packed_rows.size() / h;
  for (int y = 0; y < h; ++y) png_write_row(png, packed_rows.data() + y * stride);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

TEST(Png, PaletteMaskKeepsIndices) {
  const auto dir = temp_dir("png_palette");
  write_palette_png(dir / "p8.png", 3, 1, 8, {0, 1, 255});
  EXPECT_EQ(load_mask_png(dir / "p8.png").labels, (std::vector<std::uint8_t>{0, 1, 255}));
  // 2-bit packed: indices 0,1,2,3 in one byte, then 3,2 padded.
  write_palette_png(dir / "p2.png", 4, 2, 2, {0b00011011, 0b11100000});
  const auto m = load_mask_png(dir / "p2.png");
  EXPECT_EQ(m.labels, (std::vector<std::uint8_t>{0, 1, 2, 3, 3, 2, 0, 0}));
  EXPECT_TRUE(std::holds_alternative<SegMask>(load_png(dir / "p2.png")));
}

TEST(Png, RgbFileIsNotAMask) {
  const auto dir = temp_dir("png_rgb_mask");
  save_png(dir / "c.png", RgbImage(1, 1, {1, 2, 3}));
  EXPECT_THROW((void)load_mask_png(dir / "c.png"), IoError);
}

TEST(Gradient, ConstantPlaneHasNoGradient) {
  const auto g = gradient_maps(ImagePlane(5, 4, 77));
  for (double m : g.magnitude.data()) EXPECT_EQ(m, 0.0);
}

TEST(Gradient, VerticalStepHitsSobelWeightSum) {
  ImagePlane p(3, 3, 0);
  for (int y = 0; y < 3; ++y) {
    p(1, y) = 255;
    p(2, y) = 255;
  }
  const auto g = gradient_maps(p);
  // Column 0 sees 0 on the left (replicated) and 255 on the right.
  EXPECT_DOUBLE_EQ(g.gx(0, 1), 1020.0);
  EXPECT_DOUBLE_EQ(g.gy(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(g.magnitude(0, 1), 1020.0);
}

TEST(Gradient, TransposeSwapsComponents) {
  const auto p = random_plane(9, 7, 3);
  const auto g = gradient_maps(p);
  const auto gt = gradient_maps(transpose(p));
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) {
      EXPECT_DOUBLE_EQ(g.gx(x, y), gt.gy(y, x));
      EXPECT_DOUBLE_EQ(g.gy(x, y), gt.gx(y, x));
      EXPECT_GE(g.magnitude(x, y), 0.0);
      EXPECT_GT(g.orientation(x, y), -std::numbers::pi);
      EXPECT_LE(g.orientation(x, y), std::numbers::pi);
    }
  }
}

TEST(Gradient, TooSmall) { EXPECT_THROW((void)gradient_maps(ImagePlane(2, 5)), ContractError); }

TEST(Pyramid, DepthOneIsIdentity) {
  const auto p = random_plane(6, 5, 1);
  const auto pyr = laplacian_pyramid(p, 1);
  ASSERT_EQ(pyr.depth(), 1U);
  EXPECT_EQ(pyr.levels[0], to_float(p));
}

TEST(Pyramid, ConstantHasZeroBands) {
  const auto pyr = laplacian_pyramid(ImagePlane(8, 8, 100), 3);
  ASSERT_EQ(pyr.depth(), 3U);
  for (std::size_t l = 0; l + 1 < pyr.depth(); ++l) {
    for (double v : pyr.levels[l].data()) EXPECT_NEAR(v, 0.0, 1e-12);
  }
  for (double v : pyr.levels.back().data()) EXPECT_NEAR(v, 100.0, 1e-12);
}

TEST(Pyramid, LevelSizesUseCeilDivision) {
  const auto pyr = laplacian_pyramid(random_plane(17, 11, 2), 3);
  EXPECT_EQ(pyr.levels[1].width(), 9);
  EXPECT_EQ(pyr.levels[1].height(), 6);
  EXPECT_EQ(pyr.levels[2].width(), 5);
  EXPECT_EQ(pyr.levels[2].height(), 3);
}

TEST(Pyramid, CollapseInvertsDecomposition) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const int w = 8 + static_cast<int>(rng() % 40);
    const int h = 8 + static_cast<int>(rng() % 40);
    const auto p = random_plane(w, h, seed);
    const auto rec = collapse(laplacian_pyramid(p, 3));
    double err = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      err = std::max(err, std::abs(rec.data()[i] - p.data()[i]));
    }
    EXPECT_LT(err, 1e-6) << "seed " << seed;
  }
}

TEST(Pyramid, ExcessiveDepth) {
  EXPECT_THROW((void)laplacian_pyramid(ImagePlane(8, 8), 4), ContractError);
  EXPECT_NO_THROW((void)laplacian_pyramid(ImagePlane(8, 8), 3));
  EXPECT_THROW((void)laplacian_pyramid(ImagePlane(8, 8), 0), ContractError);
}

}  // namespace
}  // namespace fusebench
