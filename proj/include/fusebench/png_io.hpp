#pragma once

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "fusebench/error.hpp"
#include "fusebench/plane.hpp"

namespace fusebench {

namespace detail {

struct PngContext {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* file = nullptr;
  char message[256] = {};
};

struct PngHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  int channels = 0;  // after the transforms applied by read_header
};

inline void png_error_handler(png_structp png, png_const_charp msg) {
  auto* ctx = static_cast<PngContext*>(png_get_error_ptr(png));
  std::snprintf(ctx->message, sizeof ctx->message, "%s", msg);
  png_longjmp(png, 1);
}

inline void png_warning_handler(png_structp, png_const_charp) {}

// The two functions below contain setjmp; they hold only trivially
// destructible locals so a longjmp back into them is well defined.
inline bool png_read_header(PngContext& ctx, PngHeader& hdr, bool keep_indices) {
  if (setjmp(png_jmpbuf(ctx.png))) return false;
  png_init_io(ctx.png, ctx.file);
  png_set_sig_bytes(ctx.png, 8);
  png_read_info(ctx.png, ctx.info);
  hdr.width = png_get_image_width(ctx.png, ctx.info);
  hdr.height = png_get_image_height(ctx.png, ctx.info);
  hdr.bit_depth = png_get_bit_depth(ctx.png, ctx.info);
  hdr.color_type = png_get_color_type(ctx.png, ctx.info);
  if (hdr.bit_depth > 8) return true;  // rejected by the caller

  const int ct = hdr.color_type;
  if (ct == PNG_COLOR_TYPE_PALETTE) {
    if (keep_indices) {
      png_set_packing(ctx.png);
    } else {
      png_set_palette_to_rgb(ctx.png);
    }
  } else if ((ct == PNG_COLOR_TYPE_GRAY || ct == PNG_COLOR_TYPE_GRAY_ALPHA) && hdr.bit_depth < 8) {
    if (keep_indices) {
      png_set_packing(ctx.png);
    } else {
      png_set_expand_gray_1_2_4_to_8(ctx.png);
    }
  }
  if (ct & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(ctx.png);
  png_read_update_info(ctx.png, ctx.info);
  hdr.channels = png_get_channels(ctx.png, ctx.info);
  return true;
}

inline bool png_read_rows(PngContext& ctx, png_bytepp rows) {
  if (setjmp(png_jmpbuf(ctx.png))) return false;
  png_read_image(ctx.png, rows);
  png_read_end(ctx.png, nullptr);
  return true;
}

struct RawPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  bool indexed = false;  // gray or palette source
  std::vector<std::uint8_t> samples;
};

inline RawPng read_png(const std::filesystem::path& path, bool keep_indices) {
  PngContext ctx;
  ctx.file = std::fopen(path.string().c_str(), "rb");
  if (ctx.file == nullptr) throw IoError("cannot open PNG '" + path.string() + "'");

  auto close_all = [&ctx] {
    if (ctx.png != nullptr) png_destroy_read_struct(&ctx.png, &ctx.info, nullptr);
    if (ctx.file != nullptr) std::fclose(ctx.file);
    ctx.png = nullptr;
    ctx.info = nullptr;
    ctx.file = nullptr;
  };
  auto fail = [&](const std::string& why) {
    close_all();
    throw IoError("PNG '" + path.string() + "': " + why);
  };

  png_byte sig[8];
  if (std::fread(sig, 1, 8, ctx.file) != 8 || png_sig_cmp(sig, 0, 8) != 0) fail("not a PNG file");

  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &ctx, png_error_handler,
                                   png_warning_handler);
  if (ctx.png == nullptr) fail("libpng initialisation failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (ctx.info == nullptr) fail("libpng initialisation failed");

  PngHeader hdr;
  if (!png_read_header(ctx, hdr, keep_indices)) fail(ctx.message);
  if (hdr.bit_depth > 8) {
    fail("unsupported bit depth " + std::to_string(hdr.bit_depth) + " (8-bit required)");
  }
  if (hdr.width == 0 || hdr.height == 0 ||
      hdr.width > static_cast<png_uint_32>(std::numeric_limits<int>::max()) ||
      hdr.height > static_cast<png_uint_32>(std::numeric_limits<int>::max()) ||
      static_cast<unsigned long long>(hdr.width) * hdr.height * hdr.channels >
          (1ULL << 32)) {
    fail("dimension overflow");
  }

  RawPng raw;
  raw.width = static_cast<int>(hdr.width);
  raw.height = static_cast<int>(hdr.height);
  raw.channels = hdr.channels;
  raw.indexed = hdr.color_type == PNG_COLOR_TYPE_GRAY ||
                hdr.color_type == PNG_COLOR_TYPE_GRAY_ALPHA ||
                hdr.color_type == PNG_COLOR_TYPE_PALETTE;
  raw.samples.resize(static_cast<std::size_t>(raw.width) * raw.height * raw.channels);
  std::vector<png_bytep> rows(raw.height);
  for (int y = 0; y < raw.height; ++y) {
    rows[y] = raw.samples.data() + static_cast<std::size_t>(y) * raw.width * raw.channels;
  }
  if (!png_read_rows(ctx, rows.data())) fail(ctx.message);
  close_all();
  return raw;
}

inline bool png_write_all(PngContext& ctx, int width, int height, int color_type,
                          png_bytepp rows) {
  if (setjmp(png_jmpbuf(ctx.png))) return false;
  png_init_io(ctx.png, ctx.file);
  png_set_IHDR(ctx.png, ctx.info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  png_write_image(ctx.png, rows);
  png_write_end(ctx.png, nullptr);
  return true;
}

inline void write_png(const std::filesystem::path& path, int width, int height, int channels,
                      const std::uint8_t* samples) {
  PngContext ctx;
  ctx.file = std::fopen(path.string().c_str(), "wb");
  if (ctx.file == nullptr) throw IoError("cannot write PNG '" + path.string() + "'");
  ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &ctx, png_error_handler,
                                    png_warning_handler);
  ctx.info = ctx.png != nullptr ? png_create_info_struct(ctx.png) : nullptr;

  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(samples) + static_cast<std::size_t>(y) * width * channels;
  }
  const bool ok = ctx.info != nullptr &&
                  png_write_all(ctx, width, height,
                                channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                                rows.data());
  if (ctx.png != nullptr) png_destroy_write_struct(&ctx.png, &ctx.info);
  std::fclose(ctx.file);
  if (!ok) throw IoError("PNG '" + path.string() + "': " + ctx.message);
}

}  // namespace detail

/// RGB/RGBA files decode to RgbImage (alpha dropped); gray and palette files
/// decode to SegMask with the stored sample or index as the label.
using PngRaster = std::variant<RgbImage, SegMask>;

[[nodiscard]] inline PngRaster load_png(const std::filesystem::path& path) {
  auto raw = detail::read_png(path, /*keep_indices=*/true);
  if (raw.indexed) return SegMask(raw.width, raw.height, std::move(raw.samples));
  return RgbImage(raw.width, raw.height, std::move(raw.samples));
}

/// Any 8-bit PNG as RGB; gray samples are replicated, palettes expanded.
[[nodiscard]] inline RgbImage load_rgb_png(const std::filesystem::path& path) {
  auto raw = detail::read_png(path, /*keep_indices=*/false);
  if (raw.channels == 3) return {raw.width, raw.height, std::move(raw.samples)};
  return to_rgb(ImagePlane(raw.width, raw.height, std::move(raw.samples)));
}

/// Any 8-bit PNG as a luma plane.
[[nodiscard]] inline ImagePlane load_gray_png(const std::filesystem::path& path) {
  auto raw = detail::read_png(path, /*keep_indices=*/false);
  if (raw.channels == 1) return {raw.width, raw.height, std::move(raw.samples)};
  return to_grayscale(RgbImage(raw.width, raw.height, std::move(raw.samples)));
}

/// Single-channel (gray or palette-indexed) PNG as a label mask.
[[nodiscard]] inline SegMask load_mask_png(const std::filesystem::path& path) {
  auto raw = detail::read_png(path, /*keep_indices=*/true);
  if (!raw.indexed) {
    throw IoError("PNG '" + path.string() + "': masks must be single-channel, got RGB");
  }
  return {raw.width, raw.height, std::move(raw.samples)};
}

inline void save_png(const std::filesystem::path& path, const ImagePlane& p) {
  detail::write_png(path, p.width(), p.height(), 1, p.data().data());
}

inline void save_png(const std::filesystem::path& path, const RgbImage& img) {
  detail::write_png(path, img.width, img.height, 3, img.data.data());
}

inline void save_png(const std::filesystem::path& path, const SegMask& m) {
  detail::write_png(path, m.width, m.height, 1, m.labels.data());
}

}  // namespace fusebench
