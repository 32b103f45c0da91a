#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fusebench/error.hpp"

namespace fusebench {

/// Row-major single-channel raster. Width and height are positive for any
/// non-default-constructed plane.
template <class T>
class Plane {
 public:
  using value_type = T;

  Plane() = default;

  Plane(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  Plane(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height) {
      throw ContractError("plane data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
  }

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

  /// Replicate-padded access: coordinates are clamped to the raster.
  [[nodiscard]] const T& clamped(int x, int y) const noexcept {
    return (*this)(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
  }

  [[nodiscard]] std::span<T> data() noexcept { return data_; }
  [[nodiscard]] std::span<const T> data() const noexcept { return data_; }

  [[nodiscard]] bool same_shape(const auto& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
      throw ContractError("plane dimensions must be positive, got " + std::to_string(width) +
                          "x" + std::to_string(height));
    }
  }

  [[nodiscard]] std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ImagePlane = Plane<std::uint8_t>;
using FloatPlane = Plane<double>;

/// Interleaved 8-bit RGB raster.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // R,G,B per pixel

  RgbImage() = default;
  RgbImage(int w, int h, std::vector<std::uint8_t> rgb) : width(w), height(h), data(std::move(rgb)) {
    if (w <= 0 || h <= 0 || data.size() != static_cast<std::size_t>(w) * h * 3) {
      throw ContractError("RGB data length does not match 3*width*height");
    }
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Class-label raster; 255 marks ignored pixels.
struct SegMask {
  static constexpr std::uint8_t kIgnore = 255;

  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;

  SegMask() = default;
  SegMask(int w, int h, std::vector<std::uint8_t> l) : width(w), height(h), labels(std::move(l)) {
    if (w <= 0 || h <= 0 || labels.size() != static_cast<std::size_t>(w) * h) {
      throw ContractError("mask label count does not match width*height");
    }
  }
  SegMask(int w, int h, std::uint8_t fill)
      : SegMask(w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(w, 0)) *
                                                    std::max(h, 0),
                                                fill)) {}

  std::uint8_t& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
  [[nodiscard]] std::uint8_t at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }

  friend bool operator==(const SegMask&, const SegMask&) = default;
};

inline void require_same_shape(const auto& a, const auto& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ContractError(std::string(what) + ": dimension mismatch " + std::to_string(a.width()) +
                        "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                        "x" + std::to_string(b.height()));
  }
}

template <class T>
[[nodiscard]] FloatPlane to_float(const Plane<T>& p) {
  std::vector<double> out(p.data().begin(), p.data().end());
  return {p.width(), p.height(), std::move(out)};
}

/// Rounds half away from zero and clamps to [0,255].
[[nodiscard]] inline std::uint8_t saturate_u8(double v) noexcept {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::round(v));
}

[[nodiscard]] inline ImagePlane to_u8(const FloatPlane& p) {
  std::vector<std::uint8_t> out(p.size());
  std::ranges::transform(p.data(), out.begin(), saturate_u8);
  return {p.width(), p.height(), std::move(out)};
}

/// BT.601 luma, rounded and clamped.
[[nodiscard]] inline ImagePlane to_grayscale(const RgbImage& img) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(img.width) * img.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double luma = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] +
                        0.114 * img.data[3 * i + 2];
    out[i] = saturate_u8(luma);
  }
  return {img.width, img.height, std::move(out)};
}

[[nodiscard]] inline RgbImage to_rgb(const ImagePlane& p) {
  std::vector<std::uint8_t> out(p.size() * 3);
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[3 * i] = out[3 * i + 1] = out[3 * i + 2] = p.data()[i];
  }
  return {p.width(), p.height(), std::move(out)};
}

template <class T>
[[nodiscard]] Plane<T> transpose(const Plane<T>& p) {
  Plane<T> out(p.height(), p.width());
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) out(y, x) = p(x, y);
  }
  return out;
}

}  // namespace fusebench
