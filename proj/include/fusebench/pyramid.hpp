#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "fusebench/plane.hpp"

namespace fusebench {

/// Ordered pyramid levels; level 0 has source dimensions and each further
/// level is ceil(prev/2) in both directions.
struct PyramidLevels {
  std::vector<FloatPlane> levels;

  [[nodiscard]] std::size_t depth() const noexcept { return levels.size(); }
};

namespace detail {

inline constexpr std::array<double, 5> kBurtTaps = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16,
                                                    1.0 / 16};

inline int half_up(int n) { return (n + 1) / 2; }

}  // namespace detail

/// Blur with the 5-tap binomial kernel and keep even samples.
[[nodiscard]] inline FloatPlane pyr_reduce(const FloatPlane& src) {
  const int w = src.width();
  const int h = src.height();
  const int ow = detail::half_up(w);
  const int oh = detail::half_up(h);
  FloatPlane rows(ow, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += detail::kBurtTaps[k + 2] * src.clamped(2 * x + k, y);
      rows(x, y) = acc;
    }
  }
  FloatPlane out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += detail::kBurtTaps[k + 2] * rows.clamped(x, 2 * y + k);
      out(x, y) = acc;
    }
  }
  return out;
}

/// Upsample to `width` x `height` by zero insertion and interpolation with
/// twice the binomial kernel per axis. Constants are preserved exactly.
[[nodiscard]] inline FloatPlane pyr_expand(const FloatPlane& src, int width, int height) {
  auto interp = [](auto sample, int i, int n_in) {
    double acc = 0.0;
    for (int k = -2; k <= 2; ++k) {
      const int j = i - k;
      if (j % 2 != 0) continue;
      acc += 2.0 * detail::kBurtTaps[k + 2] * sample(std::clamp(j / 2, 0, n_in - 1));
    }
    return acc;
  };
  FloatPlane rows(width, src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < width; ++x) {
      rows(x, y) = interp([&](int j) { return src(j, y); }, x, src.width());
    }
  }
  FloatPlane out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out(x, y) = interp([&](int j) { return rows(x, j); }, y, src.height());
    }
  }
  return out;
}

/// Gaussian pyramid; `depth` levels including the source.
[[nodiscard]] inline PyramidLevels gaussian_pyramid(const FloatPlane& p, int depth) {
  if (depth < 1) throw ContractError("pyramid depth must be >= 1");
  const int min_side = std::min(p.width(), p.height());
  if (depth > 1 && (min_side >> (depth - 1)) < 2) {
    throw ContractError("pyramid depth " + std::to_string(depth) + " too large for " +
                        std::to_string(p.width()) + "x" + std::to_string(p.height()));
  }
  PyramidLevels pyr;
  pyr.levels.push_back(p);
  for (int i = 1; i < depth; ++i) pyr.levels.push_back(pyr_reduce(pyr.levels.back()));
  return pyr;
}

/// Band-pass levels 0..depth-2 plus the low-pass residual as the last level.
template <class T>
[[nodiscard]] PyramidLevels laplacian_pyramid(const Plane<T>& p, int depth) {
  auto pyr = gaussian_pyramid(to_float(p), depth);
  for (std::size_t i = 0; i + 1 < pyr.levels.size(); ++i) {
    auto& fine = pyr.levels[i];
    const auto up = pyr_expand(pyr.levels[i + 1], fine.width(), fine.height());
    for (std::size_t k = 0; k < fine.size(); ++k) fine.data()[k] -= up.data()[k];
  }
  return pyr;
}

[[nodiscard]] inline FloatPlane collapse(const PyramidLevels& pyr) {
  if (pyr.levels.empty()) throw ContractError("collapse: empty pyramid");
  FloatPlane acc = pyr.levels.back();
  for (auto i = static_cast<std::ptrdiff_t>(pyr.levels.size()) - 2; i >= 0; --i) {
    const auto& band = pyr.levels[i];
    acc = pyr_expand(acc, band.width(), band.height());
    for (std::size_t k = 0; k < band.size(); ++k) acc.data()[k] += band.data()[k];
  }
  return acc;
}

}  // namespace fusebench
