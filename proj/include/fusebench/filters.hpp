#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "fusebench/plane.hpp"

namespace fusebench {

/// Normalised 1-D Gaussian taps spanning [-radius, radius].
[[nodiscard]] inline std::vector<double> gaussian_kernel(double sigma, int radius) {
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

/// Correlates rows with `kx` then columns with `ky`; both kernels have odd
/// length and are centred. Borders use replicate padding.
[[nodiscard]] inline FloatPlane separable_filter(const FloatPlane& src, std::span<const double> kx,
                                                 std::span<const double> ky) {
  const int w = src.width();
  const int h = src.height();
  const int rx = static_cast<int>(kx.size() / 2);
  const int ry = static_cast<int>(ky.size() / 2);
  FloatPlane tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -rx; i <= rx; ++i) acc += kx[i + rx] * src.clamped(x + i, y);
      tmp(x, y) = acc;
    }
  }
  FloatPlane out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = -ry; j <= ry; ++j) acc += ky[j + ry] * tmp.clamped(x, y + j);
      out(x, y) = acc;
    }
  }
  return out;
}

[[nodiscard]] inline FloatPlane gaussian_blur(const FloatPlane& src, double sigma, int radius) {
  const auto k = gaussian_kernel(sigma, radius);
  return separable_filter(src, k, k);
}

template <class F>
[[nodiscard]] FloatPlane elementwise(const FloatPlane& a, const FloatPlane& b, F op) {
  FloatPlane out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = op(a.data()[i], b.data()[i]);
  return out;
}

struct GradientMaps {
  FloatPlane gx;
  FloatPlane gy;
  FloatPlane magnitude;
  FloatPlane orientation;  // atan2(gy, gx), in (-pi, pi]
};

/// 3x3 Sobel responses with replicate padding. gx grows to the right, gy downwards.
template <class T>
[[nodiscard]] GradientMaps gradient_maps(const Plane<T>& p) {
  if (p.width() < 3 || p.height() < 3) {
    throw ContractError("gradient_maps: plane must be at least 3x3");
  }
  const int w = p.width();
  const int h = p.height();
  GradientMaps g{FloatPlane(w, h), FloatPlane(w, h), FloatPlane(w, h), FloatPlane(w, h)};
  auto at = [&p](int x, int y) { return static_cast<double>(p.clamped(x, y)); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
      const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
      g.gx(x, y) = gx;
      g.gy(x, y) = gy;
      g.magnitude(x, y) = std::sqrt(gx * gx + gy * gy);
      double theta = std::atan2(gy, gx);
      if (theta == -std::numbers::pi) theta = std::numbers::pi;
      g.orientation(x, y) = theta;
    }
  }
  return g;
}

/// Summed-area table with a zero guard row/column: entry (x,y) holds the sum
/// over [0,x) x [0,y).
class IntegralImage {
 public:
  explicit IntegralImage(const FloatPlane& p)
      : width_(p.width() + 1), table_(static_cast<std::size_t>(p.width() + 1) * (p.height() + 1)) {
    for (int y = 0; y < p.height(); ++y) {
      double row = 0.0;
      for (int x = 0; x < p.width(); ++x) {
        row += p(x, y);
        at(x + 1, y + 1) = at(x + 1, y) + row;
      }
    }
  }

  /// Sum over the box [x0, x1) x [y0, y1).
  [[nodiscard]] double box(int x0, int y0, int x1, int y1) const noexcept {
    return at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
  }

 private:
  double& at(int x, int y) noexcept { return table_[static_cast<std::size_t>(y) * width_ + x]; }
  [[nodiscard]] double at(int x, int y) const noexcept {
    return table_[static_cast<std::size_t>(y) * width_ + x];
  }

  int width_;
  std::vector<double> table_;
};

}  // namespace fusebench
