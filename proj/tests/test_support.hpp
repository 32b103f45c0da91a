#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "fusebench/plane.hpp"

namespace fusebench::testing {

inline ImagePlane random_plane(int w, int h, std::uint64_t seed, int lo = 0, int hi = 255) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(lo, hi);
  ImagePlane p(w, h);
  for (auto& v : p.data()) v = static_cast<std::uint8_t>(dist(rng));
  return p;
}

/// Smooth shading plus a few flat-filled shapes and mild texture: an image
/// with real edges and large regions, unlike white noise.
inline ImagePlane scene_plane(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FloatPlane p(w, h);
  const double gx = 40.0 + 80.0 * u(rng);
  const double gy = 40.0 * u(rng);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) p(x, y) = 60.0 + gx * x / w + gy * y / h;
  }
  for (int s = 0; s < 5; ++s) {
    const double cx = u(rng) * w, cy = u(rng) * h;
    const double r = (0.1 + 0.2 * u(rng)) * std::min(w, h);
    const double level = 255.0 * u(rng);
    const bool disc = u(rng) < 0.5;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dx = x - cx, dy = y - cy;
        const bool inside = disc ? dx * dx + dy * dy < r * r
                                 : std::abs(dx) < r && std::abs(dy) < 0.6 * r;
        if (inside) p(x, y) = level;
      }
    }
  }
  std::normal_distribution<double> texture(0.0, 3.0);
  for (auto& v : p.data()) v += texture(rng);
  return to_u8(p);
}

/// `base` plus zero-mean uniform noise in [-amplitude, amplitude], saturated.
inline ImagePlane add_noise(const ImagePlane& base, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  ImagePlane out(base.width(), base.height());
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = saturate_u8(base.data()[i] + u(rng));
  return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fusebench_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fusebench::testing
