#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "fusebench/filters.hpp"
#include "fusebench/metrics/metric_id.hpp"

namespace fusebench {

namespace detail {

inline constexpr int kBins = 256;

inline int intensity_bin(double v) noexcept {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<int>(std::lround(v));
}

inline std::vector<int> quantize(const FloatPlane& p) {
  std::vector<int> q(p.size());
  std::ranges::transform(p.data(), q.begin(), intensity_bin);
  return q;
}

inline double entropy_of_counts(std::span<const double> counts, double total) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

inline double symbol_entropy(const std::vector<int>& symbols) {
  std::array<double, kBins> hist{};
  for (int s : symbols) hist[s] += 1.0;
  return entropy_of_counts(hist, static_cast<double>(symbols.size()));
}

/// Mutual information in bits between two aligned symbol streams over 256 symbols.
inline double symbol_mutual_information(const std::vector<int>& u, const std::vector<int>& v) {
  std::vector<double> joint(kBins * kBins, 0.0);
  std::array<double, kBins> hu{};
  std::array<double, kBins> hv{};
  for (std::size_t i = 0; i < u.size(); ++i) {
    joint[u[i] * kBins + v[i]] += 1.0;
    hu[u[i]] += 1.0;
    hv[v[i]] += 1.0;
  }
  const double n = static_cast<double>(u.size());
  double mi = 0.0;
  for (int i = 0; i < kBins; ++i) {
    if (hu[i] == 0.0) continue;
    for (int j = 0; j < kBins; ++j) {
      const double c = joint[i * kBins + j];
      if (c > 0.0) mi += (c / n) * std::log2(c * n / (hu[i] * hv[j]));
    }
  }
  return std::max(mi, 0.0);
}

/// Gradient magnitude min-max normalised to [0,1] and quantised to 256 levels.
inline std::vector<int> gradient_feature(const FloatPlane& p) {
  const auto g = gradient_maps(p).magnitude;
  const auto [lo, hi] = std::ranges::minmax(g.data());
  std::vector<int> q(g.size(), 0);
  if (hi > lo) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i] = static_cast<int>(std::lround((g.data()[i] - lo) / (hi - lo) * 255.0));
    }
  }
  return q;
}

inline double normalized_mi(const std::vector<int>& u, const std::vector<int>& v) {
  const double denom = symbol_entropy(u) + symbol_entropy(v);
  // Both feature maps single-valued: nothing to disagree on.
  if (denom == 0.0) return 1.0;
  return std::clamp(2.0 * symbol_mutual_information(u, v) / denom, 0.0, 1.0);
}

inline double mean_squared_error(const FloatPlane& x, const FloatPlane& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x.data()[i] - y.data()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(x.size());
}

inline constexpr double kPsnrCapDb = 100.0;

inline double psnr_from_mse(double mse) {
  constexpr double peak_sq = 255.0 * 255.0;
  if (mse < peak_sq * 1e-10) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(peak_sq / mse));
}

}  // namespace detail

/// EN: Shannon entropy (bits) of the 256-bin intensity histogram.
[[nodiscard]] inline MetricResult entropy(const FloatPlane& f) {
  detail::require_metric_plane(f, "EN", 1);
  return {MetricId::EN, detail::symbol_entropy(detail::quantize(f)), {}, {}};
}

/// MI: MI(F,A) + MI(F,B) from 256x256 joint histograms.
[[nodiscard]] inline MetricResult mutual_information(const FloatPlane& f, const FloatPlane& a,
                                                     const FloatPlane& b) {
  detail::require_triple(f, a, b, "MI", 1);
  const auto qf = detail::quantize(f);
  const double fa = detail::symbol_mutual_information(qf, detail::quantize(a));
  const double fb = detail::symbol_mutual_information(qf, detail::quantize(b));
  return {MetricId::MI, fa + fb, fa, fb};
}

/// FMI: mean normalised MI between Sobel-magnitude feature maps.
[[nodiscard]] inline MetricResult feature_mutual_information(const FloatPlane& f,
                                                             const FloatPlane& a,
                                                             const FloatPlane& b) {
  detail::require_triple(f, a, b, "FMI", detail::kMinMetricSide);
  const auto ff = detail::gradient_feature(f);
  const double fa = detail::normalized_mi(ff, detail::gradient_feature(a));
  const double fb = detail::normalized_mi(ff, detail::gradient_feature(b));
  return {MetricId::FMI, 0.5 * (fa + fb), fa, fb};
}

/// PSNR over the mean of the two source MSEs, capped at 100 dB.
[[nodiscard]] inline MetricResult psnr(const FloatPlane& f, const FloatPlane& a,
                                       const FloatPlane& b) {
  detail::require_triple(f, a, b, "PSNR", 1);
  const double mse_a = detail::mean_squared_error(f, a);
  const double mse_b = detail::mean_squared_error(f, b);
  return {MetricId::PSNR, detail::psnr_from_mse(0.5 * (mse_a + mse_b)),
          detail::psnr_from_mse(mse_a), detail::psnr_from_mse(mse_b)};
}

}  // namespace fusebench
