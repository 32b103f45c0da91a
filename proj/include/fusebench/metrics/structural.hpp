#pragma once

#include <algorithm>
#include <cmath>

#include "fusebench/filters.hpp"
#include "fusebench/metrics/metric_id.hpp"

namespace fusebench {

/// Stabilising constants for an 8-bit dynamic range.
struct SsimConstants {
  double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  double c2 = (0.03 * 255.0) * (0.03 * 255.0);
};

namespace detail {

inline double ssim_formula(double mu_x, double mu_y, double var_x, double var_y, double cov,
                           const SsimConstants& k) noexcept {
  return ((2.0 * mu_x * mu_y + k.c1) * (2.0 * cov + k.c2)) /
         ((mu_x * mu_x + mu_y * mu_y + k.c1) * (var_x + var_y + k.c2));
}

/// Pearson correlation; 0 when either operand has zero variance.
inline double pearson(const FloatPlane& x, const FloatPlane& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x.data()[i];
    my += y.data()[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x.data()[i] - mx;
    const double dy = y.data()[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace detail

/// Mean SSIM map of two planes, 11x11 Gaussian window with sigma 1.5,
/// replicate-padded so the map covers every pixel.
[[nodiscard]] inline double ssim_index(const FloatPlane& x, const FloatPlane& y,
                                       const SsimConstants& k = {}) {
  require_same_shape(x, y, "SSIM");
  const auto taps = gaussian_kernel(1.5, 5);
  auto blur = [&taps](const FloatPlane& p) { return separable_filter(p, taps, taps); };
  auto product = [](const FloatPlane& p, const FloatPlane& q) {
    return elementwise(p, q, [](double u, double v) { return u * v; });
  };
  const auto mu_x = blur(x);
  const auto mu_y = blur(y);
  const auto ex2 = blur(product(x, x));
  const auto ey2 = blur(product(y, y));
  const auto exy = blur(product(x, y));
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mx = mu_x.data()[i];
    const double my = mu_y.data()[i];
    acc += detail::ssim_formula(mx, my, ex2.data()[i] - mx * mx, ey2.data()[i] - my * my,
                                exy.data()[i] - mx * my, k);
  }
  return acc / static_cast<double>(x.size());
}

/// SSIM: SSIM(F,A) + SSIM(F,B).
[[nodiscard]] inline MetricResult ssim_fusion(const FloatPlane& f, const FloatPlane& a,
                                              const FloatPlane& b) {
  detail::require_triple(f, a, b, "SSIM", detail::kMinMetricSide);
  const double fa = ssim_index(f, a);
  const double fb = ssim_index(f, b);
  return {MetricId::SSIM, fa + fb, fa, fb};
}

/// Q_C: covariance-weighted blend of windowed SSIM against each source over
/// all 8x8 windows (stride 1). Negative window similarities count as 0.
[[nodiscard]] inline MetricResult q_c(const FloatPlane& f, const FloatPlane& a,
                                      const FloatPlane& b, int window = 8) {
  detail::require_triple(f, a, b, "QC", detail::kMinMetricSide);
  auto product = [](const FloatPlane& p, const FloatPlane& q) {
    return elementwise(p, q, [](double u, double v) { return u * v; });
  };
  const IntegralImage sf(f), sa(a), sb(b);
  const IntegralImage sff(product(f, f)), saa(product(a, a)), sbb(product(b, b));
  const IntegralImage sfa(product(f, a)), sfb(product(f, b));
  const SsimConstants k;
  const double n = static_cast<double>(window) * window;

  double total = 0.0, total_a = 0.0, total_b = 0.0;
  long windows = 0;
  for (int y = 0; y + window <= f.height(); ++y) {
    for (int x = 0; x + window <= f.width(); ++x) {
      auto box = [&](const IntegralImage& s) { return s.box(x, y, x + window, y + window) / n; };
      const double mf = box(sf), ma = box(sa), mb = box(sb);
      const double vf = box(sff) - mf * mf;
      const double va = box(saa) - ma * ma;
      const double vb = box(sbb) - mb * mb;
      const double cfa = box(sfa) - mf * ma;
      const double cfb = box(sfb) - mf * mb;
      const double s_a = std::max(0.0, detail::ssim_formula(mf, ma, vf, va, cfa, k));
      const double s_b = std::max(0.0, detail::ssim_formula(mf, mb, vf, vb, cfb, k));
      const double denom = cfa + cfb;
      const double lambda = denom == 0.0 ? 0.5 : std::clamp(cfa / denom, 0.0, 1.0);
      total += lambda * s_a + (1.0 - lambda) * s_b;
      total_a += s_a;
      total_b += s_b;
      ++windows;
    }
  }
  const double nw = static_cast<double>(windows);
  return {MetricId::QC, std::clamp(total / nw, 0.0, 1.0), total_a / nw, total_b / nw};
}

/// SCD: r(F - B, A) + r(F - A, B).
[[nodiscard]] inline MetricResult scd(const FloatPlane& f, const FloatPlane& a,
                                      const FloatPlane& b) {
  detail::require_triple(f, a, b, "SCD", 1);
  auto minus = [](const FloatPlane& p, const FloatPlane& q) {
    return elementwise(p, q, [](double u, double v) { return u - v; });
  };
  const double ra = detail::pearson(minus(f, b), a);
  const double rb = detail::pearson(minus(f, a), b);
  return {MetricId::SCD, ra + rb, ra, rb};
}

/// CC: mean Pearson correlation of F with each source.
[[nodiscard]] inline MetricResult correlation_coefficient(const FloatPlane& f,
                                                          const FloatPlane& a,
                                                          const FloatPlane& b) {
  detail::require_triple(f, a, b, "CC", 1);
  const double ra = detail::pearson(f, a);
  const double rb = detail::pearson(f, b);
  return {MetricId::CC, 0.5 * (ra + rb), ra, rb};
}

}  // namespace fusebench
