#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "fusebench/csf.hpp"
#include "fusebench/filters.hpp"
#include "fusebench/metrics/metric_id.hpp"

namespace fusebench {

namespace detail {

/// min/max ratio of two non-negative magnitudes; 1 when both vanish.
inline double magnitude_ratio(double u, double v) noexcept {
  const double hi = std::max(u, v);
  return hi > 0.0 ? std::min(u, v) / hi : 1.0;
}

/// Masked local contrast of a CSF-filtered plane: band-pass ratio of two
/// Gaussian scales, then the k|C|^p / (h|C|^q + Z) masking response.
inline FloatPlane masked_contrast(const FloatPlane& filtered) {
  constexpr double kSigmaInner = 2.0;
  constexpr double kSigmaOuter = 4.0;
  constexpr double p = 3.0, q = 2.0, z = 1e-4;
  const auto inner = gaussian_blur(filtered, kSigmaInner, 6);
  const auto outer = gaussian_blur(filtered, kSigmaOuter, 12);
  FloatPlane out(filtered.width(), filtered.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double den = outer.data()[i];
    const double c = std::abs(den) > 1e-8 ? std::abs(inner.data()[i] / den - 1.0) : 0.0;
    out.data()[i] = std::pow(c, p) / (std::pow(c, q) + z);
  }
  return out;
}

}  // namespace detail

/// Q_CB: saliency-weighted preservation of perceptual local contrast.
[[nodiscard]] inline MetricResult q_cb(const FloatPlane& f, const FloatPlane& a,
                                       const FloatPlane& b) {
  detail::require_triple(f, a, b, "QCB", detail::kMinMetricSide);
  const auto cf = detail::masked_contrast(csf_filter(f));
  const auto ca = detail::masked_contrast(csf_filter(a));
  const auto cb = detail::masked_contrast(csf_filter(b));
  double total = 0.0, total_a = 0.0, total_b = 0.0;
  for (std::size_t i = 0; i < cf.size(); ++i) {
    const double va = ca.data()[i];
    const double vb = cb.data()[i];
    const double qa = detail::magnitude_ratio(va, cf.data()[i]);
    const double qb = detail::magnitude_ratio(vb, cf.data()[i]);
    const double ea = va * va;
    const double eb = vb * vb;
    const double energy = ea + eb;
    const double wa = energy > 0.0 ? ea / energy : 0.5;
    const double wb = energy > 0.0 ? eb / energy : 0.5;
    total += wa * qa + wb * qb;
    total_a += qa;
    total_b += qb;
  }
  const double n = static_cast<double>(cf.size());
  return {MetricId::QCB, std::clamp(total / n, 0.0, 1.0), total_a / n, total_b / n};
}

/// Saliency-weighted mean of per-region distortions for two sources. With
/// no saliency anywhere the regions are averaged uniformly.
[[nodiscard]] inline double weighted_region_quality(std::span<const double> weight_a,
                                                    std::span<const double> dist_a,
                                                    std::span<const double> weight_b,
                                                    std::span<const double> dist_b) {
  double num = 0.0, den = 0.0, plain = 0.0;
  for (std::size_t r = 0; r < weight_a.size(); ++r) {
    num += weight_a[r] * dist_a[r] + weight_b[r] * dist_b[r];
    den += weight_a[r] + weight_b[r];
    plain += 0.5 * (dist_a[r] + dist_b[r]);
  }
  if (den > 0.0) return num / den;
  return weight_a.empty() ? 0.0 : plain / static_cast<double>(weight_a.size());
}

/// Q_CV: per 16x16 region, mean squared CSF-filtered difference between F and
/// each source, weighted by the source's summed Sobel edge strength. 0 is perfect.
[[nodiscard]] inline MetricResult q_cv(const FloatPlane& f, const FloatPlane& a,
                                       const FloatPlane& b, int region = 16) {
  detail::require_triple(f, a, b, "QCV", detail::kMinMetricSide);
  auto diff = [](const FloatPlane& p, const FloatPlane& q) {
    return elementwise(p, q, [](double u, double v) { return u - v; });
  };
  const auto ea = csf_filter(diff(f, a));
  const auto eb = csf_filter(diff(f, b));
  const auto ga = gradient_maps(a).magnitude;
  const auto gb = gradient_maps(b).magnitude;

  std::vector<double> wa, wb, da, db;
  for (int y0 = 0; y0 < f.height(); y0 += region) {
    for (int x0 = 0; x0 < f.width(); x0 += region) {
      const int y1 = std::min(y0 + region, f.height());
      const int x1 = std::min(x0 + region, f.width());
      double sa = 0.0, sb = 0.0, qa = 0.0, qb = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          sa += ga(x, y);
          sb += gb(x, y);
          qa += ea(x, y) * ea(x, y);
          qb += eb(x, y) * eb(x, y);
        }
      }
      const double n = static_cast<double>(x1 - x0) * (y1 - y0);
      wa.push_back(sa);
      wb.push_back(sb);
      da.push_back(qa / n);
      db.push_back(qb / n);
    }
  }
  const std::vector<double> zeros(wa.size(), 0.0);
  const double value = weighted_region_quality(wa, da, wb, db);
  const double value_a = weighted_region_quality(wa, da, zeros, zeros);
  const double value_b = weighted_region_quality(wb, db, zeros, zeros);
  return {MetricId::QCV, std::max(0.0, value), value_a, value_b};
}

namespace detail {

inline constexpr int kViffScales = 4;
inline constexpr std::array<double, kViffScales> kViffScaleWeights = {
    1.0 / 2.15, 0.0, 0.15 / 2.15, 1.0 / 2.15};

/// Gaussian window of scale s (0-based): 2^(4-s)+1 taps, sigma = taps/5.
inline std::vector<double> viff_window(int scale) {
  const int taps = (1 << (kViffScales - scale)) + 1;
  return gaussian_kernel(taps / 5.0, taps / 2);
}

inline std::vector<FloatPlane> viff_pyramid(const FloatPlane& p) {
  std::vector<FloatPlane> levels{p};
  for (int s = 1; s < kViffScales; ++s) {
    const auto w = viff_window(s);
    const auto blurred = separable_filter(levels.back(), w, w);
    FloatPlane down((blurred.width() + 1) / 2, (blurred.height() + 1) / 2);
    for (int y = 0; y < down.height(); ++y) {
      for (int x = 0; x < down.width(); ++x) down(x, y) = blurred(2 * x, 2 * y);
    }
    levels.push_back(std::move(down));
  }
  return levels;
}

struct VifMaps {
  FloatPlane gain;       // g of the distortion channel
  FloatPlane preserved;  // information the fused image carries about the source
  FloatPlane reference;  // information the source carries
};

/// GSM channel model: fused = g * source + v, with additive visual noise.
inline VifMaps vif_maps(const FloatPlane& ref, const FloatPlane& dist, int scale,
                        double noise_var) {
  const auto w = viff_window(scale);
  auto blur = [&w](const FloatPlane& p) { return separable_filter(p, w, w); };
  auto product = [](const FloatPlane& p, const FloatPlane& q) {
    return elementwise(p, q, [](double u, double v) { return u * v; });
  };
  const auto mu1 = blur(ref);
  const auto mu2 = blur(dist);
  const auto e11 = blur(product(ref, ref));
  const auto e22 = blur(product(dist, dist));
  const auto e12 = blur(product(ref, dist));

  constexpr double eps = 1e-10;
  VifMaps m{FloatPlane(ref.width(), ref.height()), FloatPlane(ref.width(), ref.height()),
            FloatPlane(ref.width(), ref.height())};
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double m1 = mu1.data()[i];
    const double m2 = mu2.data()[i];
    double s1 = std::max(0.0, e11.data()[i] - m1 * m1);
    const double s2 = std::max(0.0, e22.data()[i] - m2 * m2);
    const double s12 = e12.data()[i] - m1 * m2;

    double g = s12 / (s1 + eps);
    double sv = s2 - g * s12;
    if (s1 < eps) {
      g = 0.0;
      sv = s2;
      s1 = 0.0;
    }
    if (s2 < eps) {
      g = 0.0;
      sv = 0.0;
    }
    if (g < 0.0) {
      sv = s2;
      g = 0.0;
    }
    sv = std::max(sv, eps);

    m.gain.data()[i] = g;
    m.preserved.data()[i] = std::log10(1.0 + g * g * s1 / (sv + noise_var));
    m.reference.data()[i] = std::log10(1.0 + s1 / noise_var);
  }
  return m;
}

}  // namespace detail

/// Q_VIFF: multi-scale visual information fidelity of F against both sources.
/// Per pixel the source whose distortion channel has the larger gain is used;
/// equal gains average both.
[[nodiscard]] inline MetricResult q_viff(const FloatPlane& f, const FloatPlane& a,
                                         const FloatPlane& b, double noise_var = 2.0) {
  detail::require_triple(f, a, b, "QVIFF", detail::kMinMetricSide);
  constexpr double c = 1e-7;
  const auto pf = detail::viff_pyramid(f);
  const auto pa = detail::viff_pyramid(a);
  const auto pb = detail::viff_pyramid(b);

  double value = 0.0, value_a = 0.0, value_b = 0.0;
  for (int s = 0; s < detail::kViffScales; ++s) {
    const double weight = detail::kViffScaleWeights[s];
    if (weight == 0.0) continue;
    const auto ma = detail::vif_maps(pa[s], pf[s], s, noise_var);
    const auto mb = detail::vif_maps(pb[s], pf[s], s, noise_var);
    double num = 0.0, den = 0.0, num_a = 0.0, den_a = 0.0, num_b = 0.0, den_b = 0.0;
    for (std::size_t i = 0; i < ma.gain.size(); ++i) {
      const double ga = ma.gain.data()[i];
      const double gb = mb.gain.data()[i];
      const double pa_i = ma.preserved.data()[i], ra_i = ma.reference.data()[i];
      const double pb_i = mb.preserved.data()[i], rb_i = mb.reference.data()[i];
      if (ga > gb) {
        num += pa_i + c;
        den += ra_i + c;
      } else if (gb > ga) {
        num += pb_i + c;
        den += rb_i + c;
      } else {
        num += 0.5 * (pa_i + pb_i) + c;
        den += 0.5 * (ra_i + rb_i) + c;
      }
      num_a += pa_i + c;
      den_a += ra_i + c;
      num_b += pb_i + c;
      den_b += rb_i + c;
    }
    value += weight * num / den;
    value_a += weight * num_a / den_a;
    value_b += weight * num_b / den_b;
  }
  return {MetricId::QVIFF, std::max(0.0, value), value_a, value_b};
}

}  // namespace fusebench
