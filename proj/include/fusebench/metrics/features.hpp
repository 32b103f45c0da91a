#pragma once

#include <cmath>
#include <numbers>

#include "fusebench/filters.hpp"
#include "fusebench/metrics/metric_id.hpp"

namespace fusebench {

/// AG: mean of sqrt((dx^2 + dy^2) / 2) over forward differences.
[[nodiscard]] inline MetricResult average_gradient(const FloatPlane& f) {
  detail::require_metric_plane(f, "AG", detail::kMinMetricSide);
  double acc = 0.0;
  for (int y = 0; y + 1 < f.height(); ++y) {
    for (int x = 0; x + 1 < f.width(); ++x) {
      const double dx = f(x + 1, y) - f(x, y);
      const double dy = f(x, y + 1) - f(x, y);
      acc += std::sqrt(0.5 * (dx * dx + dy * dy));
    }
  }
  const double n = static_cast<double>(f.width() - 1) * (f.height() - 1);
  return {MetricId::AG, acc / n, {}, {}};
}

/// SD: population standard deviation of intensities.
[[nodiscard]] inline MetricResult standard_deviation(const FloatPlane& f) {
  detail::require_metric_plane(f, "SD", 1);
  double mean = 0.0;
  for (double v : f.data()) mean += v;
  mean /= static_cast<double>(f.size());
  double var = 0.0;
  for (double v : f.data()) var += (v - mean) * (v - mean);
  return {MetricId::SD, std::sqrt(var / static_cast<double>(f.size())), {}, {}};
}

/// SF: sqrt(RF^2 + CF^2), RF/CF the RMS of horizontal/vertical forward differences.
[[nodiscard]] inline MetricResult spatial_frequency(const FloatPlane& f) {
  detail::require_metric_plane(f, "SF", detail::kMinMetricSide);
  double row_acc = 0.0;
  double col_acc = 0.0;
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 1; x < f.width(); ++x) {
      const double d = f(x, y) - f(x - 1, y);
      row_acc += d * d;
    }
  }
  for (int y = 1; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      const double d = f(x, y) - f(x, y - 1);
      col_acc += d * d;
    }
  }
  const double rf2 = row_acc / (static_cast<double>(f.width() - 1) * f.height());
  const double cf2 = col_acc / (static_cast<double>(f.height() - 1) * f.width());
  return {MetricId::SF, std::sqrt(rf2 + cf2), {}, {}};
}

/// Sigmoid calibration of the gradient edge-preservation measure.
struct EdgePreservationParams {
  double gamma_g = 0.9994;
  double kappa_g = -15.0;
  double sigma_g = 0.5;
  double gamma_a = 0.9879;
  double kappa_a = -22.0;
  double sigma_a = 0.8;
  double weight_exponent = 1.0;
};

namespace detail {

struct EdgeField {
  FloatPlane strength;
  FloatPlane angle;  // atan(gy/gx) in [-pi/2, pi/2]
};

inline EdgeField edge_field(const FloatPlane& p) {
  auto g = gradient_maps(p);
  FloatPlane angle(p.width(), p.height());
  for (std::size_t i = 0; i < angle.size(); ++i) {
    const double gx = g.gx.data()[i];
    const double gy = g.gy.data()[i];
    angle.data()[i] = gx == 0.0 ? std::numbers::pi / 2 : std::atan(gy / gx);
  }
  return {std::move(g.magnitude), std::move(angle)};
}

/// Per-pixel preservation Q^{XF} of source edges X in the fused image.
inline FloatPlane edge_preservation(const EdgeField& src, const EdgeField& fused,
                                    const EdgePreservationParams& prm) {
  FloatPlane q(src.strength.width(), src.strength.height());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double gs = src.strength.data()[i];
    const double gf = fused.strength.data()[i];
    double rel_strength = 1.0;
    if (gs > gf) {
      rel_strength = gf / gs;
    } else if (gs < gf) {
      rel_strength = gs / gf;
    }
    const double rel_angle =
        1.0 - std::abs(src.angle.data()[i] - fused.angle.data()[i]) / (std::numbers::pi / 2);
    const double qg = prm.gamma_g / (1.0 + std::exp(prm.kappa_g * (rel_strength - prm.sigma_g)));
    const double qa = prm.gamma_a / (1.0 + std::exp(prm.kappa_a * (rel_angle - prm.sigma_a)));
    q.data()[i] = qg * qa;
  }
  return q;
}

}  // namespace detail

/// Q_ABF: edge-strength-weighted preservation of source Sobel edges in F.
/// Sources without any edges yield 0.
[[nodiscard]] inline MetricResult q_abf(const FloatPlane& f, const FloatPlane& a,
                                        const FloatPlane& b,
                                        const EdgePreservationParams& prm = {}) {
  detail::require_triple(f, a, b, "QABF", detail::kMinMetricSide);
  const auto ef = detail::edge_field(f);
  const auto ea = detail::edge_field(a);
  const auto eb = detail::edge_field(b);
  const auto qa = detail::edge_preservation(ea, ef, prm);
  const auto qb = detail::edge_preservation(eb, ef, prm);

  double num_a = 0.0, den_a = 0.0, num_b = 0.0, den_b = 0.0;
  for (std::size_t i = 0; i < qa.size(); ++i) {
    const double wa = std::pow(ea.strength.data()[i], prm.weight_exponent);
    const double wb = std::pow(eb.strength.data()[i], prm.weight_exponent);
    num_a += qa.data()[i] * wa;
    den_a += wa;
    num_b += qb.data()[i] * wb;
    den_b += wb;
  }
  auto ratio = [](double n, double d) { return d > 0.0 ? n / d : 0.0; };
  return {MetricId::QABF, ratio(num_a + num_b, den_a + den_b), ratio(num_a, den_a), ratio(num_b, den_b)};
}

}  // namespace fusebench
