#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "fusebench/plane.hpp"

namespace fusebench {

enum class MetricId { EN, MI, FMI, PSNR, AG, QABF, SD, SF, QC, SCD, CC, SSIM, QCB, QCV, QVIFF };

enum class Polarity { HigherBetter, LowerBetter };

/// Canonical column order of the conventional metric tables.
inline constexpr std::array<MetricId, 15> kAllMetrics = {
    MetricId::EN,  MetricId::MI,  MetricId::FMI, MetricId::PSNR, MetricId::AG,
    MetricId::QABF, MetricId::SD, MetricId::SF,  MetricId::QC,   MetricId::SCD,
    MetricId::CC,  MetricId::SSIM, MetricId::QCB, MetricId::QCV, MetricId::QVIFF};

[[nodiscard]] constexpr std::string_view metric_name(MetricId id) noexcept {
  constexpr std::array<std::string_view, 15> names = {"EN", "MI",  "FMI", "PSNR", "AG",
                                                      "QABF", "SD", "SF", "QC",  "SCD",
                                                      "CC", "SSIM", "QCB", "QCV", "QVIFF"};
  return names[static_cast<std::size_t>(id)];
}

[[nodiscard]] inline std::optional<MetricId> parse_metric(std::string_view name) noexcept {
  for (MetricId id : kAllMetrics) {
    if (metric_name(id) == name) return id;
  }
  return std::nullopt;
}

[[nodiscard]] constexpr Polarity polarity(MetricId id) noexcept {
  return id == MetricId::QCV ? Polarity::LowerBetter : Polarity::HigherBetter;
}

struct MetricResult {
  MetricId metric{};
  double value = 0.0;
  std::optional<double> vs_a;  // fused vs visible, where the metric decomposes
  std::optional<double> vs_b;  // fused vs infrared

  friend bool operator==(const MetricResult&, const MetricResult&) = default;
};

namespace detail {

/// Smallest side accepted by window- and gradient-based metrics.
inline constexpr int kMinMetricSide = 16;

inline void require_metric_plane(const FloatPlane& f, const char* name, int min_side) {
  if (f.empty()) throw ContractError(std::string(name) + ": empty plane");
  if (f.width() < min_side || f.height() < min_side) {
    throw ContractError(std::string(name) + ": plane " + std::to_string(f.width()) + "x" +
                        std::to_string(f.height()) + " below minimum side " +
                        std::to_string(min_side));
  }
}

inline void require_triple(const FloatPlane& f, const FloatPlane& a, const FloatPlane& b,
                           const char* name, int min_side) {
  require_metric_plane(f, name, min_side);
  require_same_shape(f, a, name);
  require_same_shape(f, b, name);
}

inline double finite_or(double v, double fallback) noexcept {
  return std::isfinite(v) ? v : fallback;
}

}  // namespace detail

}  // namespace fusebench
