#pragma once

#include <string>
#include <vector>

#include "fusebench/metrics/features.hpp"
#include "fusebench/metrics/information.hpp"
#include "fusebench/metrics/metric_id.hpp"
#include "fusebench/metrics/perceptual.hpp"
#include "fusebench/metrics/structural.hpp"

namespace fusebench {

/// Evaluates one metric on (fused, visible, infrared).
[[nodiscard]] inline MetricResult evaluate_metric(MetricId id, const FloatPlane& f,
                                                  const FloatPlane& a, const FloatPlane& b) {
  switch (id) {
    case MetricId::EN: return entropy(f);
    case MetricId::MI: return mutual_information(f, a, b);
    case MetricId::FMI: return feature_mutual_information(f, a, b);
    case MetricId::PSNR: return psnr(f, a, b);
    case MetricId::AG: return average_gradient(f);
    case MetricId::QABF: return q_abf(f, a, b);
    case MetricId::SD: return standard_deviation(f);
    case MetricId::SF: return spatial_frequency(f);
    case MetricId::QC: return q_c(f, a, b);
    case MetricId::SCD: return scd(f, a, b);
    case MetricId::CC: return correlation_coefficient(f, a, b);
    case MetricId::SSIM: return ssim_fusion(f, a, b);
    case MetricId::QCB: return q_cb(f, a, b);
    case MetricId::QCV: return q_cv(f, a, b);
    case MetricId::QVIFF: return q_viff(f, a, b);
  }
  throw ContractError("unknown metric");
}

/// All fifteen metrics in canonical column order. Contract errors are
/// rethrown prefixed with the failing metric's name.
[[nodiscard]] inline std::vector<MetricResult> evaluate_all(const FloatPlane& f,
                                                            const FloatPlane& a,
                                                            const FloatPlane& b) {
  require_same_shape(f, a, "evaluate_all");
  require_same_shape(f, b, "evaluate_all");
  std::vector<MetricResult> out;
  out.reserve(kAllMetrics.size());
  for (MetricId id : kAllMetrics) {
    try {
      out.push_back(evaluate_metric(id, f, a, b));
    } catch (const ContractError& e) {
      throw ContractError("[" + std::string(metric_name(id)) + "] " + e.what());
    }
  }
  return out;
}

[[nodiscard]] inline std::vector<MetricResult> evaluate_all(const ImagePlane& f,
                                                            const ImagePlane& a,
                                                            const ImagePlane& b) {
  return evaluate_all(to_float(f), to_float(a), to_float(b));
}

}  // namespace fusebench
