#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "fusebench/harness/pipeline.hpp"
#include "fusebench/rank_correlation.hpp"

namespace fusebench::harness {

struct ImageDiff {
  std::string pair_id;
  double diff = 0.0;  // mIoU(infrared) - mIoU(visible), averaged over predictors

  friend bool operator==(const ImageDiff&, const ImageDiff&) = default;
};

struct VisIrDiff {
  std::vector<ImageDiff> diffs;  // ascending by diff, then pair id
  std::size_t positive = 0;
  double fraction_positive = 0.0;
  std::vector<Exclusion> excluded;
};

/// Core of the visible/infrared comparison on precomputed per-image scores:
/// `vis[p][i]` and `ir[p][i]` hold predictor p's mIoU on image i. An image
/// counts when at least one predictor scores both rows.
[[nodiscard]] inline VisIrDiff vis_ir_diff_from_scores(
    const std::vector<std::string>& pair_ids,
    const std::vector<std::vector<std::optional<double>>>& vis,
    const std::vector<std::vector<std::optional<double>>>& ir) {
  if (vis.size() != ir.size()) throw ContractError("visible and infrared predictor counts differ");
  for (std::size_t p = 0; p < vis.size(); ++p) {
    if (vis[p].size() != pair_ids.size() || ir[p].size() != pair_ids.size()) {
      throw ContractError("per-image score vectors must match the pair list");
    }
  }
  VisIrDiff out;
  for (std::size_t i = 0; i < pair_ids.size(); ++i) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t p = 0; p < vis.size(); ++p) {
      if (vis[p][i] && ir[p][i]) {
        sum += *ir[p][i] - *vis[p][i];
        ++n;
      }
    }
    if (n == 0) {
      out.excluded.push_back({pair_ids[i], "no predictor scored both rows"});
      continue;
    }
    out.diffs.push_back({pair_ids[i], sum / n});
  }
  std::ranges::sort(out.diffs, [](const ImageDiff& a, const ImageDiff& b) {
    return a.diff != b.diff ? a.diff < b.diff : a.pair_id < b.pair_id;
  });
  out.positive = static_cast<std::size_t>(
      std::ranges::count_if(out.diffs, [](const ImageDiff& d) { return d.diff > 0.0; }));
  if (!out.diffs.empty()) {
    out.fraction_positive = static_cast<double>(out.positive) / static_cast<double>(out.diffs.size());
  }
  return out;
}

[[nodiscard]] inline VisIrDiff analyze_vis_ir_diff(const DatasetManifest& manifest,
                                                   const std::string& visible_method = "Visible",
                                                   const std::string& infrared_method = "Infrared",
                                                   const RunOptions& opts = {}) {
  if (manifest.predictors.empty()) {
    throw ContractError("manifest '" + manifest.name + "' declares no predictors");
  }
  std::vector<std::string> ids;
  for (const auto& p : manifest.pairs) ids.push_back(p.id);
  std::vector<std::vector<std::optional<double>>> vis, ir;
  for (const auto& pred : manifest.predictors) {
    vis.push_back(per_image_sea(manifest, pred, visible_method, opts));
    ir.push_back(per_image_sea(manifest, pred, infrared_method, opts));
  }
  return vis_ir_diff_from_scores(ids, vis, ir);
}

struct ClassDelta {
  std::string class_name;
  std::optional<double> delta;  // empty when the class is undefined in both runs

  friend bool operator==(const ClassDelta&, const ClassDelta&) = default;
};

/// Per-class IoU(method) - IoU(baseline) from pooled matrices, averaged
/// over predictors where both IoUs are defined. Sorted descending with
/// undefined classes last.
[[nodiscard]] inline std::vector<ClassDelta> analyze_class_improvement(const SeaRun& method,
                                                                       const SeaRun& baseline,
                                                                       const ClassSet& classes) {
  std::vector<ClassDelta> out;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    double sum = 0.0;
    int n = 0;
    for (const auto& pm : method.predictors) {
      for (const auto& pb : baseline.predictors) {
        if (pm.predictor != pb.predictor || !pm.score || !pb.score) continue;
        const auto& a = pm.score->per_class_iou;
        const auto& b = pb.score->per_class_iou;
        if (c < a.size() && c < b.size() && a[c] && b[c]) {
          sum += *a[c] - *b[c];
          ++n;
        }
      }
    }
    out.push_back({classes.name(c), n > 0 ? std::optional<double>(sum / n) : std::nullopt});
  }
  std::ranges::stable_sort(out, [](const ClassDelta& a, const ClassDelta& b) {
    if (a.delta && b.delta) return *a.delta > *b.delta;
    return a.delta.has_value() && !b.delta.has_value();
  });
  return out;
}

struct ImprovementCount {
  std::string column;
  int count = 0;

  friend bool operator==(const ImprovementCount&, const ImprovementCount&) = default;
};

/// For every metric column present (canonical order), then SEA_mean if
/// present: how many methods beat the baseline row strictly after direction
/// adjustment. Rows named in `excluded_rows` (other source baselines) and
/// the baseline itself are not counted.
[[nodiscard]] inline std::vector<ImprovementCount> count_improvements(
    const ScoreTable& table, const std::string& baseline = "Visible",
    const std::vector<std::string>& excluded_rows = {"Infrared"}) {
  const auto base = table.method_index(baseline);
  if (!base) throw ContractError("score table has no baseline row '" + baseline + "'");
  std::vector<std::string> columns;
  for (MetricId id : kAllMetrics) {
    if (table.has_column(std::string(metric_name(id)))) columns.emplace_back(metric_name(id));
  }
  if (table.has_column("SEA_mean")) columns.emplace_back("SEA_mean");
  std::vector<ImprovementCount> out;
  for (const auto& col : columns) {
    const auto values = column_direction_adjust(col, table.column(col));
    int count = 0;
    for (std::size_t r = 0; r < values.size(); ++r) {
      const auto& name = table.methods()[r];
      if (r == *base || std::ranges::find(excluded_rows, name) != excluded_rows.end()) continue;
      if (values[r] > values[*base]) ++count;
    }
    out.push_back({col, count});
  }
  return out;
}

}  // namespace fusebench::harness
