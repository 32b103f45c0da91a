#pragma once

#include <string>
#include <vector>

#include "fusebench/harness/analysis.hpp"
#include "fusebench/harness/pipeline.hpp"
#include "fusebench/harness/report.hpp"

namespace fusebench::harness {

struct BenchmarkOptions {
  RunOptions run;
  CorrelationOptions correlation;
  std::string baseline = "Visible";
  std::string infrared = "Infrared";
};

/// Every method through the metric suite and SEA, then the correlation
/// against SEA_mean and the analyses whose inputs are present.
[[nodiscard]] inline Report run_benchmark(const DatasetManifest& manifest,
                                          const BenchmarkOptions& opts = {}) {
  if (manifest.predictors.empty()) {
    throw ContractError("manifest '" + manifest.name + "' declares no predictors");
  }
  Report report;
  report.dataset = manifest.name;
  for (const auto& p : manifest.predictors) report.predictors.push_back(p.name);

  std::vector<ConventionalRun> conventional;
  std::vector<SeaRun> sea;
  const auto total = manifest.pairs.size();
  for (const auto& m : manifest.methods) {
    conventional.push_back(run_conventional(manifest, m, opts.run));
    const auto& c = conventional.back();
    report.coverage.push_back({"metrics", m.name, "", c.per_image.size(), total, c.excluded});
    sea.push_back(run_sea(manifest, m.name, opts.run));
    for (const auto& ps : sea.back().predictors) {
      report.coverage.push_back({"sea", m.name, ps.predictor, ps.covered, total, ps.excluded});
    }
  }
  report.scores = build_score_table(conventional, sea, report.predictors);

  const std::vector<DatasetScores> ds{{manifest.name, report.scores}};
  report.correlation = correlation_table(ds, "SEA_mean", opts.correlation);

  if (manifest.has_method(opts.baseline) && manifest.has_method(opts.infrared)) {
    report.vis_ir = analyze_vis_ir_diff(manifest, opts.baseline, opts.infrared, opts.run);
  }
  if (manifest.has_method(opts.baseline)) {
    const auto base = std::ranges::find(sea, opts.baseline, &SeaRun::method);
    for (const auto& run : sea) {
      if (run.method == opts.baseline) continue;
      report.class_improvement.push_back(
          {run.method, opts.baseline, analyze_class_improvement(run, *base, manifest.classes)});
    }
    report.improvement_counts = count_improvements(report.scores, opts.baseline, {opts.infrared});
  }
  return report;
}

}  // namespace fusebench::harness
