#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fusebench/fusers.hpp"
#include "fusebench/harness/manifest.hpp"
#include "fusebench/harness/parallel.hpp"
#include "fusebench/metrics.hpp"
#include "fusebench/png_io.hpp"
#include "fusebench/sea.hpp"

namespace fusebench::harness {

using MetricVector = std::array<double, kAllMetrics.size()>;

/// A pair left out of one analysis, with the reason.
struct Exclusion {
  std::string pair_id;
  std::string reason;

  friend bool operator==(const Exclusion&, const Exclusion&) = default;
};

struct RunOptions {
  std::size_t threads = default_thread_count();
};

/// Conventional-metric part of one method's run. `pair_ids` and `per_image`
/// follow manifest order with excluded pairs left out.
struct ConventionalRun {
  std::string method;
  std::vector<std::string> pair_ids;
  std::vector<MetricVector> per_image;
  std::optional<MetricVector> mean;  // empty when every pair was excluded
  std::vector<Exclusion> excluded;
};

struct PredictorSea {
  std::string predictor;
  ConfusionMatrix matrix;
  std::optional<MiouScore> score;  // empty when no pixel could be evaluated
  std::size_t covered = 0;
  std::vector<Exclusion> excluded;
};

struct SeaRun {
  std::string method;
  std::vector<PredictorSea> predictors;
  std::optional<double> mean;  // mean mIoU over predictors with a score
};

/// Sources of a pair as luma planes (RGB inputs are converted).
struct PairImages {
  ImagePlane visible;
  ImagePlane infrared;
};

[[nodiscard]] inline PairImages load_pair(const PairEntry& p) {
  PairImages out{load_gray_png(p.visible), load_gray_png(p.infrared)};
  if (!out.visible.same_shape(out.infrared)) {
    throw ContractError("visible " + std::to_string(out.visible.width()) + "x" +
                        std::to_string(out.visible.height()) + " vs infrared " +
                        std::to_string(out.infrared.width()) + "x" +
                        std::to_string(out.infrared.height()));
  }
  return out;
}

/// The fused image for one pair: produced by the method's fuser, or read
/// from its fused directory.
[[nodiscard]] inline ImagePlane fused_image(const MethodEntry& m, const PairEntry& p,
                                            const PairImages& src) {
  if (m.fuser) return fuse(*m.fuser, src.visible, src.infrared);
  const auto path = *m.fused_dir / (p.id + ".png");
  auto img = load_gray_png(path);
  if (!img.same_shape(src.visible)) {
    throw ContractError("fused image " + std::to_string(img.width()) + "x" +
                        std::to_string(img.height()) + " does not match sources " +
                        std::to_string(src.visible.width()) + "x" +
                        std::to_string(src.visible.height()));
  }
  return img;
}

[[nodiscard]] inline ConventionalRun run_conventional(const DatasetManifest& manifest,
                                                      const MethodEntry& method,
                                                      const RunOptions& opts = {}) {
  struct Slot {
    std::optional<MetricVector> values;
    std::string error;
  };
  std::vector<Slot> slots(manifest.pairs.size());
  parallel_for(slots.size(), opts.threads, [&](std::size_t i) {
    const auto& p = manifest.pairs[i];
    try {
      const auto src = load_pair(p);
      const auto f = fused_image(method, p, src);
      const auto results = evaluate_all(f, src.visible, src.infrared);
      MetricVector v{};
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = results[k].value;
      slots[i].values = v;
    } catch (const std::runtime_error& e) {
      slots[i].error = e.what();
    } catch (const std::invalid_argument& e) {
      slots[i].error = e.what();
    }
  });

  ConventionalRun run;
  run.method = method.name;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].values) {
      run.pair_ids.push_back(manifest.pairs[i].id);
      run.per_image.push_back(*slots[i].values);
    } else {
      run.excluded.push_back({manifest.pairs[i].id, slots[i].error});
    }
  }
  if (!run.per_image.empty()) {
    MetricVector sum{};
    for (const auto& v : run.per_image) {
      for (std::size_t k = 0; k < v.size(); ++k) sum[k] += v[k];
    }
    for (auto& s : sum) s /= static_cast<double>(run.per_image.size());
    run.mean = sum;
  }
  return run;
}

/// Ground-truth and predicted mask for one predictor, method and pair. A
/// missing or mis-sized prediction raises IoError/ContractError so the
/// caller can exclude the pair; out-of-range labels surface from the
/// accumulator.
[[nodiscard]] inline std::pair<SegMask, SegMask> load_masks(const DatasetManifest& manifest,
                                                            const PredictorEntry& pred,
                                                            const std::string& method,
                                                            const PairEntry& p) {
  auto gt = load_mask_png(p.label);
  auto pr = load_mask_png(manifest.mask_path(pred, method, p.id));
  if (pr.width != gt.width || pr.height != gt.height) {
    throw ContractError("predicted mask " + std::to_string(pr.width) + "x" +
                        std::to_string(pr.height) + " does not match label " +
                        std::to_string(gt.width) + "x" + std::to_string(gt.height));
  }
  return {std::move(pr), std::move(gt)};
}

namespace detail {

inline void check_labels(const SegMask& m, const ClassSet& classes, const std::string& what) {
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    if (!classes.valid_label(m.labels[i])) {
      throw ContractError(what + ": label " + std::to_string(m.labels[i]) + " at pixel " +
                          std::to_string(i) + " outside the " + std::to_string(classes.size()) +
                          "-class set");
    }
  }
}

/// Per pair: the mask pair or the reason it could not be used. Label range
/// violations are contract errors and abort the run.
inline std::vector<std::optional<std::pair<SegMask, SegMask>>> gather_masks(
    const DatasetManifest& manifest, const PredictorEntry& pred, const std::string& method,
    const RunOptions& opts, std::vector<std::string>& reasons) {
  const auto n = manifest.pairs.size();
  std::vector<std::optional<std::pair<SegMask, SegMask>>> out(n);
  reasons.assign(n, {});
  parallel_for(n, opts.threads, [&](std::size_t i) {
    const auto& p = manifest.pairs[i];
    try {
      out[i] = load_masks(manifest, pred, method, p);
    } catch (const IoError& e) {
      reasons[i] = e.what();
      return;
    } catch (const ContractError& e) {
      reasons[i] = e.what();
      return;
    }
    check_labels(out[i]->first, manifest.classes, pred.name + "/" + method + "/" + p.id);
    check_labels(out[i]->second, manifest.classes, "label of " + p.id);
  });
  return out;
}

}  // namespace detail

/// Pooled SEA score of one method: one confusion matrix per predictor over
/// every available pair, mIoU per predictor, then the predictor mean.
[[nodiscard]] inline SeaRun run_sea(const DatasetManifest& manifest, const std::string& method,
                                    const RunOptions& opts = {}) {
  if (manifest.predictors.empty()) {
    throw ContractError("manifest '" + manifest.name + "' declares no predictors");
  }
  const auto k = manifest.classes.size();
  SeaRun run;
  run.method = method;
  double sum = 0.0;
  int scored = 0;
  for (const auto& pred : manifest.predictors) {
    std::vector<std::string> reasons;
    const auto masks = detail::gather_masks(manifest, pred, method, opts, reasons);
    PredictorSea ps{pred.name, ConfusionMatrix(k), std::nullopt, 0, {}};
    for (std::size_t i = 0; i < masks.size(); ++i) {
      if (masks[i]) {
        accumulate_into(ps.matrix, masks[i]->first, masks[i]->second);
        ++ps.covered;
      } else {
        ps.excluded.push_back({manifest.pairs[i].id, reasons[i]});
      }
    }
    try {
      ps.score = compute_score(ps.matrix);
      sum += ps.score->miou;
      ++scored;
    } catch (const EmptyEvaluationError&) {
    }
    run.predictors.push_back(std::move(ps));
  }
  if (scored > 0) run.mean = sum / scored;
  return run;
}

/// Per-image mIoU of one method for one predictor, aligned with manifest
/// pairs; empty where the mask is missing or the image has no labelled pixel.
[[nodiscard]] inline std::vector<std::optional<double>> per_image_sea(
    const DatasetManifest& manifest, const PredictorEntry& pred, const std::string& method,
    const RunOptions& opts = {}) {
  std::vector<std::string> reasons;
  const auto masks = detail::gather_masks(manifest, pred, method, opts, reasons);
  std::vector<std::optional<double>> out(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (!masks[i]) continue;
    const std::pair<SegMask, SegMask> one[] = {*masks[i]};
    out[i] = per_image_scores(one, manifest.classes.size())[0];
  }
  return out;
}

}  // namespace fusebench::harness
