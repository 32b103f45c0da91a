#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fusebench/error.hpp"
#include "fusebench/plane.hpp"

namespace fusebench {

/// Ordered class vocabulary; a label is the index of its name.
class ClassSet {
 public:
  static constexpr std::uint8_t kIgnoreLabel = SegMask::kIgnore;

  explicit ClassSet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw ContractError("class set must not be empty");
    if (names_.size() > 255) {
      throw ContractError("class set holds " + std::to_string(names_.size()) +
                          " names; at most 255 allowed");
    }
    std::set<std::string> seen;
    for (const auto& n : names_) {
      if (!seen.insert(n).second) throw ContractError("duplicate class name '" + n + "'");
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return names_.size(); }
  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
  [[nodiscard]] const std::string& name(std::size_t i) const { return names_.at(i); }

  [[nodiscard]] bool valid_label(std::uint8_t label) const noexcept {
    return label == kIgnoreLabel || label < names_.size();
  }

 private:
  std::vector<std::string> names_;
};

/// k x (k+1) counts; rows are ground truth, columns predictions. The extra
/// last column collects pixels where the predictor emitted the ignore label.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes)
      : k_(classes), counts_(classes * (classes + 1), 0) {}

  [[nodiscard]] std::size_t classes() const noexcept { return k_; }

  [[nodiscard]] std::uint64_t at(std::size_t gt, std::size_t pred) const {
    return counts_.at(gt * (k_ + 1) + pred);
  }
  [[nodiscard]] std::uint64_t abstained(std::size_t gt) const { return at(gt, k_); }
  [[nodiscard]] std::uint64_t total() const noexcept {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }

  void add(std::size_t gt, std::size_t pred, std::uint64_t n = 1) {
    counts_.at(gt * (k_ + 1) + pred) += n;
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other) {
    if (other.k_ != k_) throw ContractError("cannot merge confusion matrices of different size");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
};

/// Adds every non-ignored ground-truth pixel of (pred, gt) to `cm`.
inline void accumulate_into(ConfusionMatrix& cm, const SegMask& pred, const SegMask& gt) {
  if (pred.width != gt.width || pred.height != gt.height) {
    throw ContractError("mask dimension mismatch: prediction " + std::to_string(pred.width) + "x" +
                        std::to_string(pred.height) + " vs ground truth " +
                        std::to_string(gt.width) + "x" + std::to_string(gt.height));
  }
  const std::size_t k = cm.classes();
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    const std::uint8_t g = gt.labels[i];
    const std::uint8_t p = pred.labels[i];
    if (g != ClassSet::kIgnoreLabel && g >= k) {
      throw ContractError("ground-truth label " + std::to_string(g) + " out of range at pixel " +
                          std::to_string(i));
    }
    if (p != ClassSet::kIgnoreLabel && p >= k) {
      throw ContractError("predicted label " + std::to_string(p) + " out of range at pixel " +
                          std::to_string(i));
    }
    if (g == ClassSet::kIgnoreLabel) continue;
    cm.add(g, p == ClassSet::kIgnoreLabel ? k : p);
  }
}

[[nodiscard]] inline ConfusionMatrix accumulate(ConfusionMatrix cm, const SegMask& pred,
                                                const SegMask& gt) {
  accumulate_into(cm, pred, gt);
  return cm;
}

/// Per-class IoU (nullopt where the class never occurs in gt or prediction)
/// and their mean over defined classes.
struct MiouScore {
  std::vector<std::optional<double>> per_class_iou;
  double miou = 0.0;
};

[[nodiscard]] inline MiouScore compute_score(const ConfusionMatrix& cm) {
  const std::size_t k = cm.classes();
  MiouScore s;
  s.per_class_iou.resize(k);
  long double sum = 0.0L;  // extended accumulator keeps the mean correctly rounded on small k
  std::size_t defined = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::uint64_t tp = cm.at(c, c);
    std::uint64_t row = 0;
    for (std::size_t j = 0; j <= k; ++j) row += cm.at(c, j);
    std::uint64_t col = 0;
    for (std::size_t r = 0; r < k; ++r) col += cm.at(r, c);
    const std::uint64_t fn = row - tp;
    const std::uint64_t fp = col - tp;
    const std::uint64_t denom = tp + fp + fn;
    if (denom == 0) continue;
    const double iou = static_cast<double>(tp) / static_cast<double>(denom);
    s.per_class_iou[c] = iou;
    sum += static_cast<long double>(tp) / static_cast<long double>(denom);
    ++defined;
  }
  if (defined == 0) throw EmptyEvaluationError("no class occurs in ground truth or prediction");
  s.miou = static_cast<double>(sum / static_cast<long double>(defined));
  return s;
}

/// Cross-predictor SEA score: the arithmetic mean of per-predictor mIoU.
[[nodiscard]] inline double aggregate_predictors(const std::map<std::string, double>& scores) {
  if (scores.empty()) throw ContractError("aggregate_predictors: no predictor scores");
  double sum = 0.0;
  for (const auto& [name, v] : scores) sum += v;
  return sum / static_cast<double>(scores.size());
}

/// Independent mIoU per (prediction, ground truth) pair; nullopt where the
/// image has no defined class.
[[nodiscard]] inline std::vector<std::optional<double>> per_image_scores(
    std::span<const std::pair<SegMask, SegMask>> pairs, std::size_t classes) {
  std::vector<std::optional<double>> out;
  out.reserve(pairs.size());
  for (const auto& [pred, gt] : pairs) {
    ConfusionMatrix cm(classes);
    accumulate_into(cm, pred, gt);
    try {
      out.push_back(compute_score(cm).miou);
    } catch (const EmptyEvaluationError&) {
      out.push_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace fusebench
