#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fusebench/error.hpp"
#include "fusebench/metrics/metric_id.hpp"

namespace fusebench {

/// Methods x columns score matrix. Columns are metric names ("QABF"), SEA
/// variants ("SEA_<predictor>", "SEA_mean") or anything else; insertion
/// order is kept for serialisation.
class ScoreTable {
 public:
  ScoreTable() = default;
  explicit ScoreTable(std::vector<std::string> methods) : methods_(std::move(methods)) {}

  [[nodiscard]] const std::vector<std::string>& methods() const noexcept { return methods_; }
  [[nodiscard]] const std::vector<std::string>& column_ids() const noexcept { return order_; }

  void add_column(const std::string& id, std::vector<double> values) {
    if (values.size() != methods_.size()) {
      throw ContractError("column '" + id + "' has " + std::to_string(values.size()) +
                          " entries for " + std::to_string(methods_.size()) + " methods");
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw ContractError("column '" + id + "' holds a non-finite value");
    }
    if (columns_.emplace(id, std::move(values)).second) {
      order_.push_back(id);
    } else {
      throw ContractError("duplicate column '" + id + "'");
    }
  }

  [[nodiscard]] bool has_column(const std::string& id) const { return columns_.contains(id); }

  [[nodiscard]] const std::vector<double>& column(const std::string& id) const {
    auto it = columns_.find(id);
    if (it == columns_.end()) throw ContractError("missing score column '" + id + "'");
    return it->second;
  }

  [[nodiscard]] std::optional<std::size_t> method_index(const std::string& name) const {
    auto it = std::ranges::find(methods_, name);
    if (it == methods_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - methods_.begin());
  }

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;

 private:
  std::vector<std::string> methods_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<double>> columns_;
};

enum class TauVariant { A, B };

/// Pair classification counts underlying Kendall's tau.
struct PairCounts {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_x_only = 0;
  std::int64_t tied_y_only = 0;
  std::int64_t tied_both = 0;
};

namespace detail {

inline std::int64_t tie_pairs(std::span<const double> sorted) {
  std::int64_t pairs = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<std::int64_t>(j - i);
    pairs += t * (t - 1) / 2;
    i = j;
  }
  return pairs;
}

/// Sorts `v` ascending and returns the number of strict inversions.
inline std::int64_t count_inversions(std::vector<double>& v) {
  std::vector<double> buf(v.size());
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, v.size());
      const std::size_t hi = std::min(lo + 2 * width, v.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += static_cast<std::int64_t>(mid - i);
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    std::swap(v, buf);
  }
  return swaps;
}

}  // namespace detail

/// Knight's O(n log n) pair classification.
[[nodiscard]] inline PairCounts kendall_pair_counts(std::span<const double> x,
                                                    std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ContractError("kendall_tau: length mismatch " + std::to_string(x.size()) + " vs " +
                        std::to_string(y.size()));
  }
  if (x.size() < 2) throw ContractError("kendall_tau: need at least two observations");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw ContractError("kendall_tau: non-finite input at index " + std::to_string(i));
    }
  }
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }
  const std::int64_t ties_x = detail::tie_pairs(xs);
  std::int64_t ties_xy = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && xs[j] == xs[i] && ys[j] == ys[i]) ++j;
    const auto t = static_cast<std::int64_t>(j - i);
    ties_xy += t * (t - 1) / 2;
    i = j;
  }
  const std::int64_t discordant = detail::count_inversions(ys);
  const std::int64_t ties_y = detail::tie_pairs(ys);
  const auto total = static_cast<std::int64_t>(n * (n - 1) / 2);

  PairCounts pc;
  pc.discordant = discordant;
  pc.concordant = total - ties_x - ties_y + ties_xy - discordant;
  pc.tied_x_only = ties_x - ties_xy;
  pc.tied_y_only = ties_y - ties_xy;
  pc.tied_both = ties_xy;
  return pc;
}

/// tau-a = (C - D) / (n(n-1)/2); tau-b = (C - D) / sqrt((C+D+Tx)(C+D+Ty)).
/// tau-b is undefined (nullopt) when either input is entirely tied.
[[nodiscard]] inline std::optional<double> tau_from_counts(const PairCounts& pc,
                                                           TauVariant variant) {
  const auto cd = static_cast<double>(pc.concordant - pc.discordant);
  if (variant == TauVariant::A) {
    const auto total = pc.concordant + pc.discordant + pc.tied_x_only + pc.tied_y_only +
                       pc.tied_both;
    return cd / static_cast<double>(total);
  }
  const auto lhs = static_cast<double>(pc.concordant + pc.discordant + pc.tied_x_only);
  const auto rhs = static_cast<double>(pc.concordant + pc.discordant + pc.tied_y_only);
  if (lhs == 0.0 || rhs == 0.0) return std::nullopt;
  return cd / std::sqrt(lhs * rhs);
}

[[nodiscard]] inline std::optional<double> kendall_tau(std::span<const double> x,
                                                       std::span<const double> y,
                                                       TauVariant variant = TauVariant::B) {
  return tau_from_counts(kendall_pair_counts(x, y), variant);
}

/// Negates lower-better columns so that larger always means better.
[[nodiscard]] inline std::vector<double> metric_direction_adjust(MetricId id,
                                                                 std::vector<double> values) {
  if (polarity(id) == Polarity::LowerBetter) {
    for (double& v : values) v = -v;
  }
  return values;
}

/// Direction adjustment by column name; non-metric columns pass through.
[[nodiscard]] inline std::vector<double> column_direction_adjust(const std::string& column,
                                                                 std::vector<double> values) {
  if (auto id = parse_metric(column)) return metric_direction_adjust(*id, std::move(values));
  return values;
}

struct DatasetScores {
  std::string dataset;
  ScoreTable table;
};

struct CorrelationOptions {
  TauVariant variant = TauVariant::B;
  bool include_baselines = false;
  std::vector<std::string> baseline_methods = {"Visible", "Infrared"};
};

struct CorrelationRow {
  std::string dataset;
  std::array<std::optional<double>, kAllMetrics.size()> tau{};
  std::optional<MetricId> best;  // highest tau; earliest column wins ties
};

struct CorrelationTable {
  std::vector<CorrelationRow> rows;
  CorrelationRow mean;
};

namespace detail {

inline std::optional<MetricId> argmax_tau(const CorrelationRow& row) {
  std::optional<MetricId> best;
  double best_value = 0.0;
  for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
    if (row.tau[i] && (!best || *row.tau[i] > best_value)) {
      best = kAllMetrics[i];
      best_value = *row.tau[i];
    }
  }
  return best;
}

}  // namespace detail

/// Per-metric arithmetic mean over rows where tau is defined.
[[nodiscard]] inline CorrelationRow mean_row(std::span<const CorrelationRow> rows,
                                             std::string label = "Mean") {
  CorrelationRow out;
  out.dataset = std::move(label);
  for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : rows) {
      if (r.tau[i]) {
        sum += *r.tau[i];
        ++n;
      }
    }
    if (n > 0) out.tau[i] = sum / n;
  }
  out.best = detail::argmax_tau(out);
  return out;
}

/// Kendall tau between `sea_column` and every direction-adjusted metric
/// column, one row per dataset plus the cross-dataset mean.
[[nodiscard]] inline CorrelationTable correlation_table(std::span<const DatasetScores> datasets,
                                                        const std::string& sea_column,
                                                        const CorrelationOptions& opts = {}) {
  CorrelationTable out;
  for (const auto& ds : datasets) {
    const auto& t = ds.table;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < t.methods().size(); ++i) {
      const bool baseline = std::ranges::find(opts.baseline_methods, t.methods()[i]) !=
                            opts.baseline_methods.end();
      if (opts.include_baselines || !baseline) rows.push_back(i);
    }
    auto pick = [&rows](const std::vector<double>& col) {
      std::vector<double> v;
      v.reserve(rows.size());
      for (auto r : rows) v.push_back(col[r]);
      return v;
    };
    const auto sea = pick(t.column(sea_column));
    CorrelationRow row;
    row.dataset = ds.dataset;
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
      const MetricId id = kAllMetrics[m];
      const auto metric =
          metric_direction_adjust(id, pick(t.column(std::string(metric_name(id)))));
      row.tau[m] = kendall_tau(sea, metric, opts.variant);
    }
    row.best = detail::argmax_tau(row);
    out.rows.push_back(std::move(row));
  }
  out.mean = mean_row(out.rows);
  return out;
}

}  // namespace fusebench
