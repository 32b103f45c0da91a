#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fusebench/harness/analysis.hpp"
#include "fusebench/harness/pipeline.hpp"
#include "fusebench/rank_correlation.hpp"

namespace fusebench::harness {

/// Pairs left out of one analysis for one method (and predictor, for SEA).
struct CoverageLine {
  std::string kind;  // "metrics" or "sea"
  std::string method;
  std::string predictor;
  std::size_t covered = 0;
  std::size_t total = 0;
  std::vector<Exclusion> excluded;
};

struct ClassImprovementBlock {
  std::string method;
  std::string baseline;
  std::vector<ClassDelta> deltas;
};

struct Report {
  std::string dataset;
  std::vector<std::string> predictors;
  ScoreTable scores;
  std::optional<CorrelationTable> correlation;
  std::optional<VisIrDiff> vis_ir;
  std::vector<ClassImprovementBlock> class_improvement;
  std::vector<ImprovementCount> improvement_counts;
  std::vector<CoverageLine> coverage;

  [[nodiscard]] bool partial() const {
    for (const auto& c : coverage) {
      if (!c.excluded.empty()) return true;
    }
    return vis_ir && !vis_ir->excluded.empty();
  }
};

enum class ReportFormat { Csv, Json, Markdown };

[[nodiscard]] inline std::optional<ReportFormat> parse_format(std::string_view s) noexcept {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  if (s == "md" || s == "markdown") return ReportFormat::Markdown;
  return std::nullopt;
}

/// Shortest decimal text that parses back to exactly `v`.
[[nodiscard]] inline std::string format_exact(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

[[nodiscard]] inline double parse_exact(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ContractError(where + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

[[nodiscard]] inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

[[nodiscard]] inline bool is_sea_column(const std::string& id) { return id.rfind("SEA_", 0) == 0; }

/// Table of methods with the metric means in canonical order, then
/// `SEA_<predictor>` columns and `SEA_mean`. SEA values are mIoU fractions.
/// A method whose run produced no value for some column is rejected.
[[nodiscard]] inline ScoreTable build_score_table(const std::vector<ConventionalRun>& conventional,
                                                  const std::vector<SeaRun>& sea,
                                                  const std::vector<std::string>& predictors) {
  std::vector<std::string> methods;
  const bool have_metrics = !conventional.empty();
  const bool have_sea = !sea.empty();
  if (have_metrics) {
    for (const auto& r : conventional) methods.push_back(r.method);
  } else {
    for (const auto& r : sea) methods.push_back(r.method);
  }
  if (have_metrics && have_sea && sea.size() != conventional.size()) {
    throw ContractError("metric and SEA runs cover different method lists");
  }
  ScoreTable t(methods);
  if (have_metrics) {
    for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
      std::vector<double> col;
      for (const auto& r : conventional) {
        if (!r.mean) throw ContractError("method '" + r.method + "' has no evaluable pair");
        col.push_back((*r.mean)[k]);
      }
      t.add_column(std::string(metric_name(kAllMetrics[k])), std::move(col));
    }
  }
  if (have_sea) {
    for (std::size_t p = 0; p < predictors.size(); ++p) {
      std::vector<double> col;
      for (std::size_t m = 0; m < sea.size(); ++m) {
        if (sea[m].method != methods[m]) throw ContractError("SEA run order differs from metric runs");
        const auto& ps = sea[m].predictors.at(p);
        if (!ps.score) {
          throw ContractError("predictor '" + ps.predictor + "' scored nothing for '" + sea[m].method + "'");
        }
        col.push_back(ps.score->miou);
      }
      t.add_column("SEA_" + predictors[p], std::move(col));
    }
    std::vector<double> mean;
    for (const auto& r : sea) mean.push_back(*r.mean);
    t.add_column("SEA_mean", std::move(mean));
  }
  return t;
}

// ---- CSV ---------------------------------------------------------------

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Splits one CSV record; handles quoted fields with doubled quotes.
inline std::vector<std::string> csv_split(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ContractError("CSV line " + std::to_string(line_no) + ": unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

}  // namespace detail

inline void write_score_csv(std::ostream& out, const ScoreTable& t) {
  out << "method";
  for (const auto& id : t.column_ids()) out << ',' << detail::csv_field(id);
  out << '\n';
  for (std::size_t r = 0; r < t.methods().size(); ++r) {
    out << detail::csv_field(t.methods()[r]);
    for (const auto& id : t.column_ids()) out << ',' << format_exact(t.column(id)[r]);
    out << '\n';
  }
}

[[nodiscard]] inline ScoreTable read_score_csv(std::istream& in, const std::string& source = "scores") {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<std::string>> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    records.push_back(detail::csv_split(line, line_no));
  }
  if (records.empty()) throw ContractError(source + ": empty score file");
  const auto& header = records.front();
  if (header.empty() || header[0] != "method") {
    throw ContractError(source + ": first column must be 'method'");
  }
  std::vector<std::string> methods;
  std::vector<std::vector<double>> cols(header.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) {
      throw ContractError(source + ": row " + std::to_string(r + 1) + " has " +
                          std::to_string(rec.size()) + " fields, header has " +
                          std::to_string(header.size()));
    }
    methods.push_back(rec[0]);
    for (std::size_t c = 1; c < rec.size(); ++c) {
      cols[c - 1].push_back(parse_exact(rec[c], source + " row " + std::to_string(r + 1) + " column '" + header[c] + "'"));
    }
  }
  ScoreTable t(methods);
  for (std::size_t c = 1; c < header.size(); ++c) t.add_column(header[c], std::move(cols[c - 1]));
  return t;
}

[[nodiscard]] inline ScoreTable read_score_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open score file '" + path.string() + "'");
  return read_score_csv(in, path.string());
}

inline void write_correlation_csv(std::ostream& out, const CorrelationTable& t) {
  out << "dataset";
  for (MetricId id : kAllMetrics) out << ',' << metric_name(id);
  out << ",best\n";
  auto row = [&out](const CorrelationRow& r) {
    out << detail::csv_field(r.dataset);
    for (const auto& v : r.tau) out << ',' << (v ? format_exact(*v) : std::string());
    out << ',' << (r.best ? std::string(metric_name(*r.best)) : std::string()) << '\n';
  };
  for (const auto& r : t.rows) row(r);
  row(t.mean);
}

// ---- JSON --------------------------------------------------------------

[[nodiscard]] inline nlohmann::ordered_json to_json(const ScoreTable& t) {
  nlohmann::ordered_json j;
  j["methods"] = t.methods();
  j["columns"] = nlohmann::ordered_json::array();
  for (const auto& id : t.column_ids()) {
    j["columns"].push_back({{"id", id}, {"values", t.column(id)}});
  }
  return j;
}

[[nodiscard]] inline ScoreTable score_table_from_json(const nlohmann::ordered_json& j) {
  try {
    ScoreTable t(j.at("methods").get<std::vector<std::string>>());
    for (const auto& c : j.at("columns")) {
      t.add_column(c.at("id").get<std::string>(), c.at("values").get<std::vector<double>>());
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("score table JSON: ") + e.what());
  }
}

[[nodiscard]] inline nlohmann::ordered_json to_json(const CorrelationRow& r) {
  nlohmann::ordered_json j;
  j["dataset"] = r.dataset;
  nlohmann::ordered_json tau = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
    tau[std::string(metric_name(kAllMetrics[i]))] = r.tau[i] ? nlohmann::ordered_json(*r.tau[i]) : nullptr;
  }
  j["tau"] = tau;
  j["best"] = r.best ? nlohmann::ordered_json(std::string(metric_name(*r.best))) : nullptr;
  return j;
}

[[nodiscard]] inline nlohmann::ordered_json to_json(const CorrelationTable& t) {
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) j["rows"].push_back(to_json(r));
  j["mean"] = to_json(t.mean);
  return j;
}

namespace detail {

inline nlohmann::ordered_json exclusions_json(const std::vector<Exclusion>& ex) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& e : ex) j.push_back({{"pair_id", e.pair_id}, {"reason", e.reason}});
  return j;
}

}  // namespace detail

[[nodiscard]] inline nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["dataset"] = r.dataset;
  j["predictors"] = r.predictors;
  j["scores"] = to_json(r.scores);
  j["correlation"] = r.correlation ? to_json(*r.correlation) : nlohmann::ordered_json(nullptr);
  if (r.vis_ir) {
    nlohmann::ordered_json v;
    v["diffs"] = nlohmann::ordered_json::array();
    for (const auto& d : r.vis_ir->diffs) v["diffs"].push_back({{"pair_id", d.pair_id}, {"diff", d.diff}});
    v["positive"] = r.vis_ir->positive;
    v["fraction_positive"] = r.vis_ir->fraction_positive;
    v["excluded"] = detail::exclusions_json(r.vis_ir->excluded);
    j["vis_ir_diff"] = v;
  } else {
    j["vis_ir_diff"] = nullptr;
  }
  j["class_improvement"] = nlohmann::ordered_json::array();
  for (const auto& b : r.class_improvement) {
    nlohmann::ordered_json deltas = nlohmann::ordered_json::array();
    for (const auto& d : b.deltas) {
      deltas.push_back({{"class", d.class_name},
                        {"delta", d.delta ? nlohmann::ordered_json(*d.delta) : nullptr}});
    }
    j["class_improvement"].push_back({{"method", b.method}, {"baseline", b.baseline}, {"deltas", deltas}});
  }
  j["improvement_counts"] = nlohmann::ordered_json::array();
  for (const auto& c : r.improvement_counts) {
    j["improvement_counts"].push_back({{"column", c.column}, {"count", c.count}});
  }
  j["coverage"] = nlohmann::ordered_json::array();
  for (const auto& c : r.coverage) {
    j["coverage"].push_back({{"kind", c.kind},
                             {"method", c.method},
                             {"predictor", c.predictor},
                             {"covered", c.covered},
                             {"total", c.total},
                             {"excluded", detail::exclusions_json(c.excluded)}});
  }
  return j;
}

// ---- Markdown ----------------------------------------------------------

namespace detail {

enum class Mark { None, Best, Second };

/// Best/second-best per column over the rows in `ranked`, direction
/// adjusted. Ties for best are all best and suppress second-best.
inline std::vector<Mark> rank_marks(const std::vector<double>& adjusted, const std::vector<bool>& ranked) {
  std::vector<Mark> marks(adjusted.size(), Mark::None);
  std::set<double, std::greater<>> distinct;
  for (std::size_t i = 0; i < adjusted.size(); ++i) {
    if (ranked[i]) distinct.insert(adjusted[i]);
  }
  if (distinct.empty()) return marks;
  const double best = *distinct.begin();
  const auto best_count = std::count_if(adjusted.begin(), adjusted.end(), [&](double v) { return v == best; });
  std::optional<double> second;
  if (best_count == 1 && distinct.size() > 1) second = *std::next(distinct.begin());
  for (std::size_t i = 0; i < adjusted.size(); ++i) {
    if (!ranked[i]) continue;
    if (adjusted[i] == best) marks[i] = Mark::Best;
    else if (second && adjusted[i] == *second) marks[i] = Mark::Second;
  }
  return marks;
}

inline std::string decorate(const std::string& s, Mark m) {
  switch (m) {
    case Mark::Best: return "**" + s + "**";
    case Mark::Second: return "<u>" + s + "</u>";
    case Mark::None: break;
  }
  return s;
}

}  // namespace detail

/// Metric columns with 3 decimals, SEA columns as percent with 1 decimal.
/// Baseline rows are shown but not ranked. When a Visible row and SEA_mean
/// exist, a final column flags methods beating Visible by more than 1.0 mIoU.
inline void write_score_markdown(std::ostream& out, const ScoreTable& t,
                                 const std::vector<std::string>& baselines = {"Visible", "Infrared"}) {
  const auto& ids = t.column_ids();
  const auto n = t.methods().size();
  std::vector<bool> ranked(n);
  for (std::size_t r = 0; r < n; ++r) {
    ranked[r] = std::ranges::find(baselines, t.methods()[r]) == baselines.end();
  }
  const auto visible = t.method_index("Visible");
  const bool flag = visible && t.has_column("SEA_mean");

  out << "| method |";
  for (const auto& id : ids) out << ' ' << id << " |";
  if (flag) out << " SEA > Visible + 1.0 |";
  out << "\n|---|";
  for (std::size_t c = 0; c < ids.size(); ++c) out << "---:|";
  if (flag) out << ":---:|";
  out << '\n';

  std::vector<std::vector<detail::Mark>> marks;
  for (const auto& id : ids) marks.push_back(detail::rank_marks(column_direction_adjust(id, t.column(id)), ranked));
  for (std::size_t r = 0; r < n; ++r) {
    out << "| " << t.methods()[r] << " |";
    for (std::size_t c = 0; c < ids.size(); ++c) {
      const double v = t.column(ids[c])[r];
      const auto text = is_sea_column(ids[c]) ? format_fixed(100.0 * v, 1) : format_fixed(v, 3);
      out << ' ' << detail::decorate(text, marks[c][r]) << " |";
    }
    if (flag) {
      const auto& sea = t.column("SEA_mean");
      const bool gain = r != *visible && 100.0 * (sea[r] - sea[*visible]) > 1.0;
      out << (gain ? " yes |" : "  |");
    }
    out << '\n';
  }
}

inline void write_correlation_markdown(std::ostream& out, const CorrelationTable& t) {
  out << "| dataset |";
  for (MetricId id : kAllMetrics) out << ' ' << metric_name(id) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < kAllMetrics.size(); ++i) out << "---:|";
  out << '\n';
  auto row = [&out](const CorrelationRow& r) {
    out << "| " << r.dataset << " |";
    for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
      if (!r.tau[i]) {
        out << " n/a |";
        continue;
      }
      const auto text = format_fixed(*r.tau[i], 3);
      out << ' ' << (r.best == kAllMetrics[i] ? "**" + text + "**" : text) << " |";
    }
    out << '\n';
  };
  for (const auto& r : t.rows) row(r);
  row(t.mean);
}

inline void write_report_markdown(std::ostream& out, const Report& r) {
  out << "# Benchmark report: " << r.dataset << "\n\n";
  out << "## Scores\n\n";
  write_score_markdown(out, r.scores);
  if (r.correlation) {
    out << "\n## Kendall tau against SEA\n\n";
    write_correlation_markdown(out, *r.correlation);
  }
  if (r.vis_ir) {
    out << "\n## Infrared minus visible, per image\n\n";
    out << "Infrared better on " << r.vis_ir->positive << " of " << r.vis_ir->diffs.size()
        << " images (" << format_fixed(100.0 * r.vis_ir->fraction_positive, 1) << "%).\n\n";
    out << "| pair | mIoU diff |\n|---|---:|\n";
    for (const auto& d : r.vis_ir->diffs) out << "| " << d.pair_id << " | " << format_fixed(100.0 * d.diff, 1) << " |\n";
  }
  if (!r.class_improvement.empty()) {
    out << "\n## Per-class IoU change\n\n";
    for (const auto& b : r.class_improvement) {
      out << "### " << b.method << " vs " << b.baseline << "\n\n| class | IoU change |\n|---|---:|\n";
      for (const auto& d : b.deltas) {
        out << "| " << d.class_name << " | " << (d.delta ? format_fixed(100.0 * *d.delta, 1) : "undefined in both runs")
            << " |\n";
      }
      out << '\n';
    }
  }
  if (!r.improvement_counts.empty()) {
    out << "\n## Methods improving on Visible\n\n| column | count |\n|---|---:|\n";
    for (const auto& c : r.improvement_counts) out << "| " << c.column << " | " << c.count << " |\n";
  }
  out << "\n## Coverage\n\n";
  for (const auto& c : r.coverage) {
    out << "- " << c.kind << ' ' << c.method;
    if (!c.predictor.empty()) out << " / " << c.predictor;
    out << ": " << c.covered << '/' << c.total << " pairs";
    for (const auto& e : c.excluded) out << "\n  - excluded " << e.pair_id << ": " << e.reason;
    out << '\n';
  }
  if (r.vis_ir) {
    for (const auto& e : r.vis_ir->excluded) out << "- vis-ir-diff excluded " << e.pair_id << ": " << e.reason << '\n';
  }
}

// ---- Files -------------------------------------------------------------

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace detail

/// Writes the requested formats into `out_dir`; returns the files written.
inline std::vector<std::filesystem::path> emit_report(const Report& r,
                                                      const std::vector<ReportFormat>& formats,
                                                      const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& content) {
    detail::write_file(out_dir / name, content);
    written.push_back(out_dir / name);
  };
  for (auto f : formats) {
    switch (f) {
      case ReportFormat::Csv: {
        std::ostringstream s;
        write_score_csv(s, r.scores);
        put("scores.csv", s.str());
        if (r.correlation) {
          std::ostringstream c;
          write_correlation_csv(c, *r.correlation);
          put("correlation.csv", c.str());
        }
        if (r.vis_ir) {
          std::ostringstream v;
          v << "pair_id,diff\n";
          for (const auto& d : r.vis_ir->diffs) v << detail::csv_field(d.pair_id) << ',' << format_exact(d.diff) << '\n';
          put("vis_ir_diff.csv", v.str());
        }
        if (!r.class_improvement.empty()) {
          std::ostringstream c;
          c << "method,baseline,class,delta\n";
          for (const auto& b : r.class_improvement) {
            for (const auto& d : b.deltas) {
              c << detail::csv_field(b.method) << ',' << detail::csv_field(b.baseline) << ','
                << detail::csv_field(d.class_name) << ',' << (d.delta ? format_exact(*d.delta) : "") << '\n';
            }
          }
          put("class_improvement.csv", c.str());
        }
        if (!r.improvement_counts.empty()) {
          std::ostringstream c;
          c << "column,count\n";
          for (const auto& x : r.improvement_counts) c << x.column << ',' << x.count << '\n';
          put("improvement_counts.csv", c.str());
        }
        std::ostringstream cov;
        cov << "kind,method,predictor,covered,total\n";
        for (const auto& c : r.coverage) {
          cov << c.kind << ',' << detail::csv_field(c.method) << ',' << detail::csv_field(c.predictor) << ','
              << c.covered << ',' << c.total << '\n';
        }
        put("coverage.csv", cov.str());
        break;
      }
      case ReportFormat::Json: put("report.json", to_json(r).dump(2) + "\n"); break;
      case ReportFormat::Markdown: {
        std::ostringstream s;
        write_report_markdown(s, r);
        put("report.md", s.str());
        break;
      }
    }
  }
  return written;
}

}  // namespace fusebench::harness
