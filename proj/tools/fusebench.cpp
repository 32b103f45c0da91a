// Command-line front end: fusing, metric and SEA scoring, correlation,
// analyses and report emission over a dataset manifest.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fusebench/harness/benchmark.hpp"
#include "fusebench/harness/synthetic.hpp"

namespace fs = std::filesystem;
using namespace fusebench;
using namespace fusebench::harness;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContract = 1;
constexpr int kExitPartial = 2;

void print_exclusions(const std::string& scope, const std::vector<Exclusion>& ex) {
  for (const auto& e : ex) std::cerr << "excluded [" << scope << "] " << e.pair_id << ": " << e.reason << '\n';
}

std::vector<const MethodEntry*> select_methods(const DatasetManifest& m, const std::string& name) {
  std::vector<const MethodEntry*> out;
  if (name.empty()) {
    for (const auto& e : m.methods) out.push_back(&e);
  } else {
    out.push_back(&m.method(name));
  }
  return out;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
}

DatasetManifest load_checked(const std::string& path) {
  auto m = load_manifest(path);
  for (const auto& p : m.unresolved) std::cerr << "warning: unresolved path " << p << '\n';
  return m;
}

int cmd_fuse(const std::string& manifest_path, const std::string& method, const std::string& out_dir,
             const RunOptions& opts) {
  const auto m = load_checked(manifest_path);
  const auto& entry = m.method(method);
  if (!entry.fuser) throw ContractError("method '" + method + "' reads fused images; nothing to fuse");
  fs::create_directories(out_dir);
  std::vector<std::string> errors(m.pairs.size());
  parallel_for(m.pairs.size(), opts.threads, [&](std::size_t i) {
    try {
      const auto src = load_pair(m.pairs[i]);
      save_png(fs::path(out_dir) / (m.pairs[i].id + ".png"), fuse(*entry.fuser, src.visible, src.infrared));
    } catch (const IoError& e) {
      errors[i] = e.what();
    } catch (const ContractError& e) {
      errors[i] = e.what();
    }
  });
  std::vector<Exclusion> ex;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) ex.push_back({m.pairs[i].id, errors[i]});
  }
  print_exclusions("fuse " + method, ex);
  std::cerr << "wrote " << m.pairs.size() - ex.size() << '/' << m.pairs.size() << " images to " << out_dir << '\n';
  return ex.empty() ? kExitOk : kExitPartial;
}

int cmd_metrics(const std::string& manifest_path, const std::string& method, const std::string& out,
                const RunOptions& opts) {
  const auto m = load_checked(manifest_path);
  std::vector<ConventionalRun> runs;
  bool partial = false;
  for (const auto* e : select_methods(m, method)) {
    runs.push_back(run_conventional(m, *e, opts));
    print_exclusions("metrics " + e->name, runs.back().excluded);
    std::cerr << "metrics " << e->name << ": " << runs.back().per_image.size() << '/' << m.pairs.size() << " pairs\n";
    partial = partial || !runs.back().excluded.empty();
  }
  std::ostringstream s;
  write_score_csv(s, build_score_table(runs, {}, {}));
  write_output(out, s.str());
  return partial ? kExitPartial : kExitOk;
}

int cmd_sea(const std::string& manifest_path, const std::string& method, const std::string& out,
            const std::string& per_class_out, const RunOptions& opts) {
  const auto m = load_checked(manifest_path);
  std::vector<SeaRun> runs;
  std::vector<std::string> predictors;
  for (const auto& p : m.predictors) predictors.push_back(p.name);
  bool partial = false;
  for (const auto* e : select_methods(m, method)) {
    runs.push_back(run_sea(m, e->name, opts));
    for (const auto& ps : runs.back().predictors) {
      print_exclusions("sea " + e->name + "/" + ps.predictor, ps.excluded);
      std::cerr << "sea " << e->name << '/' << ps.predictor << ": " << ps.covered << '/' << m.pairs.size()
                << " pairs\n";
      partial = partial || !ps.excluded.empty();
    }
  }
  std::ostringstream s;
  write_score_csv(s, build_score_table({}, runs, predictors));
  write_output(out, s.str());
  if (!per_class_out.empty()) {
    std::ostringstream c;
    c << "method,predictor,class,iou\n";
    for (const auto& r : runs) {
      for (const auto& ps : r.predictors) {
        if (!ps.score) continue;
        for (std::size_t k = 0; k < m.classes.size(); ++k) {
          const auto& v = ps.score->per_class_iou[k];
          c << r.method << ',' << ps.predictor << ',' << m.classes.name(k) << ','
            << (v ? format_exact(*v) : std::string()) << '\n';
        }
      }
    }
    write_output(per_class_out, c.str());
  }
  return partial ? kExitPartial : kExitOk;
}

int cmd_correlate(const std::vector<std::string>& files, const std::string& sea_column, const std::string& tau,
                  bool include_baselines, const std::string& format, const std::string& out) {
  std::vector<DatasetScores> ds;
  for (const auto& f : files) ds.push_back({fs::path(f).stem().string(), read_score_csv(fs::path(f))});
  CorrelationOptions opts;
  opts.variant = tau == "a" ? TauVariant::A : TauVariant::B;
  opts.include_baselines = include_baselines;
  const auto table = correlation_table(ds, sea_column, opts);
  std::ostringstream s;
  if (format == "csv") {
    write_correlation_csv(s, table);
  } else if (format == "json") {
    s << to_json(table).dump(2) << '\n';
  } else {
    write_correlation_markdown(s, table);
  }
  write_output(out, s.str());
  return kExitOk;
}

int cmd_vis_ir(const std::string& manifest_path, const std::string& visible, const std::string& infrared,
               const std::string& out, const RunOptions& opts) {
  const auto m = load_checked(manifest_path);
  const auto r = analyze_vis_ir_diff(m, visible, infrared, opts);
  std::ostringstream s;
  s << "pair_id,diff\n";
  for (const auto& d : r.diffs) s << d.pair_id << ',' << format_exact(d.diff) << '\n';
  write_output(out, s.str());
  print_exclusions("vis-ir-diff", r.excluded);
  std::cerr << "infrared better on " << r.positive << '/' << r.diffs.size() << " images, fraction "
            << format_exact(r.fraction_positive) << '\n';
  return r.excluded.empty() ? kExitOk : kExitPartial;
}

int cmd_class_improvement(const std::string& manifest_path, const std::string& method, const std::string& baseline,
                          const std::string& out, const RunOptions& opts) {
  const auto m = load_checked(manifest_path);
  const auto run = run_sea(m, method, opts);
  const auto base = run_sea(m, baseline, opts);
  std::ostringstream s;
  s << "class,delta\n";
  for (const auto& d : analyze_class_improvement(run, base, m.classes)) {
    s << d.class_name << ',' << (d.delta ? format_exact(*d.delta) : std::string()) << '\n';
    if (!d.delta) std::cerr << "note: class '" << d.class_name << "' undefined in both runs\n";
  }
  write_output(out, s.str());
  bool partial = false;
  for (const auto* r : {&run, &base}) {
    for (const auto& ps : r->predictors) {
      print_exclusions("sea " + r->method + "/" + ps.predictor, ps.excluded);
      partial = partial || !ps.excluded.empty();
    }
  }
  return partial ? kExitPartial : kExitOk;
}

int cmd_improvement_count(const std::string& scores, const std::string& baseline, const std::string& out) {
  std::ostringstream s;
  s << "column,count\n";
  for (const auto& c : count_improvements(read_score_csv(fs::path(scores)), baseline)) {
    s << c.column << ',' << c.count << '\n';
  }
  write_output(out, s.str());
  return kExitOk;
}

int cmd_report(const std::string& manifest_path, const std::string& formats, const std::string& out_dir,
               const std::string& tau, bool include_baselines, const RunOptions& opts) {
  std::vector<ReportFormat> fmts;
  std::stringstream ss(formats);
  for (std::string f; std::getline(ss, f, ',');) {
    const auto parsed = parse_format(f);
    if (!parsed) throw ContractError("unknown report format '" + f + "'");
    fmts.push_back(*parsed);
  }
  const auto m = load_checked(manifest_path);
  BenchmarkOptions bo;
  bo.run = opts;
  bo.correlation.variant = tau == "a" ? TauVariant::A : TauVariant::B;
  bo.correlation.include_baselines = include_baselines;
  const auto report = run_benchmark(m, bo);
  for (const auto& f : emit_report(report, fmts, out_dir)) std::cerr << "wrote " << f.string() << '\n';
  for (const auto& c : report.coverage) {
    print_exclusions(c.kind + " " + c.method + (c.predictor.empty() ? "" : "/" + c.predictor), c.excluded);
  }
  if (report.vis_ir) print_exclusions("vis-ir-diff", report.vis_ir->excluded);
  return report.partial() ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visible/infrared fusion benchmark: conventional metrics, segmentation-based scoring and rank correlation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "fusebench 0.1.0");

  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: FUSEBENCH_THREADS or all cores)");

  std::string manifest, method, out, format, tau = "b", sea_column = "SEA_mean", baseline = "Visible",
                                          infrared = "Infrared", per_class;
  std::vector<std::string> scores;
  bool include_baselines = false;
  int synth_pairs = 6, synth_size = 64;
  const auto tau_check = CLI::IsMember({"a", "b"});

  auto* fuse_cmd = app.add_subcommand("fuse", "Write fused images of one built-in method");
  fuse_cmd->add_option("--manifest", manifest)->required();
  fuse_cmd->add_option("--method", method)->required();
  fuse_cmd->add_option("--out", out, "Output directory")->required();

  auto* metrics_cmd = app.add_subcommand("metrics", "Dataset means of the 15 conventional metrics, as CSV");
  metrics_cmd->add_option("--manifest", manifest)->required();
  metrics_cmd->add_option("--method", method, "Single method (default: all)");
  metrics_cmd->add_option("--out", out, "Output file (default: stdout)");

  auto* sea_cmd = app.add_subcommand("sea", "Pooled mIoU per predictor and their mean, as CSV");
  sea_cmd->add_option("--manifest", manifest)->required();
  sea_cmd->add_option("--method", method, "Single method (default: all)");
  sea_cmd->add_option("--out", out, "Output file (default: stdout)");
  sea_cmd->add_option("--per-class", per_class, "Also write per-class IoU CSV to this file");

  auto* corr_cmd = app.add_subcommand("correlate", "Kendall tau between SEA and each metric");
  corr_cmd->add_option("--scores", scores, "Score CSV, one per dataset")->required()->check(CLI::ExistingFile);
  corr_cmd->add_option("--sea-column", sea_column);
  corr_cmd->add_option("--tau", tau, "Tau variant")->check(tau_check);
  corr_cmd->add_flag("--include-baselines", include_baselines, "Keep Visible/Infrared rows");
  corr_cmd->add_option("--format", format, "csv, json or md")->check(CLI::IsMember({"csv", "json", "md"}))->default_val("md");
  corr_cmd->add_option("--out", out, "Output file (default: stdout)");

  auto* analyze_cmd = app.add_subcommand("analyze", "Figure-ready analyses");
  analyze_cmd->require_subcommand(1);
  auto* visir_cmd = analyze_cmd->add_subcommand("vis-ir-diff", "Per-image mIoU(infrared) - mIoU(visible)");
  visir_cmd->add_option("--manifest", manifest)->required();
  visir_cmd->add_option("--visible", baseline);
  visir_cmd->add_option("--infrared", infrared);
  visir_cmd->add_option("--out", out);
  auto* class_cmd = analyze_cmd->add_subcommand("class-improvement", "Per-class IoU change against a baseline");
  class_cmd->add_option("--manifest", manifest)->required();
  class_cmd->add_option("--method", method)->required();
  class_cmd->add_option("--baseline", baseline);
  class_cmd->add_option("--out", out);
  auto* count_cmd = analyze_cmd->add_subcommand("improvement-count", "Methods beating the baseline, per metric");
  count_cmd->add_option("--scores", scores, "Score CSV")->required()->expected(1)->check(CLI::ExistingFile);
  count_cmd->add_option("--baseline", baseline);
  count_cmd->add_option("--out", out);

  auto* report_cmd = app.add_subcommand("report", "Full pipeline and report files");
  report_cmd->add_option("--manifest", manifest)->required();
  report_cmd->add_option("--format", format, "Comma-separated: csv,json,md")->default_val("csv,json,md");
  report_cmd->add_option("--out", out, "Output directory")->required();
  report_cmd->add_option("--tau", tau, "Tau variant")->check(tau_check);
  report_cmd->add_flag("--include-baselines", include_baselines, "Keep Visible/Infrared rows in the correlation");

  auto* synth_cmd = app.add_subcommand("synth", "Write the bundled synthetic dataset");
  synth_cmd->add_option("--out", out, "Output directory")->required();
  synth_cmd->add_option("--pairs", synth_pairs)->check(CLI::Range(1, 1000));
  synth_cmd->add_option("--size", synth_size)->check(CLI::Range(16, 4096));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitContract;
  }

  RunOptions opts;
  if (threads > 0) opts.threads = threads;

  try {
    if (*fuse_cmd) return cmd_fuse(manifest, method, out, opts);
    if (*metrics_cmd) return cmd_metrics(manifest, method, out, opts);
    if (*sea_cmd) return cmd_sea(manifest, method, out, per_class, opts);
    if (*corr_cmd) return cmd_correlate(scores, sea_column, tau, include_baselines, format, out);
    if (*visir_cmd) return cmd_vis_ir(manifest, baseline, infrared, out, opts);
    if (*class_cmd) return cmd_class_improvement(manifest, method, baseline, out, opts);
    if (*count_cmd) return cmd_improvement_count(scores.at(0), baseline, out);
    if (*report_cmd) return cmd_report(manifest, format, out, tau, include_baselines, opts);
    if (*synth_cmd) {
      const auto path = write_synthetic_dataset(out, synth_pairs, synth_size);
      std::cerr << "wrote " << path.string() << '\n';
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  }
  return kExitOk;
}
