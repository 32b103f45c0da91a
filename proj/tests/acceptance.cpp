// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fusebench/harness/benchmark.hpp"
#include "fusebench/harness/synthetic.hpp"
#include "fusebench/metrics.hpp"
#include "harness_support.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fusebench;
using namespace fusebench::harness;
using fusebench::testing::add_noise;
using fusebench::testing::random_plane;
using fusebench::testing::scene_plane;
using fusebench::testing::temp_dir;

namespace {

/// Collects failed sub-checks of one criterion.
struct Check {
  std::vector<std::string> failures;
  std::string notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double value_of(const std::vector<MetricResult>& r, MetricId id) { return r[static_cast<std::size_t>(id)].value; }

int g_failed = 0;

void run(const std::string& name, double time_limit_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0 && secs >= time_limit_s) {
    c.failures.push_back("took " + fmt(secs, 3) + " s, limit " + fmt(time_limit_s) + " s");
  }
  const bool ok = c.failures.empty();
  if (!ok) ++g_failed;
  std::printf("[%s] %s (%.2f s)", ok ? "PASS" : "FAIL", name.c_str(), secs);
  if (!c.notes.empty()) std::printf(": %s", c.notes.c_str());
  std::printf("\n");
  const std::size_t shown = std::min<std::size_t>(c.failures.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) std::printf("       - %s\n", c.failures[i].c_str());
  if (c.failures.size() > shown) std::printf("       - ... %zu more\n", c.failures.size() - shown);
}

void identity_suite(Check& c) {
  double qabf_max = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = random_plane(64, 64, 1000 + seed);
    const auto r = evaluate_all(p, p, p);
    const auto tag = " (plane " + std::to_string(seed) + ")";
    c.expect(value_of(r, MetricId::PSNR) == 100.0, "PSNR=" + fmt(value_of(r, MetricId::PSNR)) + tag);
    c.expect(std::abs(value_of(r, MetricId::SSIM) - 2.0) <= 1e-9, "SSIM=" + fmt(value_of(r, MetricId::SSIM), 12) + tag);
    c.expect(std::abs(value_of(r, MetricId::QVIFF) - 1.0) <= 1e-6, "Q_VIFF=" + fmt(value_of(r, MetricId::QVIFF), 10) + tag);
    c.expect(std::abs(value_of(r, MetricId::QCV)) <= 1e-6, "Q_CV=" + fmt(value_of(r, MetricId::QCV), 10) + tag);
    c.expect(std::abs(value_of(r, MetricId::FMI) - 1.0) <= 1e-9, "FMI=" + fmt(value_of(r, MetricId::FMI), 12) + tag);
    c.expect(std::abs(value_of(r, MetricId::QC) - 1.0) <= 1e-6, "Q_C=" + fmt(value_of(r, MetricId::QC), 10) + tag);
    c.expect(std::abs(value_of(r, MetricId::CC) - 1.0) <= 1e-9, "CC=" + fmt(value_of(r, MetricId::CC), 12) + tag);
    const double qabf = value_of(r, MetricId::QABF);
    qabf_max = std::max(qabf_max, qabf);
    c.expect(qabf >= 0.98, "Q_ABF=" + fmt(qabf) + " < 0.98" + tag);
  }
  c.notes = "20 planes 64x64, max Q_ABF " + fmt(qabf_max);
}

void bounds_suite(Check& c) {
  struct Bound {
    MetricId id;
    double lo, hi;
    bool lo_open;
  };
  const double inf = INFINITY;
  const Bound bounds[] = {{MetricId::EN, 0, 8, false},     {MetricId::MI, 0, inf, false},
                          {MetricId::FMI, 0, 1, false},    {MetricId::PSNR, 0, 100, true},
                          {MetricId::AG, 0, inf, false},   {MetricId::QABF, 0, 1, false},
                          {MetricId::SD, 0, inf, false},   {MetricId::SF, 0, inf, false},
                          {MetricId::QC, 0, 1, false},     {MetricId::SCD, -2, 2, false},
                          {MetricId::CC, -1, 1, false},    {MetricId::SSIM, -2, 2, false},
                          {MetricId::QCB, 0, 1, false},    {MetricId::QCV, 0, inf, false},
                          {MetricId::QVIFF, 0, inf, false}};
  std::mt19937_64 rng(77);
  for (int i = 0; i < 200; ++i) {
    // Mix pure noise with structured and narrow-range planes.
    auto plane = [&](std::uint64_t s) {
      switch (rng() % 3) {
        case 0: return random_plane(32, 32, s);
        case 1: return scene_plane(32, 32, s);
        default: {
          const int lo = static_cast<int>(rng() % 200);
          return random_plane(32, 32, s, lo, lo + 1 + static_cast<int>(rng() % 55));
        }
      }
    };
    const auto f = plane(rng()), a = plane(rng()), b = plane(rng());
    const auto r = evaluate_all(f, a, b);
    for (const auto& bd : bounds) {
      const double v = value_of(r, bd.id);
      const bool ok = std::isfinite(v) && (bd.lo_open ? v > bd.lo : v >= bd.lo) && v <= bd.hi;
      c.expect(ok, std::string(metric_name(bd.id)) + "=" + fmt(v) + " on triple " + std::to_string(i));
    }
  }
  c.notes = "200 triples 32x32";
}

void oracle_suite(Check& c) {
  double mi_err = 0.0, ssim_err = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const int n = s % 2 == 0 ? 8 : 32;
    const auto f = random_plane(n, n, 3 * s), a = random_plane(n, n, 3 * s + 1), b = random_plane(n, n, 3 * s + 2, 40, 90);
    const double mi = mutual_information(to_float(f), to_float(a), to_float(b)).value;
    mi_err = std::max(mi_err, std::abs(mi - (oracle::mutual_information(f, a) + oracle::mutual_information(f, b))));
    ssim_err = std::max(ssim_err, std::abs(ssim_index(to_float(f), to_float(a)) - oracle::ssim(f, a)));
  }
  c.expect(mi_err <= 1e-12, "MI max error " + fmt(mi_err));
  c.expect(ssim_err <= 1e-9, "SSIM max error " + fmt(ssim_err));

  int tau_mismatch = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    std::mt19937_64 rng(500 + s);
    const std::size_t n = 2 + rng() % 49;
    const std::uint64_t levels = s % 2 == 0 ? 4 : 1000000;  // tied and untied
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = static_cast<double>(rng() % levels);
    for (auto& v : y) v = static_cast<double>(rng() % levels);
    if (kendall_tau(x, y) != oracle::tau_b(x, y)) ++tau_mismatch;
  }
  c.expect(tau_mismatch == 0, std::to_string(tau_mismatch) + " tau-b mismatches");

  const SegMask pred{2, 2, {0, 0, 1, 1}}, gt{2, 2, {0, 1, 1, 1}};
  const auto score = compute_score(accumulate(ConfusionMatrix(2), pred, gt));
  c.expect(score.miou == 7.0 / 12.0, "worked mIoU " + fmt(score.miou, 17));
  c.notes = "MI err " + fmt(mi_err, 3) + ", SSIM err " + fmt(ssim_err, 3) + ", 50 tau vectors, mIoU " + fmt(score.miou, 17);
}

void degradation_suite(Check& c) {
  const double amps[] = {4, 16, 64};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = scene_plane(64, 64, 200 + seed);
    std::vector<std::vector<MetricResult>> r;
    for (double amp : amps) r.push_back(evaluate_all(add_noise(a, amp, 900 + seed), a, a));
    for (MetricId id : {MetricId::QABF, MetricId::SSIM, MetricId::QVIFF, MetricId::FMI, MetricId::QCV}) {
      const double v0 = value_of(r[0], id), v1 = value_of(r[1], id), v2 = value_of(r[2], id);
      const bool ok = id == MetricId::QCV ? (v0 < v1 && v1 < v2) : (v0 > v1 && v1 > v2);
      c.expect(ok, std::string(metric_name(id)) + " seed " + std::to_string(seed) + ": " + fmt(v0) + ", " +
                       fmt(v1) + ", " + fmt(v2));
    }
  }
  c.notes = "10 seeds x amplitudes {4,16,64}";
}

std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

void sea_aggregation(Check& c) {
  const auto vis = aggregate_predictors({{"SEEM", 50.5}, {"X-Decoder", 50.7}, {"G-SAM", 51.5}});
  const auto sdc = aggregate_predictors({{"SEEM", 52.0}, {"X-Decoder", 52.6}, {"G-SAM", 52.7}});
  c.expect(one_decimal(vis) == "50.9", "Visible mean " + one_decimal(vis));
  c.expect(one_decimal(sdc) == "52.4", "SDCFusion mean " + one_decimal(sdc));
  c.notes = one_decimal(vis) + ", " + one_decimal(sdc);
}

void correlation_arithmetic(Check& c) {
  const auto qabf = static_cast<std::size_t>(MetricId::QABF), qviff = static_cast<std::size_t>(MetricId::QVIFF);
  CorrelationRow fmb, mvseg;
  fmb.dataset = "FMB";
  mvseg.dataset = "MVSeg";
  fmb.tau[qabf] = 0.503;
  mvseg.tau[qabf] = 0.357;
  fmb.tau[qviff] = 0.382;
  mvseg.tau[qviff] = 0.386;
  const std::vector<CorrelationRow> rows{fmb, mvseg};
  const auto mean = mean_row(rows);
  char a[16], b[16];
  std::snprintf(a, sizeof a, "%.3f", *mean.tau[qabf]);
  std::snprintf(b, sizeof b, "%.3f", *mean.tau[qviff]);
  c.expect(std::string(a) == "0.430", std::string("Q_ABF mean ") + a);
  c.expect(std::string(b) == "0.384", std::string("Q_VIFF mean ") + b);

  std::vector<std::string> methods;
  for (int i = 0; i < 10; ++i) methods.push_back("method" + std::to_string(i));
  ScoreTable t(methods);
  std::mt19937_64 rng(11);
  std::vector<double> sea(10);
  for (int i = 0; i < 10; ++i) sea[i] = 0.30 + 0.03 * i + 0.001 * static_cast<double>(rng() % 10);
  for (MetricId id : kAllMetrics) {
    std::vector<double> col(10);
    for (int i = 0; i < 10; ++i) {
      if (id == MetricId::SF) col[i] = std::exp(4.0 * sea[i]);              // strictly increasing in SEA
      else if (id == MetricId::QCV) col[i] = 500.0 - 300.0 * sea[i];       // anti-correlated raw column
      else col[i] = static_cast<double>(rng() % 1000) / 7.0;
    }
    t.add_column(std::string(metric_name(id)), col);
  }
  t.add_column("SEA_mean", sea);
  const std::vector<DatasetScores> ds{{"synthetic", t}};
  const auto table = correlation_table(ds, "SEA_mean");
  const auto sf_tau = table.rows[0].tau[static_cast<std::size_t>(MetricId::SF)];
  const auto qcv_tau = table.rows[0].tau[static_cast<std::size_t>(MetricId::QCV)];
  const auto raw_qcv = kendall_tau(sea, t.column("QCV"));
  c.expect(sf_tau == 1.0, "monotone column tau " + (sf_tau ? fmt(*sf_tau) : std::string("undefined")));
  c.expect(raw_qcv == -1.0 && qcv_tau == 1.0, "Q_CV raw tau " + (raw_qcv ? fmt(*raw_qcv) : "undefined") +
                                                  ", adjusted " + (qcv_tau ? fmt(*qcv_tau) : "undefined"));
  c.notes = std::string(a) + ", " + b + "; monotone tau " + (sf_tau ? fmt(*sf_tau) : "-") + "; Q_CV " +
            (raw_qcv ? fmt(*raw_qcv) : "-") + " -> " + (qcv_tau ? fmt(*qcv_tau) : "-");
}

std::string report_bytes(const Report& r, const std::filesystem::path& dir) {
  std::string all;
  for (const auto& f : emit_report(r, {ReportFormat::Csv, ReportFormat::Json, ReportFormat::Markdown}, dir)) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    all += f.filename().string() + '\n' + s.str();
  }
  return all;
}

void end_to_end(Check& c) {
  const auto dir = temp_dir("acceptance_e2e");
  const auto manifest = load_manifest(write_synthetic_dataset(dir / "data", 6));
  c.expect(manifest.pairs.size() == 6 && manifest.methods.size() == 5 && manifest.predictors.size() == 2,
           "unexpected synthetic dataset shape");
  BenchmarkOptions single;
  single.run.threads = 1;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r1 = run_benchmark(manifest, single);
  const auto bytes1 = report_bytes(r1, dir / "threads1");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 60.0, "single-threaded run took " + fmt(secs, 3) + " s");
  BenchmarkOptions four;
  four.run.threads = 4;
  const auto bytes4 = report_bytes(run_benchmark(manifest, four), dir / "threads4");
  c.expect(bytes1 == bytes4, "reports differ between 1 and 4 threads");
  c.expect(!r1.partial(), "synthetic run reported exclusions");
  c.expect(r1.correlation.has_value() && r1.scores.column_ids().size() == 18, "report incomplete");
  c.notes = "single-threaded " + fmt(secs, 3) + " s, " + std::to_string(bytes1.size()) + " report bytes identical";
}

void analysis_oracles(Check& c) {
  using fusebench::testing::MaskDataset;
  SegMask gt(4, 4, std::uint8_t{0});
  for (int y = 0; y < 4; ++y)
    for (int x = 2; x < 4; ++x) gt.labels[static_cast<std::size_t>(y) * 4 + x] = 1;
  const SegMask wrong(4, 4, std::uint8_t{0});
  auto dataset = [&](bool swap_two) {
    MaskDataset d{{"road", "person"}, {}, {}};
    for (int i = 0; i < 4; ++i) {
      const auto id = "img" + std::to_string(i);
      d.labels.emplace_back(id, gt);
      d.predictions["seg"]["Visible"][id] = swap_two && i >= 2 ? wrong : gt;
      d.predictions["seg"]["Infrared"][id] = i < 2 || swap_two ? gt : wrong;
    }
    return d;
  };
  const auto dir = temp_dir("acceptance_analysis");
  const auto base = analyze_vis_ir_diff(load_manifest(fusebench::testing::write_mask_dataset(dir / "a", dataset(false))));
  const auto swapped = analyze_vis_ir_diff(load_manifest(fusebench::testing::write_mask_dataset(dir / "b", dataset(true))));
  c.expect(base.fraction_positive == 0.0, "IR perfect on 2, VIS on 4: fraction " + fmt(base.fraction_positive));
  c.expect(swapped.positive == 2 && swapped.fraction_positive == 0.5,
           "swapped: fraction " + fmt(swapped.fraction_positive));

  // Hand-built score table: Visible baseline, Infrared, and three methods.
  // Expected counts worked out by hand per column (direction adjusted).
  ScoreTable t({"Visible", "Infrared", "A", "B", "C"});
  std::vector<int> expected;
  for (MetricId id : kAllMetrics) {
    const auto k = static_cast<int>(id);
    std::vector<double> col{10.0, 99.0, 10.0, 10.0, 10.0};
    int beats = 0;
    if (k % 4 == 1) {
      col[2] = 11.0;  // A higher
      beats = polarity(id) == Polarity::HigherBetter ? 1 : 0;
    } else if (k % 4 == 2) {
      col[2] = 9.0;  // A and B lower, C higher
      col[3] = 9.0;
      col[4] = 12.0;
      beats = polarity(id) == Polarity::HigherBetter ? 1 : 2;
    } else if (k % 4 == 3) {
      col = {10.0, 99.0, 20.0, 30.0, 40.0};
      beats = polarity(id) == Polarity::HigherBetter ? 3 : 0;
    }
    expected.push_back(beats);
    t.add_column(std::string(metric_name(id)), col);
  }
  const auto counts = count_improvements(t);
  bool all = counts.size() == kAllMetrics.size();
  for (std::size_t i = 0; all && i < counts.size(); ++i) {
    if (counts[i].count != expected[i]) {
      all = false;
      c.expect(false, counts[i].column + " count " + std::to_string(counts[i].count) + ", expected " +
                          std::to_string(expected[i]));
    }
  }
  c.expect(all, "improvement counts differ from hand counts");
  c.notes = "fractions " + fmt(base.fraction_positive) + " / " + fmt(swapped.fraction_positive) +
            ", 15 hand counts compared";
}

}  // namespace

int main() {
  run("Metric identity suite (F=A=B, 20 planes)", 10.0, identity_suite);
  run("Bounds suite (200 random triples)", 30.0, bounds_suite);
  run("Oracle equivalence (MI, SSIM, Kendall tau-b, worked mIoU)", 0, oracle_suite);
  run("Degradation monotonicity (noise 4/16/64, 10 seeds)", 0, degradation_suite);
  run("SEA aggregation means 50.9 and 52.4", 0, sea_aggregation);
  run("Correlation mean row 0.430/0.384, synthetic tau=1, Q_CV direction flip", 0, correlation_arithmetic);
  run("End-to-end determinism on synthetic dataset (threads 1 vs 4)", 60.0, end_to_end);
  run("Vis/IR fraction 0.5 and improvement hand counts", 0, analysis_oracles);
  std::printf("%d criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
