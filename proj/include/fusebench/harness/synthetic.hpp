#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fusebench/filters.hpp"
#include "fusebench/fusers.hpp"
#include "fusebench/harness/manifest.hpp"
#include "fusebench/png_io.hpp"

namespace fusebench::harness {

/// Small deterministic visible/infrared dataset with three classes
/// (background, car, person). Cars are bright in visible light and only
/// warm in infrared on some frames; people are hot in infrared and close to
/// the background in visible light. Later frames are night scenes.
struct SyntheticScene {
  std::string id;
  ImagePlane visible;
  ImagePlane infrared;
  SegMask label;
};

namespace detail {

struct Rect {
  int x0, y0, x1, y1;
  [[nodiscard]] bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

inline int draw(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace detail

[[nodiscard]] inline SyntheticScene synthetic_scene(int index, int size = 64) {
  std::mt19937_64 rng(0x5EA5EEDULL + static_cast<std::uint64_t>(index));
  const bool night = index % 2 == 1;
  const bool warm_car = index % 3 != 0;
  const int cw = detail::draw(rng, size / 4, size / 3), ch = detail::draw(rng, size / 6, size / 4);
  const int cx = detail::draw(rng, 2, size / 2 - cw), cy = detail::draw(rng, 2, size - ch - 2);
  const int pw = detail::draw(rng, size / 10, size / 7), ph = detail::draw(rng, size / 4, size / 3);
  const int px = detail::draw(rng, size / 2 + 2, size - pw - 2), py = detail::draw(rng, 2, size - ph - 2);
  const detail::Rect car{cx, cy, cx + cw, cy + ch};
  const detail::Rect person{px, py, px + pw, py + ph};

  SyntheticScene s{"frame" + std::to_string(index), ImagePlane(size, size), ImagePlane(size, size),
                   SegMask(size, size, std::uint8_t{0})};
  const int vis_bg = night ? 30 : 70, vis_car = night ? 70 : 150, vis_person = night ? 36 : 85;
  const int ir_bg = 50, ir_car = warm_car ? 115 : 80, ir_person = 205;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double texture = 8.0 * std::sin(0.4 * x + 0.3 * index) * std::cos(0.25 * y);
      const int nv = detail::draw(rng, -6, 6), ni = detail::draw(rng, -4, 4);
      std::uint8_t label = 0;
      double v = vis_bg + texture, t = ir_bg + 0.5 * texture;
      if (car.contains(x, y)) {
        label = 1;
        v = vis_car + 0.5 * texture;
        t = ir_car;
      }
      if (person.contains(x, y)) {
        label = 2;
        v = vis_person;
        t = ir_person;
      }
      if (x == 0 || y == 0 || x == size - 1 || y == size - 1) label = SegMask::kIgnore;
      s.visible(x, y) = saturate_u8(v + nv);
      s.infrared(x, y) = saturate_u8(t + ni);
      s.label.labels[static_cast<std::size_t>(y) * size + x] = label;
    }
  }
  return s;
}

/// Toy intensity-threshold segmenters standing in for real predictors.
enum class ToyPredictor { Threshold, SmoothThreshold };

[[nodiscard]] inline std::string toy_name(ToyPredictor p) {
  return p == ToyPredictor::Threshold ? "threshold" : "smooth-threshold";
}

[[nodiscard]] inline SegMask toy_predict(ToyPredictor p, const ImagePlane& img) {
  const auto f = p == ToyPredictor::Threshold ? to_float(img) : gaussian_blur(to_float(img), 1.0, 3);
  const double person = p == ToyPredictor::Threshold ? 170.0 : 160.0;
  const double car = p == ToyPredictor::Threshold ? 100.0 : 95.0;
  SegMask m(img.width(), img.height(), std::uint8_t{0});
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    const double v = f.data()[i];
    m.labels[i] = v >= person ? 2 : v >= car ? 1 : 0;
  }
  return m;
}

/// Writes sources, labels, toy-predictor masks for the five baseline fusers
/// and a manifest.json into `dir`. Returns the manifest path.
inline std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir, int pairs = 6,
                                                     int size = 64) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "visible");
  fs::create_directories(dir / "infrared");
  fs::create_directories(dir / "labels");
  const auto methods = default_methods();
  const ToyPredictor predictors[] = {ToyPredictor::Threshold, ToyPredictor::SmoothThreshold};

  nlohmann::ordered_json doc;
  doc["name"] = "synthetic";
  doc["classes"] = {"background", "car", "person"};
  doc["pairs"] = nlohmann::ordered_json::array();
  for (int i = 0; i < pairs; ++i) {
    const auto s = synthetic_scene(i, size);
    save_png(dir / "visible" / (s.id + ".png"), to_rgb(s.visible));
    save_png(dir / "infrared" / (s.id + ".png"), s.infrared);
    save_png(dir / "labels" / (s.id + ".png"), s.label);
    for (const auto& m : methods) {
      const auto fused = fuse(*m.fuser, s.visible, s.infrared);
      for (auto p : predictors) {
        const auto out = dir / "masks" / toy_name(p) / m.name;
        fs::create_directories(out);
        save_png(out / (s.id + ".png"), toy_predict(p, fused));
      }
    }
    doc["pairs"].push_back({{"id", s.id},
                            {"visible", "visible/" + s.id + ".png"},
                            {"infrared", "infrared/" + s.id + ".png"},
                            {"label", "labels/" + s.id + ".png"}});
  }
  doc["methods"] = nlohmann::ordered_json::array();
  for (const auto& m : methods) {
    doc["methods"].push_back({{"name", m.name},
                              {"fuser", {{"strategy", std::string(strategy_name(m.fuser->strategy))},
                                         {"depth", m.fuser->pyramid_depth},
                                         {"weight", m.fuser->visible_weight}}}});
  }
  doc["predictors"] = nlohmann::ordered_json::array();
  for (auto p : predictors) doc["predictors"].push_back({{"name", toy_name(p)}, {"masks_dir", "masks/" + toy_name(p)}});

  const auto path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
  return path;
}

}  // namespace fusebench::harness
