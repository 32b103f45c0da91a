#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fusebench/png_io.hpp"

namespace fusebench::testing {

/// Mask-only dataset on disk: ground truth per pair plus predictions per
/// predictor and method. Sources are plain gray planes so the manifest
/// resolves fully.
struct MaskDataset {
  std::vector<std::string> classes;
  std::vector<std::pair<std::string, SegMask>> labels;  // pair id -> ground truth
  // predictor -> method -> pair id -> mask; absent entries are not written
  std::map<std::string, std::map<std::string, std::map<std::string, SegMask>>> predictions;
};

inline std::filesystem::path write_mask_dataset(const std::filesystem::path& dir, const MaskDataset& d) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "src");
  fs::create_directories(dir / "gt");
  nlohmann::json doc;
  doc["name"] = dir.filename().string();
  doc["classes"] = d.classes;
  doc["pairs"] = nlohmann::json::array();
  for (const auto& [id, gt] : d.labels) {
    save_png(dir / "src" / (id + ".png"), ImagePlane(gt.width, gt.height, 100));
    save_png(dir / "gt" / (id + ".png"), gt);
    doc["pairs"].push_back({{"id", id}, {"visible", "src/" + id + ".png"}, {"infrared", "src/" + id + ".png"},
                            {"label", "gt/" + id + ".png"}});
  }
  doc["predictors"] = nlohmann::json::array();
  std::vector<std::string> methods;
  for (const auto& [pred, by_method] : d.predictions) {
    doc["predictors"].push_back({{"name", pred}, {"masks_dir", "masks/" + pred}});
    for (const auto& [method, by_pair] : by_method) {
      fs::create_directories(dir / "masks" / pred / method);
      for (const auto& [id, m] : by_pair) save_png(dir / "masks" / pred / method / (id + ".png"), m);
    }
  }
  std::ofstream(dir / "manifest.json") << doc.dump(2);
  return dir / "manifest.json";
}

}  // namespace fusebench::testing
