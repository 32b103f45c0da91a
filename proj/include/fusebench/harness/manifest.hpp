#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fusebench/error.hpp"
#include "fusebench/fusers.hpp"
#include "fusebench/sea.hpp"

namespace fusebench::harness {

namespace fs = std::filesystem;

struct PairEntry {
  std::string id;
  fs::path visible;
  fs::path infrared;
  fs::path label;
};

/// A compared method: either a built-in fuser or a directory of fused
/// images named `<pair_id>.png`.
struct MethodEntry {
  std::string name;
  std::optional<FuserSpec> fuser;
  std::optional<fs::path> fused_dir;
};

/// Masks for method M and pair P live at `masks_dir/M/P.png`.
struct PredictorEntry {
  std::string name;
  fs::path masks_dir;
};

struct DatasetManifest {
  std::string name;
  ClassSet classes;
  std::vector<PairEntry> pairs;
  std::vector<MethodEntry> methods;
  std::vector<PredictorEntry> predictors;
  std::vector<std::string> unresolved;  // referenced paths missing at load time

  [[nodiscard]] const MethodEntry& method(const std::string& name) const {
    for (const auto& m : methods) {
      if (m.name == name) return m;
    }
    throw ContractError("manifest '" + this->name + "' has no method '" + name + "'");
  }

  [[nodiscard]] bool has_method(const std::string& name) const {
    for (const auto& m : methods) {
      if (m.name == name) return true;
    }
    return false;
  }

  [[nodiscard]] fs::path mask_path(const PredictorEntry& p, const std::string& method,
                                   const std::string& pair_id) const {
    return p.masks_dir / method / (pair_id + ".png");
  }
};

/// Row name used for a fuser when the manifest does not name it.
[[nodiscard]] inline std::string default_method_name(FuseStrategy s) {
  switch (s) {
    case FuseStrategy::VisibleOnly: return "Visible";
    case FuseStrategy::InfraredOnly: return "Infrared";
    default: return std::string(strategy_name(s));
  }
}

[[nodiscard]] inline std::vector<MethodEntry> default_methods() {
  std::vector<MethodEntry> out;
  for (auto s : {FuseStrategy::VisibleOnly, FuseStrategy::InfraredOnly, FuseStrategy::Average,
                 FuseStrategy::MaxSelect, FuseStrategy::LaplacianPyramid}) {
    out.push_back({default_method_name(s), FuserSpec{s}, std::nullopt});
  }
  return out;
}

namespace detail {

using nlohmann::json;

inline const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ContractError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ContractError(where + "." + key + ": missing field");
  return *it;
}

inline std::string string_field(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string()) throw ContractError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline FuserSpec parse_fuser(const json& j, const std::string& where) {
  const auto name = string_field(j, "strategy", where);
  const auto strategy = parse_strategy(name);
  if (!strategy) throw ContractError(where + ".strategy: unknown fusion strategy '" + name + "'");
  FuserSpec spec{*strategy};
  if (j.contains("depth")) {
    if (!j["depth"].is_number_integer()) throw ContractError(where + ".depth: expected an integer");
    spec.pyramid_depth = j["depth"].get<int>();
  }
  if (j.contains("weight")) {
    if (!j["weight"].is_number()) throw ContractError(where + ".weight: expected a number");
    spec.visible_weight = j["weight"].get<double>();
  }
  try {
    spec.validate();
  } catch (const ContractError& e) {
    throw ContractError(where + ": " + e.what());
  }
  return spec;
}

}  // namespace detail

/// Validates a parsed manifest document; relative paths resolve against `base`.
[[nodiscard]] inline DatasetManifest parse_manifest(const nlohmann::json& doc, const fs::path& base,
                                                    std::string default_name = "dataset") {
  using detail::string_field;
  if (!doc.is_object()) throw ContractError("manifest: top level must be an object");
  auto resolve = [&base](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
  };

  std::string name = doc.contains("name") ? string_field(doc, "name", "manifest") : default_name;

  const auto& cls = detail::field(doc, "classes", "manifest");
  if (!cls.is_array()) throw ContractError("manifest.classes: expected an array of names");
  std::vector<std::string> class_names;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (!cls[i].is_string()) {
      throw ContractError("manifest.classes[" + std::to_string(i) + "]: expected a string");
    }
    class_names.push_back(cls[i].get<std::string>());
  }

  DatasetManifest m{std::move(name), ClassSet(std::move(class_names)), {}, {}, {}, {}};

  const auto& pairs = detail::field(doc, "pairs", "manifest");
  if (!pairs.is_array()) throw ContractError("manifest.pairs: expected an array");
  if (pairs.empty()) throw ContractError("manifest.pairs: pair list is empty");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto where = "manifest.pairs[" + std::to_string(i) + "]";
    PairEntry p{string_field(pairs[i], "id", where), resolve(string_field(pairs[i], "visible", where)),
                resolve(string_field(pairs[i], "infrared", where)),
                resolve(string_field(pairs[i], "label", where))};
    if (p.id.empty() || p.id.find_first_of("/\\") != std::string::npos) {
      throw ContractError(where + ".id: '" + p.id + "' is not usable as a file name");
    }
    if (!ids.insert(p.id).second) throw ContractError(where + ".id: duplicate pair id '" + p.id + "'");
    m.pairs.push_back(std::move(p));
  }

  if (doc.contains("methods")) {
    const auto& methods = doc["methods"];
    if (!methods.is_array()) throw ContractError("manifest.methods: expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < methods.size(); ++i) {
      const auto where = "manifest.methods[" + std::to_string(i) + "]";
      MethodEntry e;
      e.name = string_field(methods[i], "name", where);
      const bool has_fuser = methods[i].contains("fuser");
      const bool has_dir = methods[i].contains("fused_dir");
      if (has_fuser == has_dir) throw ContractError(where + ": give exactly one of 'fuser' or 'fused_dir'");
      if (has_fuser) e.fuser = detail::parse_fuser(methods[i]["fuser"], where + ".fuser");
      if (has_dir) e.fused_dir = resolve(string_field(methods[i], "fused_dir", where));
      if (!names.insert(e.name).second) throw ContractError(where + ".name: duplicate method '" + e.name + "'");
      m.methods.push_back(std::move(e));
    }
  } else {
    m.methods = default_methods();
  }

  if (doc.contains("predictors")) {
    const auto& preds = doc["predictors"];
    if (!preds.is_array()) throw ContractError("manifest.predictors: expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const auto where = "manifest.predictors[" + std::to_string(i) + "]";
      PredictorEntry p{string_field(preds[i], "name", where),
                       resolve(string_field(preds[i], "masks_dir", where))};
      if (!names.insert(p.name).second) throw ContractError(where + ".name: duplicate predictor '" + p.name + "'");
      m.predictors.push_back(std::move(p));
    }
  }

  auto check = [&m](const fs::path& p) {
    std::error_code ec;
    if (!fs::exists(p, ec)) m.unresolved.push_back(p.string());
  };
  for (const auto& p : m.pairs) {
    check(p.visible);
    check(p.infrared);
    check(p.label);
  }
  for (const auto& e : m.methods) {
    if (e.fused_dir) check(*e.fused_dir);
  }
  for (const auto& p : m.predictors) check(p.masks_dir);
  return m;
}

[[nodiscard]] inline DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ContractError("manifest '" + path.string() + "': " + e.what());
  }
  return parse_manifest(doc, path.parent_path(), path.stem().string());
}

}  // namespace fusebench::harness
