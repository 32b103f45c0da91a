#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "fusebench/plane.hpp"
#include "fusebench/pyramid.hpp"

namespace fusebench {

enum class FuseStrategy { VisibleOnly, InfraredOnly, Average, MaxSelect, LaplacianPyramid };

struct FuserSpec {
  FuseStrategy strategy = FuseStrategy::Average;
  int pyramid_depth = 4;
  double visible_weight = 0.5;

  void validate() const {
    if (pyramid_depth < 1) throw ContractError("pyramid depth must be >= 1");
    if (!(visible_weight >= 0.0 && visible_weight <= 1.0)) {
      throw ContractError("average weight must lie in [0,1]");
    }
  }
};

[[nodiscard]] constexpr std::string_view strategy_name(FuseStrategy s) noexcept {
  switch (s) {
    case FuseStrategy::VisibleOnly: return "visible-only";
    case FuseStrategy::InfraredOnly: return "infrared-only";
    case FuseStrategy::Average: return "average";
    case FuseStrategy::MaxSelect: return "max-select";
    case FuseStrategy::LaplacianPyramid: return "laplacian-pyramid";
  }
  return "?";
}

[[nodiscard]] inline std::optional<FuseStrategy> parse_strategy(std::string_view name) noexcept {
  for (auto s : {FuseStrategy::VisibleOnly, FuseStrategy::InfraredOnly, FuseStrategy::Average,
                 FuseStrategy::MaxSelect, FuseStrategy::LaplacianPyramid}) {
    if (strategy_name(s) == name) return s;
  }
  return std::nullopt;
}

namespace detail {

inline ImagePlane pyramid_fuse(const ImagePlane& vis, const ImagePlane& ir, int depth) {
  auto pv = laplacian_pyramid(vis, depth);
  const auto pi = laplacian_pyramid(ir, depth);
  const std::size_t top = pv.levels.size() - 1;
  for (std::size_t l = 0; l < pv.levels.size(); ++l) {
    auto out = pv.levels[l].data();
    const auto other = pi.levels[l].data();
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (l == top) {
        out[i] = 0.5 * (out[i] + other[i]);
      } else if (std::abs(other[i]) > std::abs(out[i])) {
        out[i] = other[i];
      }
    }
  }
  return to_u8(collapse(pv));
}

}  // namespace detail

/// Fuses a visible/infrared pair. Output keeps the input dimensions and is
/// rounded half away from zero into [0,255].
[[nodiscard]] inline ImagePlane fuse(const FuserSpec& spec, const ImagePlane& vis,
                                     const ImagePlane& ir) {
  spec.validate();
  require_same_shape(vis, ir, "fuse");
  switch (spec.strategy) {
    case FuseStrategy::VisibleOnly: return vis;
    case FuseStrategy::InfraredOnly: return ir;
    case FuseStrategy::Average: {
      ImagePlane out(vis.width(), vis.height());
      const double w = spec.visible_weight;
      for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = saturate_u8(w * vis.data()[i] + (1.0 - w) * ir.data()[i]);
      }
      return out;
    }
    case FuseStrategy::MaxSelect: {
      ImagePlane out(vis.width(), vis.height());
      for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = std::max(vis.data()[i], ir.data()[i]);
      }
      return out;
    }
    case FuseStrategy::LaplacianPyramid: return detail::pyramid_fuse(vis, ir, spec.pyramid_depth);
  }
  throw ContractError("unknown fusion strategy");
}

}  // namespace fusebench
