#pragma once

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>

#include "fusebench/plane.hpp"

namespace fusebench {

/// Viewing geometry for contrast-sensitivity filtering: screen pixels per
/// degree of visual angle.
inline constexpr double kPixelsPerDegree = 30.0;

/// Mannos-Sakrison contrast sensitivity at `f` cycles/degree.
[[nodiscard]] inline double mannos_sakrison(double f) noexcept {
  return 2.6 * (0.0192 + 0.114 * f) * std::exp(-std::pow(0.114 * f, 1.1));
}

namespace detail {

// FFTW's planner is not reentrant; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
struct FftwPlanFree {
  void operator()(fftw_plan_s* p) const noexcept {
    std::scoped_lock lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};

template <class T>
using FftwBuffer = std::unique_ptr<T, FftwFree>;
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanFree>;

}  // namespace detail

/// Applies the Mannos-Sakrison CSF as a zero-phase frequency-domain filter.
/// The image is mirrored to 2W x 2H first so the implied periodic signal is
/// continuous at the borders.
[[nodiscard]] inline FloatPlane csf_filter(const FloatPlane& src) {
  const int w = src.width();
  const int h = src.height();
  const int ew = 2 * w;
  const int eh = 2 * h;
  const int cw = ew / 2 + 1;
  const std::size_t n_real = static_cast<std::size_t>(ew) * eh;
  const std::size_t n_cplx = static_cast<std::size_t>(cw) * eh;

  detail::FftwBuffer<double> real(fftw_alloc_real(n_real));
  detail::FftwBuffer<fftw_complex> spec(fftw_alloc_complex(n_cplx));
  detail::FftwPlan forward;
  detail::FftwPlan inverse;
  {
    std::scoped_lock lock(detail::fftw_planner_mutex());
    forward.reset(fftw_plan_dft_r2c_2d(eh, ew, real.get(), spec.get(), FFTW_ESTIMATE));
    inverse.reset(fftw_plan_dft_c2r_2d(eh, ew, spec.get(), real.get(), FFTW_ESTIMATE));
  }

  for (int y = 0; y < eh; ++y) {
    const int sy = y < h ? y : eh - 1 - y;
    for (int x = 0; x < ew; ++x) {
      const int sx = x < w ? x : ew - 1 - x;
      real.get()[static_cast<std::size_t>(y) * ew + x] = src(sx, sy);
    }
  }
  fftw_execute(forward.get());

  for (int ky = 0; ky < eh; ++ky) {
    const double fy = static_cast<double>(ky <= eh / 2 ? ky : ky - eh) / eh;
    for (int kx = 0; kx < cw; ++kx) {
      const double fx = static_cast<double>(kx) / ew;
      const double cpd = std::sqrt(fx * fx + fy * fy) * kPixelsPerDegree;
      const double gain = mannos_sakrison(cpd) / static_cast<double>(n_real);
      auto& c = spec.get()[static_cast<std::size_t>(ky) * cw + kx];
      c[0] *= gain;
      c[1] *= gain;
    }
  }
  fftw_execute(inverse.get());

  FloatPlane out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out(x, y) = real.get()[static_cast<std::size_t>(y) * ew + x];
  }
  return out;
}

}  // namespace fusebench
