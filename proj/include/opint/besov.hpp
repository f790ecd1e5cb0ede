#pragma once

// Littlewood–Paley decomposition with piecewise-linear dyadic tents and the
// B^1_{∞,1} norms built on it.
//
// Windows (r = |ξ|):
//   inhomogeneous: w_0 = 1 on [0,1], linear down to 0 at 2;
//                  w_n, n >= 1, tent on [2^{n-1}, 2^{n+1}] peaking at 2^n.
//   homogeneous:   w_n tent on [2^{n-1}, 2^{n+1}] for every integer n.
// At any r at most two windows are nonzero and they sum to 1. On dyadic
// points all weights are exact in binary floating point.

#include "opint/core.hpp"
#include "opint/function.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

namespace opint {

enum class BesovFlavor { inhomogeneous, homogeneous };

struct WindowWeight {
  int n;
  double w;
};

// Nonzero window weights at radius r, ascending n.
inline std::vector<WindowWeight> window_weights(double r, BesovFlavor flavor) {
  if (!(r >= 0)) throw ValidationError("window_weights: radius must be >= 0");
  if (r == 0) {
    if (flavor == BesovFlavor::inhomogeneous) return {{0, 1.0}};
    return {};
  }
  if (flavor == BesovFlavor::inhomogeneous && r <= 1.0) return {{0, 1.0}};
  int e = 0;
  std::frexp(r, &e);  // 2^{e-1} <= r < 2^e
  const double lo = std::ldexp(1.0, e - 1);
  std::vector<WindowWeight> out;
  const double down = (2.0 * lo - r) / lo;  // tent n = e-1, descending side
  const double up = (r - lo) / lo;          // tent n = e, ascending side
  if (down > 0) out.push_back({e - 1, down});
  if (up > 0) out.push_back({e, up});
  return out;
}

inline double window(int n, double r, BesovFlavor flavor) {
  for (const auto& ww : window_weights(r, flavor))
    if (ww.n == n) return ww.w;
  return 0.0;
}

// Grid used when f carries no Fourier metadata: grid_n x grid_n samples on
// [-half_width, half_width)^2, treated as one period. Frequency spacing is
// π / half_width; with the default, frequency 1 completes 8 periods.
struct SampledGrid {
  int grid_n = 1024;
  double half_width = 8.0 * std::numbers::pi;
  double alias_tol = 1e-8;     // max energy fraction on the Nyquist row/column
  double coeff_cutoff = 1e-13;  // coefficients below cutoff * max|c| are dropped
};

struct BesovOptions {
  int sup_grid = kDefaultSupGrid;  // see sup_norm(); 0 = coefficient bounds only
  SampledGrid sampled;
};

struct LPBlock {
  int n;
  FunctionR2 block;
  Interval sup_norm;
};

namespace detail {

inline std::vector<FourierMode> sampled_modes(const FunctionR2& f, const SampledGrid& g,
                                              std::vector<Complex>* samples_out = nullptr) {
  const int n = g.grid_n;
  if (n < 4 || n % 2 != 0) throw ValidationError("sampled grid: grid_n must be even and >= 4");
  if (!(g.half_width > 0)) throw ValidationError("sampled grid: half_width must be > 0");
  const double h = 2.0 * g.half_width / n;

  std::vector<Complex> buf(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) buf[static_cast<std::size_t>(i) * n + k] = f(-g.half_width + i * h, -g.half_width + k * h);
  if (samples_out) *samples_out = buf;

  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan = fftw_plan_dft_2d(n, n, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  const double norm = 1.0 / (static_cast<double>(n) * n);
  double total = 0.0, nyquist = 0.0, cmax = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double e = std::norm(buf[static_cast<std::size_t>(i) * n + k] * norm);
      total += e;
      if (i == n / 2 || k == n / 2) nyquist += e;
      cmax = std::max(cmax, std::sqrt(e));
    }
  if (total > 0 && nyquist > g.alias_tol * total) {
    std::ostringstream os;
    os << "lp_blocks: grid-resolution error for '" << f.label() << "': Nyquist energy fraction "
       << nyquist / total << " exceeds " << g.alias_tol << " on a " << n << "^2 grid";
    throw NumericalError(os.str());
  }

  const double dw = std::numbers::pi / g.half_width;
  std::vector<FourierMode> modes;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const int ki = i < n / 2 ? i : i - n;
      const int kk = k < n / 2 ? k : k - n;
      // Undo the offset of the sampling origin: e^{i ω (-L)} = (-1)^k.
      const double sign = ((ki + kk) % 2 == 0) ? 1.0 : -1.0;
      const Complex c = buf[static_cast<std::size_t>(i) * n + k] * norm * sign;
      if (std::abs(c) > g.coeff_cutoff * cmax) modes.push_back({ki * dw, kk * dw, c});
    }
  return modes;
}

inline std::map<int, std::vector<FourierMode>> split_modes(const std::vector<FourierMode>& modes,
                                                           BesovFlavor flavor, const std::string& label) {
  std::map<int, std::vector<FourierMode>> blocks;
  for (const auto& m : modes) {
    const double r = m.radius();
    if (r == 0 && flavor == BesovFlavor::homogeneous)
      throw ValidationError("homogeneous Besov flavor: '" + label +
                            "' has a constant (zero-frequency) component; strip it first");
    for (const auto& [n, w] : window_weights(r, flavor)) blocks[n].push_back({m.a, m.b, m.c * w});
  }
  return blocks;
}

}  // namespace detail

inline std::vector<LPBlock> lp_blocks(const FunctionR2& f, BesovFlavor flavor = BesovFlavor::inhomogeneous,
                                      const BesovOptions& opts = {}) {
  std::vector<LPBlock> out;
  if (f.has_modes()) {
    for (auto& [n, modes] : detail::split_modes(*f.fourier_modes(), flavor, f.label())) {
      FunctionR2 block = FunctionR2::from_modes(std::move(modes));
      if (!block.fourier_modes()->empty()) out.push_back({n, block, sup_norm(block, opts.sup_grid)});
    }
    return out;
  }

  // Sampled path: recover discrete modes by FFT, then window them. The lower
  // sup bound is the grid maximum of each block's inverse transform.
  const auto modes = detail::sampled_modes(f, opts.sampled);
  const int gn = opts.sampled.grid_n;
  for (auto& [n, bmodes] : detail::split_modes(modes, flavor, f.label())) {
    FunctionR2 block = FunctionR2::from_modes(bmodes);
    if (block.fourier_modes()->empty()) continue;
    double upper = 0.0, cmax = 0.0;
    for (const auto& m : *block.fourier_modes()) {
      upper += std::abs(m.c);
      cmax = std::max(cmax, std::abs(m.c));
    }
    std::vector<Complex> grid(static_cast<std::size_t>(gn) * gn, Complex(0.0, 0.0));
    const double dw = std::numbers::pi / opts.sampled.half_width;
    for (const auto& m : *block.fourier_modes()) {
      const int ki = static_cast<int>(std::lround(m.a / dw));
      const int kk = static_cast<int>(std::lround(m.b / dw));
      const double sign = ((ki + kk) % 2 == 0) ? 1.0 : -1.0;
      grid[static_cast<std::size_t>((ki + gn) % gn) * gn + (kk + gn) % gn] += m.c * sign;
    }
    auto* data = reinterpret_cast<fftw_complex*>(grid.data());
    fftw_plan plan = fftw_plan_dft_2d(gn, gn, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    double lower = cmax;
    for (const auto& v : grid) lower = std::max(lower, std::abs(v));
    out.push_back({n, block, {std::min(lower, upper), upper}});
  }
  return out;
}

inline Interval besov_norm(const std::vector<LPBlock>& blocks) {
  Interval acc;
  for (const auto& b : blocks) acc += std::ldexp(1.0, b.n) * b.sup_norm;
  return acc;
}

inline Interval besov_norm(const FunctionR2& f, BesovFlavor flavor, const BesovOptions& opts = {}) {
  return besov_norm(lp_blocks(f, flavor, opts));
}

inline double support_radius(const FunctionR2& f) {
  auto r = f.support_radius();
  if (!r) throw CapabilityError("support_radius: function '" + f.label() + "' has no Fourier metadata");
  return *r;
}

struct BesovBlockRow {
  int n;
  Interval sup_norm;
  Interval contribution;  // 2^n * sup_norm
};

struct BesovReport {
  std::string f_id;
  std::vector<BesovBlockRow> block_norms;          // inhomogeneous decomposition
  Interval inhomogeneous_norm;
  std::vector<BesovBlockRow> homogeneous_blocks;   // empty when not applicable
  std::optional<Interval> homogeneous_norm;        // absent for functions with a constant term
};

inline BesovReport besov_report(const FunctionR2& f, const BesovOptions& opts = {}) {
  BesovReport rep;
  rep.f_id = f.label();
  auto rows = [](const std::vector<LPBlock>& blocks) {
    std::vector<BesovBlockRow> out;
    for (const auto& b : blocks) out.push_back({b.n, b.sup_norm, std::ldexp(1.0, b.n) * b.sup_norm});
    return out;
  };
  const auto inh = lp_blocks(f, BesovFlavor::inhomogeneous, opts);
  rep.block_norms = rows(inh);
  rep.inhomogeneous_norm = besov_norm(inh);
  try {
    const auto hom = lp_blocks(f, BesovFlavor::homogeneous, opts);
    rep.homogeneous_blocks = rows(hom);
    rep.homogeneous_norm = besov_norm(hom);
  } catch (const ValidationError&) {
    // constant component: homogeneous flavor not defined
  }
  return rep;
}

}  // namespace opint
