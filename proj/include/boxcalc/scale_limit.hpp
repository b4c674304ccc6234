#pragma once

/**
 * @file scale_limit.hpp
 * @brief Numerical extraction of the h -> 0 convergent part of a box quotient.
 *
 * For a node x the quotients z_k = B_{h_k} f(x) are computed on a geometric
 * sequence h_k = h * ratio^k (each snapped to a grid multiple). The real and
 * imaginary parts are fitted independently with c0 + c1 * h^gamma,
 * gamma in [0.3, 2]; c0 is the extracted limit. The misfit relative to the rms
 * of |z_k| classifies the node as convergent (misfit <= tau) or not, and the
 * part of z removed by the model at the finest h is reported as the E-part.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "boxcalc/box_derivative.hpp"
#include "boxcalc/error.hpp"
#include "boxcalc/grid.hpp"

namespace boxcalc {

struct BoxDerivativeConfig {
  double h = 0.01;
  std::size_t levels = 4;
  double ratio = 0.5;
  double tau = 0.1;

  /// Snapped, strictly decreasing step sequence on `grid`.
  std::vector<double> h_sequence(const Grid1D& grid) const {
    if (levels < 1) throw Error(Errc::parameter_out_of_range, "levels must be positive");
    if (!(ratio > 0 && ratio < 1)) {
      throw Error(Errc::parameter_out_of_range, "ratio must lie in (0,1)");
    }
    if (!(tau > 0)) throw Error(Errc::parameter_out_of_range, "tau must be positive");
    grid.steps(h);
    std::vector<double> hs;
    hs.reserve(levels);
    double target = h;
    for (std::size_t k = 0; k < levels; ++k, target *= ratio) {
      const double m = std::round(target / grid.delta());
      if (m < 1 || target < grid.delta() * (1 - 1e-9)) {
        throw Error(Errc::parameter_out_of_range,
                    "h * ratio^" + std::to_string(k) + " falls below the grid spacing");
      }
      const double hk = m * grid.delta();
      if (!hs.empty() && !(hk < hs.back())) {
        throw Error(Errc::parameter_out_of_range,
                    "snapped h-sequence is not strictly decreasing at level " +
                        std::to_string(k));
      }
      hs.push_back(hk);
    }
    return hs;
  }

  std::size_t max_steps(const Grid1D& grid) const { return grid.steps(h); }
};

/// One real power-law fit y ~ c0 + c1 h^gamma.
struct PowerLawFit {
  double c0 = 0;
  double c1 = 0;
  double gamma = 1;
  double sse = 0;

  double operator()(double h) const { return c0 + c1 * std::pow(h, gamma); }
};

namespace detail {

inline PowerLawFit fit_fixed_gamma(std::span<const double> hs, std::span<const double> y,
                                   double gamma) {
  const std::size_t k = hs.size();
  double tbar = 0, ybar = 0;
  std::vector<double> t(k);
  for (std::size_t i = 0; i < k; ++i) {
    t[i] = std::pow(hs[i], gamma);
    tbar += t[i];
    ybar += y[i];
  }
  tbar /= static_cast<double>(k);
  ybar /= static_cast<double>(k);
  double stt = 0, sty = 0;
  for (std::size_t i = 0; i < k; ++i) {
    stt += (t[i] - tbar) * (t[i] - tbar);
    sty += (t[i] - tbar) * (y[i] - ybar);
  }
  PowerLawFit fit;
  fit.gamma = gamma;
  fit.c1 = stt > 0 ? sty / stt : 0.0;
  fit.c0 = ybar - fit.c1 * tbar;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = y[i] - fit.c0 - fit.c1 * t[i];
    fit.sse += r * r;
  }
  return fit;
}

}  // namespace detail

inline constexpr double kGammaMin = 0.3;
inline constexpr double kGammaMax = 2.0;

/// Least-squares fit of c0 + c1 h^gamma with gamma restricted to [0.3, 2].
inline PowerLawFit fit_power_law(std::span<const double> hs, std::span<const double> y) {
  if (hs.size() < 3 || hs.size() != y.size()) {
    throw Error(Errc::fit_degenerate, "power-law fit needs at least 3 levels");
  }
  const double y0 = y[0];
  if (std::all_of(y.begin(), y.end(), [y0](double v) { return v == y0; })) {
    return PowerLawFit{y0, 0.0, 1.0, 0.0};
  }
  constexpr int kCoarse = 85;
  const double step = (kGammaMax - kGammaMin) / kCoarse;
  PowerLawFit best = detail::fit_fixed_gamma(hs, y, kGammaMin);
  int best_i = 0;
  for (int i = 1; i <= kCoarse; ++i) {
    const PowerLawFit f = detail::fit_fixed_gamma(hs, y, kGammaMin + step * i);
    if (f.sse < best.sse) {
      best = f;
      best_i = i;
    }
  }
  // golden-section refinement inside the bracketing coarse cell pair
  double lo = std::max(kGammaMin, kGammaMin + step * (best_i - 1));
  double hi = std::min(kGammaMax, kGammaMin + step * (best_i + 1));
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  PowerLawFit f1 = detail::fit_fixed_gamma(hs, y, x1);
  PowerLawFit f2 = detail::fit_fixed_gamma(hs, y, x2);
  for (int it = 0; it < 40; ++it) {
    if (f1.sse <= f2.sse) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = detail::fit_fixed_gamma(hs, y, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = detail::fit_fixed_gamma(hs, y, x2);
    }
  }
  if (f1.sse < best.sse) best = f1;
  if (f2.sse < best.sse) best = f2;
  return best;
}

struct ScaleLimitResult {
  cplx limit;
  double fit_residual = 0;
  bool convergent = true;
  double epart_magnitude = 0;
  PowerLawFit re_model;
  PowerLawFit im_model;

  /// Convergent model c0 + c1 h^gamma evaluated at h.
  cplx model(double h) const { return {re_model(h), im_model(h)}; }
};

/// Fits one node's quotient sequence.
inline ScaleLimitResult fit_scale_limit(std::span<const double> hs, std::span<const cplx> z,
                                        double tau) {
  const std::size_t k = hs.size();
  std::vector<double> re(k), im(k);
  double power = 0;
  for (std::size_t i = 0; i < k; ++i) {
    re[i] = z[i].real();
    im[i] = z[i].imag();
    power += std::norm(z[i]);
  }
  ScaleLimitResult r;
  r.re_model = fit_power_law(hs, re);
  r.im_model = fit_power_law(hs, im);
  r.limit = {r.re_model.c0, r.im_model.c0};
  const double rms = std::sqrt(power / static_cast<double>(k));
  const double misfit = std::sqrt((r.re_model.sse + r.im_model.sse) / static_cast<double>(k));
  r.fit_residual = rms > 0 ? misfit / rms : 0.0;
  r.convergent = r.fit_residual <= tau;
  r.epart_magnitude = std::abs(z[k - 1] - r.model(hs[k - 1]));
  return r;
}

struct ScaleDerivative {
  GridFunction1D limit;
  std::vector<ScaleLimitResult> nodes;  // indexed like limit's storage
  std::vector<double> h_sequence;
  std::vector<GridFunction1D> quotients;  // B_{h_k} f cropped to limit's grid

  double convergent_fraction() const {
    std::size_t c = 0, total = 0;
    const Grid1D& g = limit.grid();
    for (std::size_t k = g.first(); k <= g.last(); ++k) {
      ++total;
      if (nodes[k].convergent) ++c;
    }
    return total ? static_cast<double>(c) / static_cast<double>(total) : 0.0;
  }
};

/// Scale derivative <B_h f> at every node supported by the coarsest h.
inline ScaleDerivative scale_derivative(const GridFunction1D& f, const BoxDerivativeConfig& cfg,
                                        BoxOptions opt = {}) {
  if (cfg.levels < 3) throw Error(Errc::fit_degenerate, "scale limit needs at least 3 levels");
  const std::vector<double> hs = cfg.h_sequence(f.grid());
  std::vector<GridFunction1D> q;
  q.reserve(hs.size());
  for (double h : hs) q.push_back(box_derivative_h(f, h, opt));
  std::size_t ghost = q.front().grid().ghost();
  for (const auto& qi : q) ghost = std::min(ghost, qi.grid().ghost());
  for (auto& qi : q) qi = qi.crop(ghost);

  const Grid1D& og = q.front().grid();
  GridFunction1D limit(og, std::vector<cplx>(og.size()));
  std::vector<ScaleLimitResult> nodes(og.size());
  std::vector<cplx> z(hs.size());
  for (std::size_t k = 0; k < og.size(); ++k) {
    bool bad = false;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      z[i] = q[i][k];
      bad = bad || !q[i].trusted(k);
    }
    nodes[k] = fit_scale_limit(hs, z, cfg.tau);
    limit[k] = nodes[k].limit;
    if (bad) limit.mark_untrusted(k);
  }
  return ScaleDerivative{std::move(limit), std::move(nodes), hs, std::move(q)};
}

}  // namespace boxcalc
