#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "boxcalc/error.hpp"
#include "boxcalc/grid.hpp"

namespace boxcalc {

struct HolderEstimate {
  double alpha = 1.0;
  bool flat = false;  // no oscillation at any lag
};

inline constexpr std::size_t kHolderMinNodes = 64;
inline constexpr double kHolderMetadataTolerance = 0.15;

/// Log-log slope of the oscillation max|f(x+s) - f(x)| over dyadic lags
/// delta, 2 delta, ... up to (b-a)/4, clamped to (0, 1].
inline HolderEstimate estimate_holder_exponent(const GridFunction1D& f) {
  const Grid1D& g = f.grid();
  if (g.n() < kHolderMinNodes) {
    throw Error(Errc::insufficient_resolution,
                "holder estimate needs at least 64 nodes, got " + std::to_string(g.n()));
  }
  const double max_lag = (g.b() - g.a()) / 4.0;
  std::vector<double> lx, ly;
  for (std::size_t s = 1; static_cast<double>(s) * g.delta() <= max_lag * (1 + 1e-12); s *= 2) {
    double osc = 0;
    for (std::size_t k = g.first(); k + s <= g.last(); ++k) {
      osc = std::max(osc, std::abs(f[k + s] - f[k]));
    }
    if (osc > 0) {
      lx.push_back(std::log(static_cast<double>(s) * g.delta()));
      ly.push_back(std::log(osc));
    }
  }
  if (lx.size() < 2) return {1.0, true};
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  double slope = sxy / sxx;
  if (!(slope > 0)) slope = std::numeric_limits<double>::min();
  return {std::min(slope, 1.0), false};
}

/// Throws HolderMismatch when a closed-form function's declared exponent
/// disagrees with the estimate by more than 0.15. Skipped below 64 nodes.
inline void validate_holder_metadata(const GridFunction1D& f) {
  if (!f.holder_alpha() || f.source() != Source::closed_form) return;
  if (f.grid().n() < kHolderMinNodes) return;
  const HolderEstimate est = estimate_holder_exponent(f);
  if (std::abs(est.alpha - *f.holder_alpha()) > kHolderMetadataTolerance) {
    throw Error(Errc::holder_mismatch, "declared exponent " + std::to_string(*f.holder_alpha()) +
                                           " vs estimate " + std::to_string(est.alpha));
  }
}

/// Closed-form exponent ln(1/a)/ln(b) of the Weierstrass sum, when it lies in (0,1).
inline std::optional<double> weierstrass_exponent(double a, double b) {
  const double alpha = std::log(1.0 / a) / std::log(b);
  if (alpha > 0 && alpha < 1) return alpha;
  return std::nullopt;
}

/// Value of sum_{k<terms} a^k cos(b^k pi x).
inline double weierstrass_value(double a, unsigned b, unsigned terms, double x) {
  double sum = 0, amp = 1, freq = std::numbers::pi;
  for (unsigned k = 0; k < terms; ++k) {
    sum += amp * std::cos(freq * x);
    amp *= a;
    freq *= b;
  }
  return sum;
}

inline void check_weierstrass_parameters(double a, unsigned b, unsigned terms) {
  if (!(a > 0 && a < 1)) throw Error(Errc::parameter_out_of_range, "weierstrass a must lie in (0,1)");
  if (b < 3 || b % 2 == 0) {
    throw Error(Errc::parameter_out_of_range, "weierstrass b must be an odd integer >= 3");
  }
  if (!(std::pow(a, static_cast<double>(terms)) < 1e-12)) {
    throw Error(Errc::parameter_out_of_range,
                "weierstrass truncation needs a^terms < 1e-12, got terms = " +
                    std::to_string(terms));
  }
}

/// Samples the truncated Weierstrass function. holder_alpha is set when a*b > 1;
/// for a*b <= 1 the sum is Lipschitz and no exponent below one is attached.
inline GridFunction1D weierstrass(double a, unsigned b, unsigned terms, const Grid1D& grid) {
  check_weierstrass_parameters(a, b, terms);
  const std::optional<double> alpha =
      a * b > 1 ? weierstrass_exponent(a, b) : std::optional<double>{};
  GridFunction1D f = GridFunction1D::sample(
      grid, [&](double x) { return weierstrass_value(a, b, terms, x); }, Source::closed_form,
      alpha);
  validate_holder_metadata(f);
  return f;
}

}  // namespace boxcalc
