#pragma once

/**
 * @file gateaux.hpp
 * @brief Action functionals at fixed h and their directional derivatives.
 *
 * The action is the trapezoid integral of L[y] over [a,b] (or R) with every
 * box derivative taken at the working h from ghost samples, never from the
 * one-sided fallback. The Gateaux derivative is a central difference in the
 * variation amplitude with one Richardson step, and serves as an oracle that
 * is independent of the residual evaluators.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "boxcalc/box_derivative.hpp"
#include "boxcalc/error.hpp"
#include "boxcalc/euler_lagrange.hpp"
#include "boxcalc/grid.hpp"
#include "boxcalc/lagrangian.hpp"
#include "boxcalc/quadrature.hpp"

namespace boxcalc {

struct ActionSpec {
  Lagrangian L;
  double h;
  BoundaryKind boundary = BoundaryKind::fixed;
  cplx xi{};
};

/// Phi(y) = int_a^b L(x, y, B_h y, ..., B_h^n y [, xi]) dx.
inline cplx action(const ActionSpec& s, const GridFunction1D& y) {
  detail::require_arity(s.L, 1, std::nullopt, "action");
  const detail::Bracket1D b = detail::bracket(y, s.h, s.L.arity().order, BoxOptions{});
  return quad_1d(detail::eval_field(b, s.xi, [&](const LagrangianArgs& a) { return s.L(a); }));
}

/// Phi(y) = iint_R L(x1, x2, y, B_h y / B x1, B_h y / B x2).
inline cplx action(const ActionSpec& s, const GridFunction2D& y) {
  if (s.L.arity().dims != 2) throw Error(Errc::arity_mismatch, "2D action needs dims = 2");
  const detail::Bracket2D b = detail::bracket(y, s.h, BoxOptions{});
  return quad_2d(detail::eval_field(b, [&](const LagrangianArgs& a) { return s.L(a); }));
}

namespace detail {

inline constexpr double kVariationTolerance = 1e-12;

inline void check_variation(const ActionSpec& s, const GridFunction1D& w) {
  if (s.boundary == BoundaryKind::free) return;
  GridFunction1D cur = w;
  for (unsigned k = 0; k < s.L.arity().order; ++k) {
    const Grid1D& cg = cur.grid();
    const double ends = std::max(std::abs(cur[cg.first()]), std::abs(cur[cg.last()]));
    if (ends > kVariationTolerance) {
      throw Error(Errc::variation_class_violation,
                  "variation's box derivative of order " + std::to_string(k) +
                      " is " + std::to_string(ends) + " at an endpoint");
    }
    if (k + 1 < s.L.arity().order) cur = box_derivative_h(cur, s.h, BoxOptions{});
  }
}

inline void check_variation(const ActionSpec& s, const GridFunction2D& w) {
  if (s.boundary == BoundaryKind::free) return;
  const double b = boundary_sup(w);
  if (b > kVariationTolerance) {
    throw Error(Errc::variation_class_violation,
                "variation reaches " + std::to_string(b) + " on the boundary of R");
  }
}

template <class F>
double sup_all(const F& f) {
  double s = 0;
  for (cplx z : f.values()) s = std::max(s, std::abs(z));
  return s;
}

}  // namespace detail

/// d/d eps Phi(y + eps w) at eps = 0 by a Richardson-refined central difference.
template <class F>
cplx gateaux_derivative(const ActionSpec& s, const F& y, const F& w) {
  if (!y.grid().same_nodes(w.grid())) {
    throw Error(Errc::grid_mismatch, "trajectory and variation live on different grids");
  }
  detail::check_variation(s, w);
  const double wmax = detail::sup_all(w);
  if (wmax == 0) return {};
  const double eps = 1e-5 * std::max(1.0, detail::sup_all(y)) / wmax;
  auto central = [&](double e) {
    const cplx up = action(s, y + cplx(e) * w);
    const cplx down = action(s, y - cplx(e) * w);
    return (up - down) / (2.0 * e);
  };
  const cplx coarse = central(eps);
  const cplx fine = central(0.5 * eps);
  return (4.0 * fine - coarse) / 3.0;
}

inline cplx gateaux_derivative(const ActionSpec& s, const Trajectory1D& y,
                               const GridFunction1D& w) {
  return gateaux_derivative(s, y.y(), w);
}

inline cplx gateaux_derivative(const ActionSpec& s, const Trajectory2D& y,
                               const GridFunction2D& w) {
  return gateaux_derivative(s, y.y, w);
}

}  // namespace boxcalc
