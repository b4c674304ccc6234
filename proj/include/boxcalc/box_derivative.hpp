#pragma once

/**
 * @file box_derivative.hpp
 * @brief Directional h-derivatives and the complex box derivative at fixed h.
 *
 *   D^s_h f(x) = s (f(x + s h) - f(x)) / h,                 s = +1 or -1
 *   B_h f(x)   = 1/2 [ (D^+ + D^-) + i (D^+ - D^-) ] f(x)
 *
 * so Re B_h f = (f(x+h) - f(x-h)) / 2h and Im B_h f = (f(x+h) - 2f(x) + f(x-h)) / 2h
 * for real f. The operator is complex-linear, which reproduces the
 * componentwise rule B_h(u + i w) = B_h u + i B_h w for complex-valued input.
 *
 * Applying B_h at shift h = m*delta consumes m ghost nodes on each side. When
 * the ghost band is too narrow, `allow_fallback` keeps the boundary nodes by
 * copying the available one-sided quotient into the missing one (real part is
 * the one-sided quotient, imaginary part zero) and flags them untrusted.
 */

#include <cstddef>
#include <string>

#include "boxcalc/error.hpp"
#include "boxcalc/grid.hpp"

namespace boxcalc {

struct BoxOptions {
  bool allow_fallback = false;
};

namespace detail {

// B_h from the three samples f(x-h), f(x), f(x+h).
inline cplx box_quotient(cplx fm, cplx f0, cplx fp, double h) {
  const cplx central = (fp - fm) / (2.0 * h);
  const cplx curvature = (fp - 2.0 * f0 + fm) / (2.0 * h);
  return {central.real() - curvature.imag(), central.imag() + curvature.real()};
}

// Applies B_h along a strided line of `count` samples; writes `count - 2*shrink` outputs.
template <class Get, class Put, class Flag>
void box_line(std::size_t count, std::size_t m, std::size_t shrink, double h, bool fallback,
              Get&& get, Put&& put, Flag&& untrusted_in) {
  const std::size_t out_count = count - 2 * shrink;
  for (std::size_t ko = 0; ko < out_count; ++ko) {
    const std::size_t k = ko + shrink;
    const bool has_minus = k >= m;
    const bool has_plus = k + m < count;
    if (has_minus && has_plus) {
      const bool bad = untrusted_in(k - m) || untrusted_in(k) || untrusted_in(k + m);
      put(ko, box_quotient(get(k - m), get(k), get(k + m), h), bad);
    } else if (fallback && has_plus) {
      put(ko, (get(k + m) - get(k)) / h, true);
    } else if (fallback && has_minus) {
      put(ko, (get(k) - get(k - m)) / h, true);
    } else {
      throw Error(Errc::out_of_domain, "shift by " + std::to_string(m) +
                                           " nodes leaves the grid and fallback is disabled");
    }
  }
}

}  // namespace detail

/// s (f(x + s h) - f(x)) / h at the node x.
inline cplx h_derivative(const GridFunction1D& f, double x, double h, int sigma) {
  if (sigma != 1 && sigma != -1) {
    throw Error(Errc::parameter_out_of_range, "direction must be +1 or -1");
  }
  const Grid1D& g = f.grid();
  const std::size_t m = g.steps(h);
  const std::size_t k = g.locate(x);
  const double hs = static_cast<double>(m) * g.delta();
  if (sigma > 0) {
    if (k + m >= g.size()) throw Error(Errc::out_of_domain, "x + h lies beyond the grid");
    return (f[k + m] - f[k]) / hs;
  }
  if (k < m) throw Error(Errc::out_of_domain, "x - h lies beyond the grid");
  return -(f[k - m] - f[k]) / hs;
}

/// Box derivative at fixed h. The result's ghost band shrinks by h/delta nodes.
inline GridFunction1D box_derivative_h(const GridFunction1D& f, double h, BoxOptions opt = {}) {
  const Grid1D& g = f.grid();
  const std::size_t m = g.steps(h);
  const double hs = static_cast<double>(m) * g.delta();
  if (g.ghost() < m && !opt.allow_fallback) {
    throw Error(Errc::out_of_domain, "ghost band of " + std::to_string(g.ghost()) +
                                         " nodes is narrower than h/delta = " +
                                         std::to_string(m));
  }
  const std::size_t out_ghost = g.ghost() >= m ? g.ghost() - m : 0;
  const std::size_t shrink = g.ghost() - out_ghost;
  const Grid1D og = g.with_ghost(out_ghost);
  GridFunction1D out(og, std::vector<cplx>(og.size()));
  detail::box_line(
      g.size(), m, shrink, hs, opt.allow_fallback, [&](std::size_t k) { return f[k]; },
      [&](std::size_t ko, cplx z, bool bad) {
        out[ko] = z;
        if (bad) out.mark_untrusted(ko);
      },
      [&](std::size_t k) { return !f.trusted(k); });
  return out;
}

/// n-fold composition of box_derivative_h; order 0 returns f unchanged.
inline GridFunction1D box_derivative_n(const GridFunction1D& f, double h, unsigned order,
                                       BoxOptions opt = {}) {
  GridFunction1D out = f;
  for (unsigned i = 0; i < order; ++i) out = box_derivative_h(out, h, opt);
  return out;
}

/// Partial box derivative along axis 1 (x1) or 2 (x2) with the other coordinate fixed.
inline GridFunction2D partial_box_derivative_h(const GridFunction2D& f, double h, int axis,
                                               BoxOptions opt = {}) {
  if (axis != 1 && axis != 2) throw Error(Errc::parameter_out_of_range, "axis must be 1 or 2");
  const Grid1D& ga = f.grid().axis(axis);
  const std::size_t m = ga.steps(h);
  const double hs = static_cast<double>(m) * ga.delta();
  if (ga.ghost() < m && !opt.allow_fallback) {
    throw Error(Errc::out_of_domain, "ghost band along axis " + std::to_string(axis) +
                                         " is narrower than h/delta");
  }
  const std::size_t out_ghost = ga.ghost() >= m ? ga.ghost() - m : 0;
  const std::size_t shrink = ga.ghost() - out_ghost;
  const Grid1D& a1 = f.grid().axis1();
  const Grid1D& a2 = f.grid().axis2();
  const Grid2D og = axis == 1 ? f.grid().with_ghost(out_ghost, a2.ghost())
                              : f.grid().with_ghost(a1.ghost(), out_ghost);
  GridFunction2D out(og, std::vector<cplx>(og.size()));

  if (axis == 1) {
    for (std::size_t j = 0; j < a2.size(); ++j) {
      detail::box_line(
          a1.size(), m, shrink, hs, opt.allow_fallback, [&](std::size_t k) { return f(k, j); },
          [&](std::size_t ko, cplx z, bool bad) {
            out(ko, j) = z;
            if (bad) out.mark_untrusted(ko, j);
          },
          [&](std::size_t k) { return !f.trusted(k, j); });
    }
  } else {
    for (std::size_t i = 0; i < a1.size(); ++i) {
      detail::box_line(
          a2.size(), m, shrink, hs, opt.allow_fallback, [&](std::size_t k) { return f(i, k); },
          [&](std::size_t ko, cplx z, bool bad) {
            out(i, ko) = z;
            if (bad) out.mark_untrusted(i, ko);
          },
          [&](std::size_t k) { return !f.trusted(i, k); });
    }
  }
  return out;
}

}  // namespace boxcalc
