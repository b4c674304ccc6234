#pragma once

#include <cstddef>
#include <string>

#include "boxcalc/error.hpp"
#include "boxcalc/grid.hpp"

namespace boxcalc {

/// Trapezoid rule over the grid nodes from a to b (both must be nodes).
/// Reversed limits negate the result.
inline cplx quad_1d(const GridFunction1D& f, double a, double b) {
  const Grid1D& g = f.grid();
  if (a == b) return {};
  if (a > b) return -quad_1d(f, b, a);
  std::size_t ka, kb;
  try {
    ka = g.locate(a);
    kb = g.locate(b);
  } catch (const Error& e) {
    throw Error(Errc::out_of_domain, std::string("quadrature limits: ") + e.what());
  }
  cplx sum = 0.5 * (f[ka] + f[kb]);
  for (std::size_t k = ka + 1; k < kb; ++k) sum += f[k];
  return sum * g.delta();
}

/// Trapezoid rule over [a,b] of the function's own grid.
inline cplx quad_1d(const GridFunction1D& f) { return quad_1d(f, f.grid().a(), f.grid().b()); }

/// Tensor trapezoid rule over R = [a,b] x [c,d] of the function's grid.
inline cplx quad_2d(const GridFunction2D& f) {
  const Grid1D& a1 = f.grid().axis1();
  const Grid1D& a2 = f.grid().axis2();
  cplx sum = 0;
  for (std::size_t i = a1.first(); i <= a1.last(); ++i) {
    const double wi = (i == a1.first() || i == a1.last()) ? 0.5 : 1.0;
    cplx row = 0;
    for (std::size_t j = a2.first(); j <= a2.last(); ++j) {
      const double wj = (j == a2.first() || j == a2.last()) ? 0.5 : 1.0;
      row += wj * f(i, j);
    }
    sum += wi * row;
  }
  return sum * (a1.delta() * a2.delta());
}

/// Trapezoid integral along axis 1 of f(., x2 = node j).
inline cplx quad_along_x1(const GridFunction2D& f, std::size_t j) {
  const Grid1D& a1 = f.grid().axis1();
  cplx sum = 0.5 * (f(a1.first(), j) + f(a1.last(), j));
  for (std::size_t i = a1.first() + 1; i < a1.last(); ++i) sum += f(i, j);
  return sum * a1.delta();
}

/// Trapezoid integral along axis 2 of f(x1 = node i, .).
inline cplx quad_along_x2(const GridFunction2D& f, std::size_t i) {
  const Grid1D& a2 = f.grid().axis2();
  cplx sum = 0.5 * (f(i, a2.first()) + f(i, a2.last()));
  for (std::size_t j = a2.first() + 1; j < a2.last(); ++j) sum += f(i, j);
  return sum * a2.delta();
}

enum class Orientation { counterclockwise, clockwise };

/// Line integral of f dx1 + g dx2 around the rectangle, in the reduced form
///   int_a^b f(x1,c) - f(x1,d) dx1 + int_c^d g(b,x2) - g(a,x2) dx2.
inline cplx boundary_integral(const GridFunction2D& f, const GridFunction2D& g,
                              Orientation orientation = Orientation::counterclockwise) {
  if (!f.grid().same_nodes(g.grid())) {
    throw Error(Errc::grid_mismatch, "boundary integrands live on different grids");
  }
  const Grid1D& fx2 = f.grid().axis2();
  const Grid1D& gx1 = g.grid().axis1();
  const cplx horizontal = quad_along_x1(f, fx2.first()) - quad_along_x1(f, fx2.last());
  const cplx vertical = quad_along_x2(g, gx1.last()) - quad_along_x2(g, gx1.first());
  const cplx ccw = horizontal + vertical;
  return orientation == Orientation::counterclockwise ? ccw : -ccw;
}

}  // namespace boxcalc
