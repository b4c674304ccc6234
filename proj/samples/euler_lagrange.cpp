// Residuals of the Euler-Lagrange family on a few textbook trajectories.

#include <cstdio>

#include "boxcalc/boxcalc.hpp"

using namespace boxcalc;

namespace {

Trajectory1D sample(const char* expr, std::size_t ghost,
                    BoundaryKind boundary = BoundaryKind::fixed) {
  return Trajectory1D(function_1d(Expression(expr), Grid1D(0.0, 1.0, 257, ghost)), boundary);
}

void show(const char* what, const ELReport& r) {
  std::printf("%-34s residual %.3e  extremal %s\n", what, r.residual_norm,
              r.is_extremal ? "yes" : "no");
}

}  // namespace

int main() {
  const double h = 1.0 / 64;
  const Lagrangian load = lagrangian(Expression("v^2/2 + y"), 1);
  show("v^2/2 + y along x^2/2", el_residual_1d(load, sample("x^2/2", 8), h));
  show("v^2/2 + y along x", el_residual_1d(load, sample("x", 8), h));

  const Lagrangian beam = lagrangian(Expression("v2^2/2"), 1);
  show("v2^2/2 along x^3", el_residual_higher(beam, sample("x^3", 16), h));

  const ELReport nbc =
      natural_bc_1d(lagrangian(Expression("v^2/2"), 1), sample("x", 8, BoundaryKind::free), h);
  show("v^2/2 along x, free ends", nbc);
  for (const auto& d : nbc.boundary_defects) std::printf("  %s = %g\n", d.name.c_str(), d.value.real());

  const ELReport iso = iso_solve(lagrangian(Expression("v^2"), 1), lagrangian(Expression("y"), 1),
                                 sample("(x - x^2)/4", 8), 1.0 / 24, h);
  std::printf("isoperimetric multiplier %.9f\n", iso.multiplier->real());

  const ELReport par = solve_parameter(lagrangian(Expression("(v - xi)^2"), 1), sample("x", 8), h);
  std::printf("parameter xi %.12f\n", par.parameter->real());

  // the same Lagrangian solved directly
  const Grid1D g(0.0, 1.0, 257);
  const auto sol = solve_linear_el_1d({0.5, 0, 1, 0}, 0.0, 0.5, g, g.delta());
  std::printf("direct solve of v^2/2 + y: y(0.5) = %.12f (x^2/2 gives 0.125)\n", sol.y.at(0.5).real());
}
