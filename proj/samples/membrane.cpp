// Membrane with a saddle-shaped frame, written as CSV to stdout.

#include <cstdio>
#include <iostream>

#include "boxcalc/boxcalc.hpp"
#include "boxcalc/report_io.hpp"

using namespace boxcalc;

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::stoul(argv[1]) : 33;
  const Grid2D grid(Grid1D(0.0, 1.0, n), Grid1D(0.0, 1.0, n));
  const double h = grid.axis1().delta();
  const auto sol = solve_membrane([](double a, double b) { return a * a - b * b; }, grid, h);

  const ELReport r =
      el_residual_2d(lagrangian(Expression("(v1^2 + v2^2)/2"), 2), Trajectory2D{sol.u}, h);
  std::fprintf(stderr, "%zu unknowns, %s, linear residual %.2e, EL residual %.2e\n",
               sol.stats.unknowns, sol.stats.method.c_str(), sol.stats.residual, r.residual_norm);
  std::cout << to_csv(sol.u, "u");
}
