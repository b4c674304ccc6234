// Box derivatives of a smooth and a nowhere-differentiable function.

#include <cstdio>

#include "boxcalc/boxcalc.hpp"

using namespace boxcalc;

int main() {
  const double h = 1.0 / 64;
  const Grid1D grid(0.0, 1.0, 1025, 64);

  const auto square = GridFunction1D::sample(grid, [](double x) { return x * x; });
  const cplx d = box_derivative_h(square, h).at(0.5);
  std::printf("B_h(x^2) at 0.5, h = %g: %.6f %+.6fi\n", h, d.real(), d.imag());

  const auto sd = scale_derivative(square, BoxDerivativeConfig{h, 4, 0.5, 0.1});
  const cplx lim = sd.limit.at(0.5);
  std::printf("scale limit at 0.5: %.12f %+.2ei\n", lim.real(), lim.imag());

  const auto w = weierstrass(0.5, 3, 40, grid);
  std::printf("weierstrass: declared alpha %.4f, estimated %.4f\n", *w.holder_alpha(),
              estimate_holder_exponent(w).alpha);
  const auto sw = scale_derivative(w, BoxDerivativeConfig{h, 4, 0.5, 0.1});
  std::printf("weierstrass: convergent fraction of nodes %.3f\n", sw.convergent_fraction());

  const double hs[] = {h, h / 2, h / 4, h / 8};
  const DefectReport lr = leibniz_defect(w, w, hs);
  std::printf("product rule defect on w*w:");
  for (double v : lr.defect_norm) std::printf(" %.4g", v);
  std::printf("\n");
}
