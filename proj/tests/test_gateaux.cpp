#include <gtest/gtest.h>

#include "boxcalc/expression.hpp"
#include "boxcalc/gateaux.hpp"

using namespace boxcalc;

namespace {

constexpr double kH = 1.0 / 64;

Lagrangian L1(const char* text) { return lagrangian(Expression(text), 1); }

GridFunction1D sample(double (*f)(double), std::size_t ghost = 8, std::size_t n = 257) {
  return GridFunction1D::sample(Grid1D(0.0, 1.0, n, ghost), f);
}

}  // namespace

TEST(Action, KineticEnergyOfLine) {
  const ActionSpec s{L1("v^2"), kH};
  EXPECT_NEAR(std::abs(action(s, sample([](double x) { return 2 * x; })) - 4.0), 0, 1e-12);
}

TEST(Action, NeedsGhostNodes) {
  const ActionSpec s{L1("v^2"), kH};
  EXPECT_THROW(action(s, sample([](double x) { return x; }, 0)), Error);
}

TEST(Gateaux, BubbleAlongLineGivesImaginaryRemainderOnly) {
  const ActionSpec s{L1("v^2"), kH};
  const auto y = sample([](double x) { return x; });
  const auto w = sample([](double x) { return x * (1 - x); });
  const cplx d = gateaux_derivative(s, Trajectory1D(y), w);
  EXPECT_LE(std::abs(d.real()), 1e-8);
  // 2 int (1 - 2x - ih) dx = -2ih
  EXPECT_NEAR(d.imag(), -2 * kH, 1e-8);
}

TEST(Gateaux, ZeroVariationIsExactlyZero) {
  const ActionSpec s{L1("v^2/2 + y"), kH};
  const auto y = sample([](double x) { return std::cos(x); });
  const auto w = sample([](double) { return 0.0; });
  EXPECT_EQ(gateaux_derivative(s, y, w), cplx(0));
}

TEST(Gateaux, ExactExtremalAgainstRandomVariations) {
  const ActionSpec s{L1("v^2/2 + y"), kH};
  const Trajectory1D y(sample([](double x) { return x * x / 2; }));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto w = admissible_variation(y.y().grid(), 1, kH, seed);
    EXPECT_LE(std::abs(gateaux_derivative(s, y, w)), 1e-6) << "seed " << seed;
  }
}

TEST(Gateaux, HigherOrderExtremal) {
  const ActionSpec s{lagrangian(Expression("v2^2/2"), 1), kH};
  const Trajectory1D y(sample([](double x) { return x * x * x; }, 16));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto w = admissible_variation(y.y().grid(), 2, kH, seed);
    EXPECT_LE(std::abs(gateaux_derivative(s, y, w)), 1e-6) << "seed " << seed;
  }
}

TEST(Gateaux, DoubleIntegralExtremal) {
  const ActionSpec s{lagrangian(Expression("(v1^2 + v2^2)/2"), 2), 1.0 / 32};
  const Grid2D g(Grid1D(0.0, 1.0, 65, 2), Grid1D(0.0, 1.0, 65, 2));
  const Trajectory2D y{GridFunction2D::sample(g, [](double a, double b) { return a * a - b * b; })};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto w = admissible_variation(g, 1.0 / 32, seed);
    EXPECT_LE(std::abs(gateaux_derivative(s, y, w)), 1e-6) << "seed " << seed;
  }
}

TEST(Gateaux, BoundedByResidualPairing) {
  // y = x is not extremal for v^2/2 + y; the residual is 1 everywhere
  const Lagrangian L = L1("v^2/2 + y");
  const Trajectory1D y(sample([](double x) { return x; }));
  const ELReport r = el_residual_1d(L, y, kH);
  const ActionSpec s{L, kH};
  const auto& res = std::get<GridFunction1D>(r.residual_field);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto w = admissible_variation(y.y().grid(), 1, kH, seed);
    const GridFunction1D pairing =
        res.crop(0).map([](cplx z) { return cplx(std::abs(z)); }) *
        w.crop(0).map([](cplx z) { return cplx(std::abs(z)); });
    const double bound = quad_1d(pairing).real() + 1e-8 * r.scale;
    EXPECT_LE(std::abs(gateaux_derivative(s, y, w)), bound);
  }
}

TEST(Gateaux, FixedBoundaryRejectsMovingEndpoints) {
  const ActionSpec s{L1("v^2"), kH};
  try {
    gateaux_derivative(s, sample([](double x) { return x; }), sample([](double x) { return x; }));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::variation_class_violation);
  }
  ActionSpec free = s;
  free.boundary = BoundaryKind::free;
  EXPECT_NO_THROW(
      gateaux_derivative(free, sample([](double x) { return x; }), sample([](double x) { return x; })));
}

TEST(Gateaux, GridMismatchThrows) {
  const ActionSpec s{L1("v^2"), kH};
  EXPECT_THROW(gateaux_derivative(s, sample([](double x) { return x; }),
                                  sample([](double) { return 0.0; }, 8, 129)),
               Error);
}
