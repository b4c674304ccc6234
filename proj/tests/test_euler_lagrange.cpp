#include <gtest/gtest.h>

#include <random>

#include "boxcalc/euler_lagrange.hpp"
#include "boxcalc/expression.hpp"

using namespace boxcalc;

namespace {

constexpr double kH = 1.0 / 64;

Lagrangian L1(const char* text, std::optional<unsigned> order = std::nullopt) {
  return lagrangian(Expression(text), 1, order);
}

Lagrangian L2(const char* text) { return lagrangian(Expression(text), 2); }

template <class F>
Trajectory1D traj(F&& f, BoundaryKind bk = BoundaryKind::fixed, unsigned order = 1,
                  std::size_t n = 257) {
  const Grid1D g(0.0, 1.0, n, 2 * order * 4 * (n - 1) / 256);
  return Trajectory1D(GridFunction1D::sample(g, f), bk);
}

template <class F>
Trajectory2D traj2(F&& f, BoundaryKind bk = BoundaryKind::fixed, std::size_t n = 65) {
  const Grid2D g(Grid1D(0.0, 1.0, n, 2), Grid1D(0.0, 1.0, n, 2));
  return {GridFunction2D::sample(g, f), bk};
}

double sup_minus(const GridFunction1D& f, cplx c) {
  double s = 0;
  for (std::size_t k = f.grid().first(); k <= f.grid().last(); ++k) {
    s = std::max(s, std::abs(f[k] - c));
  }
  return s;
}

double sup_minus(const GridFunction2D& f, cplx c) {
  double s = 0;
  const auto& a1 = f.grid().axis1();
  const auto& a2 = f.grid().axis2();
  for (std::size_t i = a1.first(); i <= a1.last(); ++i) {
    for (std::size_t j = a2.first(); j <= a2.last(); ++j) s = std::max(s, std::abs(f(i, j) - c));
  }
  return s;
}

const GridFunction1D& field1(const ELReport& r) { return std::get<GridFunction1D>(r.residual_field); }
const GridFunction2D& field2(const ELReport& r) { return std::get<GridFunction2D>(r.residual_field); }

}  // namespace

TEST(FirstOrder, FreeParticleOnLineIsExtremal) {
  for (double h : {1.0 / 256, kH}) {
    const ELReport r = el_residual_1d(L1("v^2/2"), traj([](double x) { return x; }), h);
    EXPECT_LE(r.residual_norm, 1e-12);
    EXPECT_TRUE(r.is_extremal);
  }
}

TEST(FirstOrder, UniformLoadParabolaIsExtremal) {
  for (double h : {1.0 / 256, 2.0 / 256, kH}) {
    const ELReport r =
        el_residual_1d(L1("v^2/2 + y"), traj([](double x) { return x * x / 2; }), h);
    EXPECT_LE(r.residual_norm, 1e-12) << "h = " << h;
    EXPECT_TRUE(r.is_extremal);
    EXPECT_EQ(r.variant, ELVariant::first_order);
  }
}

TEST(FirstOrder, LineUnderLoadLeavesUnitResidual) {
  const ELReport r = el_residual_1d(L1("v^2/2 + y"), traj([](double x) { return x; }), kH);
  EXPECT_LE(sup_minus(field1(r), 1.0), 1e-12);
  EXPECT_FALSE(r.is_extremal);
}

TEST(FirstOrder, RejectsParameterAndTwoDimensionalLagrangians) {
  const auto y = traj([](double x) { return x; });
  EXPECT_THROW(el_residual_1d(L1("(v - xi)^2"), y, kH), Error);
  try {
    el_residual_1d(L2("v1^2"), y, kH);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::arity_mismatch);
  }
}

TEST(FirstOrder, FiniteDifferencePartialsMeetTheSmoothTolerance) {
  const Lagrangian L({false, 1, false, 1}, [](const LagrangianArgs& a) {
    return a.v[0] * a.v[0] / 2.0 + a.y;
  });
  const ELReport r = el_residual_1d(L, traj([](double x) { return x * x / 2; }), kH);
  EXPECT_LE(r.residual_norm, 1e-6);
  EXPECT_TRUE(r.is_extremal_smooth);
}

TEST(FirstOrder, SampledDataFlagsBoundaryNodes) {
  const Grid1D g(0.0, 1.0, 65);
  const Trajectory1D y(GridFunction1D::sample(g, [](double x) { return x * x / 2; },
                                              Source::sampled));
  const ELReport r = el_residual_1d(L1("v^2/2 + y"), y, kH);
  EXPECT_GT(field1(r).untrusted_count(), 0u);
  EXPECT_LE(r.residual_norm, 1e-12);
}

TEST(FirstOrder, ConvergesToClassicalResidual) {
  // L = v^2/2 + y^2/2, y = sin: classical residual y - y'' = 2 sin x
  const Lagrangian L = L1("v^2/2 + y^2/2");
  const auto y = traj([](double x) { return std::sin(x); }, BoundaryKind::fixed, 1, 1025);
  std::vector<double> err;
  for (int m : {16, 8, 4, 2}) {
    const double h = m / 1024.0;
    const ELReport r = el_residual_1d(L, y, h);
    const GridFunction1D& f = field1(r);
    double worst = 0;
    for (std::size_t k = f.grid().first(); k <= f.grid().last(); ++k) {
      worst = std::max(worst, std::abs(f[k] - 2 * std::sin(f.grid().node(k))));
    }
    EXPECT_LE(worst, 2 * h);
    err.push_back(worst);
  }
  for (std::size_t k = 1; k < err.size(); ++k) EXPECT_LT(err[k], err[k - 1]);
}

TEST(FirstOrder, SmoothEPartCheckIsQuietOnPolynomials) {
  ELOptions opt;
  opt.check_condition3 = true;
  const ELReport r = el_residual_1d(L1("v^2/2 + y"),
                                    traj([](double x) { return x * x / 2; }, BoundaryKind::fixed,
                                         1, 1025),
                                    1.0 / 1024, opt);
  EXPECT_TRUE(r.warnings.empty()) << ::testing::PrintToString(r.warnings);
}

TEST(NaturalBC, ConstantPasses) {
  const ELReport r = natural_bc_1d(L1("v^2/2"), traj([](double) { return 3.0; }, BoundaryKind::free),
                                   kH);
  ASSERT_EQ(r.boundary_defects.size(), 2u);
  EXPECT_EQ(r.boundary_defects[0].value, cplx(0));
  EXPECT_EQ(r.boundary_defects[1].value, cplx(0));
  EXPECT_EQ(r.residual_norm, 0.0);
  EXPECT_TRUE(r.is_extremal);
}

TEST(NaturalBC, LineFailsWithUnitDefects) {
  const ELReport r =
      natural_bc_1d(L1("v^2/2"), traj([](double x) { return x; }, BoundaryKind::free), kH);
  EXPECT_NEAR(std::abs(r.boundary_defects[0].value - 1.0), 0, 1e-12);
  EXPECT_NEAR(std::abs(r.boundary_defects[1].value - 1.0), 0, 1e-12);
  EXPECT_LE(r.residual_norm, 1e-12);
  EXPECT_FALSE(r.is_extremal);
}

TEST(NaturalBC, ShiftedQuadraticPasses) {
  const ELReport r =
      natural_bc_1d(L1("(v - 1)^2/2"), traj([](double x) { return x; }, BoundaryKind::free), kH);
  EXPECT_LE(std::abs(r.boundary_defects[0].value), 1e-12);
  EXPECT_LE(std::abs(r.boundary_defects[1].value), 1e-12);
  EXPECT_TRUE(r.is_extremal);
}

TEST(NaturalBC, NeedsFreeBoundary) {
  EXPECT_THROW(natural_bc_1d(L1("v^2/2"), traj([](double x) { return x; }), kH), Error);
}

TEST(HigherOrder, BeamCubicIsExtremal) {
  for (double h : {1.0 / 256, kH}) {
    const ELReport r = el_residual_higher(L1("v2^2/2"),
                                          traj([](double x) { return x * x * x; },
                                               BoundaryKind::fixed, 2),
                                          h);
    EXPECT_LE(r.residual_norm, 1e-9) << "h = " << h;
  }
}

TEST(HigherOrder, QuarticLeavesTwentyFour) {
  const ELReport r = el_residual_higher(
      L1("v2^2/2"), traj([](double x) { return x * x * x * x; }, BoundaryKind::fixed, 2), kH);
  const GridFunction1D& f = field1(r);
  for (std::size_t k = f.grid().first(); k <= f.grid().last(); ++k) {
    EXPECT_NEAR(f[k].real(), 24.0, 1e-6);
    EXPECT_NEAR(f[k].imag(), 0.0, 1e-6);
  }
  EXPECT_FALSE(r.is_extremal);
}

TEST(HigherOrder, OrderOneMatchesFirstOrder) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 5; ++t) {
    const double a = u(rng), b = u(rng), c = u(rng), p = u(rng), q = u(rng);
    const Lagrangian L({false, 1, false, 1}, [=](const LagrangianArgs& x) {
      return a * x.v[0] * x.v[0] + b * x.y * x.y + c * x.y * x.v[0];
    });
    const auto y = traj([=](double x) { return p * x * x + q * std::sin(3 * x); });
    const GridFunction1D f = field1(el_residual_1d(L, y, kH));
    const GridFunction1D g = field1(el_residual_higher(L, y, kH));
    EXPECT_EQ(f.grid(), g.grid());
    EXPECT_EQ(f.values(), g.values());
  }
}

TEST(Isoperimetric, RecoversUnitMultiplier) {
  const auto y = traj([](double x) { return (x - x * x) / 4; });
  const ELReport r = iso_solve(L1("v^2"), L1("y"), y, 1.0 / 24, kH);
  ASSERT_TRUE(r.multiplier);
  EXPECT_NEAR(std::abs(*r.multiplier - 1.0), 0, 1e-6);
  EXPECT_LE(r.residual_norm, r.smooth_tol);
  EXPECT_EQ(r.variant, ELVariant::isoperimetric);
}

TEST(Isoperimetric, MultiplierScalesWithTrajectory) {
  for (double s : {0.5, 2.0, -3.0}) {
    const auto y = traj([s](double x) { return s * (x - x * x) / 4; });
    const ELReport r = iso_solve(L1("v^2"), L1("y"), y, s / 24, kH);
    EXPECT_NEAR(std::abs(*r.multiplier - s), 0, 1e-6 * std::abs(s));
  }
}

TEST(Isoperimetric, MultiplierInvariantUnderConstantShift) {
  const auto y = traj([](double x) { return (x - x * x) / 4; });
  const cplx base = *iso_solve(L1("v^2"), L1("y"), y, 1.0 / 24, kH).multiplier;
  const cplx shifted = *iso_solve(L1("v^2 + 5"), L1("y"), y, 1.0 / 24, kH).multiplier;
  const cplx via_api = *iso_solve(L1("v^2").plus_constant(cplx(2, -1)), L1("y"), y, 1.0 / 24, kH)
                            .multiplier;
  EXPECT_NEAR(std::abs(shifted - base), 0, 1e-9 * std::abs(base));
  EXPECT_NEAR(std::abs(via_api - base), 0, 1e-9 * std::abs(base));
  // theta scaled by 3 (with its level) divides lambda by 3
  const cplx scaled = *iso_solve(L1("v^2"), L1("3*y"), y, 3.0 / 24, kH).multiplier;
  EXPECT_NEAR(std::abs(scaled - base / 3.0), 0, 1e-9);
}

TEST(Isoperimetric, DegenerateConstraintIsRejected) {
  try {
    iso_solve(L1("v^2"), L1("v^2/2"), traj([](double x) { return x; }), 0.5, kH);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::nondegeneracy_failure);
  }
}

TEST(Isoperimetric, WrongLevelIsRejected) {
  try {
    iso_solve(L1("v^2"), L1("y"), traj([](double x) { return (x - x * x) / 4; }), 1.0, kH);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::constraint_violated);
  }
}

TEST(Parameter, SolvesForUnitSlope) {
  const ELReport r = solve_parameter(L1("(v - xi)^2"), traj([](double x) { return x; }), kH);
  ASSERT_TRUE(r.parameter);
  EXPECT_NEAR(std::abs(*r.parameter - 1.0), 0, 1e-12);
  EXPECT_LE(r.residual_norm, 1e-12);
  EXPECT_TRUE(r.is_extremal);
}

TEST(Parameter, IntegralAtZeroIsMinusTwo) {
  const ELReport r =
      el_residual_parameter(L1("(v - xi)^2"), traj([](double x) { return x; }), 0.0, kH);
  EXPECT_NEAR(std::abs(r.boundary_defects.front().value + 2.0), 0, 1e-9);
  EXPECT_FALSE(r.is_extremal);
}

TEST(Parameter, IndependentLagrangianGivesZeroIntegral) {
  const auto y = traj([](double x) { return x; });
  for (double xi : {-1.0, 0.0, 2.5}) {
    const ELReport r = el_residual_parameter(L1("v^2/2 + 0*xi"), y, xi, kH);
    EXPECT_EQ(r.boundary_defects.front().value, cplx(0));
  }
}

TEST(Parameter, SeparableResidualIgnoresXi) {
  const auto y = traj([](double x) { return x * x; });
  const Lagrangian L = L1("v^2/2 + y + xi^2");
  const GridFunction1D a = field1(el_residual_parameter(L, y, 0.3, kH));
  const GridFunction1D b = field1(el_residual_parameter(L, y, -4.0, kH));
  EXPECT_EQ(a.values(), b.values());
}

TEST(Parameter, NonAffineIntegralIsRejected) {
  try {
    solve_parameter(L1("v^2 + xi^4"), traj([](double x) { return x; }), kH);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_affine);
  }
}

TEST(DoubleIntegral, SaddleIsExtremal) {
  const ELReport r = el_residual_2d(L2("(v1^2 + v2^2)/2"),
                                    traj2([](double a, double b) { return a * a - b * b; }),
                                    1.0 / 64);
  EXPECT_LE(r.residual_norm, 1e-12);
  EXPECT_TRUE(r.is_extremal);
}

TEST(DoubleIntegral, ConstantIsExtremal) {
  const ELReport r =
      el_residual_2d(L2("(v1^2 + v2^2)/2"), traj2([](double, double) { return 1.5; }), 1.0 / 64);
  EXPECT_EQ(r.residual_norm, 0.0);
}

TEST(DoubleIntegral, OneSidedParabolaLeavesMinusTwo) {
  const ELReport r = el_residual_2d(L2("(v1^2 + v2^2)/2"),
                                    traj2([](double a, double) { return a * a; }), 1.0 / 64);
  EXPECT_LE(sup_minus(field2(r), -2.0), 1e-10);
  EXPECT_FALSE(r.is_extremal);
}

TEST(NaturalBC2D, ConstantPassesAllFive) {
  const ELReport r = natural_bc_2d(L2("(v1^2 + v2^2)/2"),
                                   traj2([](double, double) { return 1.0; }, BoundaryKind::free),
                                   1.0 / 64);
  ASSERT_EQ(r.boundary_defects.size(), 4u);
  for (const auto& d : r.boundary_defects) EXPECT_EQ(d.value, cplx(0));
  EXPECT_TRUE(r.is_extremal);
}

TEST(NaturalBC2D, LinearInX1FailsOnTwoEdges) {
  const ELReport r = natural_bc_2d(L2("(v1^2 + v2^2)/2"),
                                   traj2([](double a, double) { return a; }, BoundaryKind::free),
                                   1.0 / 64);
  EXPECT_NEAR(r.boundary_defects[0].value.real(), 1.0, 1e-12);
  EXPECT_NEAR(r.boundary_defects[1].value.real(), 1.0, 1e-12);
  EXPECT_LE(std::abs(r.boundary_defects[2].value), 1e-12);
  EXPECT_LE(std::abs(r.boundary_defects[3].value), 1e-12);
  EXPECT_LE(r.residual_norm, 1e-12);
  EXPECT_FALSE(r.is_extremal);
}

TEST(NaturalBC2D, ShiftedQuadraticPasses) {
  const ELReport r = natural_bc_2d(L2("((v1 - 1)^2 + v2^2)/2"),
                                   traj2([](double a, double) { return a; }, BoundaryKind::free),
                                   1.0 / 64);
  for (const auto& d : r.boundary_defects) EXPECT_LE(std::abs(d.value), 1e-12);
  EXPECT_TRUE(r.is_extremal);
}

TEST(AdmissibleVariation, VanishesNearBothEnds) {
  const Grid1D g(0.0, 1.0, 257, 8);
  for (unsigned order : {1u, 2u}) {
    const GridFunction1D w = admissible_variation(g, order, kH, 7);
    const std::size_t band = 2 * order * 4 + 2;
    for (std::size_t k = 0; k < g.first() + band; ++k) EXPECT_EQ(w[k], cplx(0));
    for (std::size_t k = g.last() - band + 1; k < g.size(); ++k) EXPECT_EQ(w[k], cplx(0));
    EXPECT_GT(w.sup_norm(), 0.0);
  }
}

TEST(AdmissibleVariation, SeedsGiveDifferentDraws) {
  const Grid1D g(0.0, 1.0, 129);
  EXPECT_NE(admissible_variation(g, 1, 1.0 / 128, 1).values(),
            admissible_variation(g, 1, 1.0 / 128, 2).values());
  EXPECT_EQ(admissible_variation(g, 1, 1.0 / 128, 3).values(),
            admissible_variation(g, 1, 1.0 / 128, 3).values());
}
