#include <gtest/gtest.h>

#include "boxcalc/grid.hpp"

using namespace boxcalc;

TEST(Grid1D, NodesAndSpacing) {
  const Grid1D g(0.0, 2.0, 21, 3);
  EXPECT_DOUBLE_EQ(g.delta(), 0.1);
  EXPECT_EQ(g.size(), 27u);
  EXPECT_EQ(g.first(), 3u);
  EXPECT_EQ(g.last(), 23u);
  EXPECT_DOUBLE_EQ(g.node(0), -0.3);
  EXPECT_DOUBLE_EQ(g.node(g.first()), 0.0);
  EXPECT_EQ(g.node(g.last()), 2.0);
}

TEST(Grid1D, RejectsBadIntervalAndCount) {
  EXPECT_THROW(Grid1D(1.0, 1.0, 10), Error);
  EXPECT_THROW(Grid1D(0.0, 1.0, 2), Error);
  try {
    Grid1D(2.0, 1.0, 10);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::parameter_out_of_range);
  }
}

TEST(Grid1D, StepsMustBeGridMultiples) {
  const Grid1D g(0.0, 1.0, 101);
  EXPECT_EQ(g.steps(0.01), 1u);
  EXPECT_EQ(g.steps(0.05), 5u);
  try {
    g.steps(0.015);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::non_uniform_shift);
  }
}

TEST(Grid1D, LocateFindsNodesOnly) {
  const Grid1D g(0.0, 1.0, 11, 2);
  EXPECT_EQ(g.locate(0.0), 2u);
  EXPECT_EQ(g.locate(1.0), 12u);
  EXPECT_EQ(g.locate(-0.2), 0u);
  EXPECT_THROW(g.locate(0.05), Error);
  EXPECT_THROW(g.locate(1.5), Error);
}

TEST(GridFunction1D, ValueCountAndHolderRange) {
  const Grid1D g(0.0, 1.0, 5);
  EXPECT_THROW(GridFunction1D(g, std::vector<cplx>(4)), Error);
  EXPECT_THROW(GridFunction1D(g, std::vector<cplx>(5), Source::sampled, 1.2), Error);
  EXPECT_NO_THROW(GridFunction1D(g, std::vector<cplx>(5), Source::sampled, 0.5));
}

TEST(GridFunction1D, CropKeepsInteriorValues) {
  const auto f = GridFunction1D::sample(Grid1D(0.0, 1.0, 11, 3), [](double x) { return x; });
  const auto c = f.crop(1);
  EXPECT_EQ(c.grid().ghost(), 1u);
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_DOUBLE_EQ(c[k].real(), c.grid().node(k));
  EXPECT_THROW(c.crop(2), Error);
}

TEST(GridFunction1D, ArithmeticCropsToCommonGhostAndMergesTrust) {
  auto f = GridFunction1D::sample(Grid1D(0.0, 1.0, 11, 2), [](double x) { return x; });
  auto g = GridFunction1D::sample(Grid1D(0.0, 1.0, 11, 1), [](double) { return 2.0; });
  g.mark_untrusted(1);
  const auto s = f * g;
  EXPECT_EQ(s.grid().ghost(), 1u);
  EXPECT_FALSE(s.trusted(1));
  EXPECT_DOUBLE_EQ(s.at(0.5).real(), 1.0);
  EXPECT_THROW(f + GridFunction1D::sample(Grid1D(0.0, 2.0, 11), [](double) { return 0.0; }),
               Error);
}

TEST(GridFunction1D, SupNormSkipsUntrustedAndGhostNodes) {
  auto f = GridFunction1D::sample(Grid1D(0.0, 1.0, 11, 2), [](double x) { return x * 10; });
  EXPECT_DOUBLE_EQ(f.sup_norm(), 10.0);
  f.mark_untrusted(f.grid().last());
  EXPECT_DOUBLE_EQ(f.sup_norm(), 9.0);
}

TEST(Grid2D, RowMajorStorage) {
  const Grid2D g(Grid1D(0.0, 1.0, 3), Grid1D(0.0, 2.0, 5));
  EXPECT_EQ(g.size(), 15u);
  EXPECT_EQ(g.index(1, 2), 7u);
  const auto f = GridFunction2D::sample(g, [](double x1, double x2) { return x1 + 10 * x2; });
  EXPECT_DOUBLE_EQ(f(2, 4).real(), 21.0);
  EXPECT_THROW(GridFunction2D(g, std::vector<cplx>(14)), Error);
}

TEST(GridFunction2D, CropAndSupNorm) {
  const Grid2D g(Grid1D(0.0, 1.0, 5, 2), Grid1D(0.0, 1.0, 5, 1));
  const auto f = GridFunction2D::sample(g, [](double x1, double x2) { return x1 - x2; });
  EXPECT_DOUBLE_EQ(f.sup_norm(), 1.0);
  const auto c = f.crop(0, 0);
  EXPECT_EQ(c.size(), 25u);
  EXPECT_DOUBLE_EQ(c(4, 0).real(), 1.0);
}
