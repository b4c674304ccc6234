#pragma once

/**
 * @file solver.hpp
 * @brief Direct solvers for the fixed-h Euler-Lagrange equations of quadratic
 * Lagrangians: the 1D family A v^2 + B y^2 + c y + d v (optionally under one
 * linear integral constraint) and the box-Laplace membrane on a rectangle.
 *
 * B_h^2 has the five-tap stencil (offsets in units of m = h/delta)
 *
 *   -2: -i/2   -1: 1+i   0: -2   +1: 1-i   +2: i/2      (all / h^2)
 *
 * Taps beyond [a,b] are eliminated through quadratic extrapolation of the
 * boundary value and the two nearest inner nodes. Complex systems are solved
 * as real systems of twice the size.
 */

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "boxcalc/box_derivative.hpp"
#include "boxcalc/error.hpp"
#include "boxcalc/grid.hpp"

namespace boxcalc {

struct SolveStats {
  std::size_t unknowns = 0;
  std::string method;
  double residual = 0;  // max-norm of A x - b
  int iterations = 0;
  std::size_t ghost = 0;  // extrapolated ghost band of the returned solution
};

/// Sparse complex system with its right-hand side.
struct LinearELSystem {
  Eigen::SparseMatrix<cplx> matrix;
  Eigen::VectorXcd rhs;
  double tol = 1e-10;
  std::string context;  // h/grid description for diagnostics
};

inline constexpr std::size_t kDirectSolveLimit = 257 * 257;

/// Solves the complex system through its real doubled form.
inline Eigen::VectorXcd solve(const LinearELSystem& sys, SolveStats& stats) {
  using Triplet = Eigen::Triplet<double>;
  const Eigen::Index n = sys.matrix.rows();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(sys.matrix.nonZeros()) * 4);
  for (int k = 0; k < sys.matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(sys.matrix, k); it; ++it) {
      const auto r = it.row(), c = it.col();
      const double re = it.value().real(), im = it.value().imag();
      t.emplace_back(r, c, re);
      t.emplace_back(r + n, c + n, re);
      if (im != 0) {
        t.emplace_back(r, c + n, -im);
        t.emplace_back(r + n, c, im);
      }
    }
  }
  Eigen::SparseMatrix<double> M(2 * n, 2 * n);
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  Eigen::VectorXd b(2 * n);
  b << sys.rhs.real(), sys.rhs.imag();

  Eigen::VectorXd x;
  stats.unknowns = static_cast<std::size_t>(n);
  if (static_cast<std::size_t>(n) <= kDirectSolveLimit) {
    stats.method = "sparse LU";
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success) {
      throw Error(Errc::singular_system, "factorization failed for " + sys.context);
    }
    x = lu.solve(b);
    if (lu.info() != Eigen::Success) {
      throw Error(Errc::singular_system, "back substitution failed for " + sys.context);
    }
  } else {
    stats.method = "BiCGSTAB + ILUT";
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
    it.setTolerance(sys.tol);
    it.setMaxIterations(20000);
    it.compute(M);
    if (it.info() != Eigen::Success) {
      throw Error(Errc::singular_system, "preconditioner setup failed for " + sys.context);
    }
    x = it.solve(b);
    stats.iterations = static_cast<int>(it.iterations());
    if (it.info() != Eigen::Success) {
      throw Error(Errc::singular_system, "iterative solve did not converge for " + sys.context);
    }
  }
  if (!x.allFinite()) throw Error(Errc::singular_system, "non-finite solution for " + sys.context);
  stats.residual = (M * x - b).cwiseAbs().maxCoeff();
  const double bnorm = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (stats.residual > 1e3 * std::max(sys.tol, 1e-13) * bnorm) {
    throw Error(Errc::singular_system, "residual " + std::to_string(stats.residual) +
                                           " after solve; system is near singular for " +
                                           sys.context);
  }
  Eigen::VectorXcd out(n);
  out.real() = x.head(n);
  out.imag() = x.tail(n);
  return out;
}

namespace detail {

struct Tap {
  int offset;  // in units of m
  cplx weight;  // times 1/h^2
};

inline const std::array<Tap, 5>& box_square_stencil() {
  static const std::array<Tap, 5> s{{{-2, {0, -0.5}},
                                     {-1, {1, 1}},
                                     {0, {-2, 0}},
                                     {1, {1, -1}},
                                     {2, {0, 0.5}}}};
  return s;
}

struct NodeWeight {
  std::ptrdiff_t index;  // node on [0, N)
  double weight;
};

// Expresses node j (possibly outside [0, N)) through nodes inside, using
// quadratic extrapolation from the boundary node and its two neighbours.
inline std::array<NodeWeight, 3> extrapolated(std::ptrdiff_t j, std::ptrdiff_t N, int& count) {
  if (j >= 0 && j < N) {
    count = 1;
    return {{{j, 1.0}, {0, 0}, {0, 0}}};
  }
  count = 3;
  const double g = static_cast<double>(j < 0 ? -j : j - (N - 1));
  const double w0 = (g + 1) * (g + 2) / 2, w1 = -g * (g + 2), w2 = g * (g + 1) / 2;
  if (j < 0) return {{{0, w0}, {1, w1}, {2, w2}}};
  return {{{N - 1, w0}, {N - 2, w1}, {N - 3, w2}}};
}

inline cplx extrapolate_value(const std::vector<cplx>& line, std::ptrdiff_t j) {
  int count = 0;
  const auto taps = extrapolated(j, static_cast<std::ptrdiff_t>(line.size()), count);
  cplx v = 0;
  for (int t = 0; t < count; ++t) v += taps[t].weight * line[static_cast<std::size_t>(taps[t].index)];
  return v;
}

// Values on [a,b] extended by `ghost` extrapolated nodes on each side.
inline GridFunction1D with_extrapolated_ghosts(const Grid1D& grid, const std::vector<cplx>& inner,
                                               std::size_t ghost) {
  const Grid1D g = grid.with_ghost(ghost);
  std::vector<cplx> v(g.size());
  const auto G = static_cast<std::ptrdiff_t>(ghost);
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(g.size()); ++k) {
    v[static_cast<std::size_t>(k)] = extrapolate_value(inner, k - G);
  }
  return GridFunction1D(g, std::move(v));
}

}  // namespace detail

/// Checks the assembled B_h^2 stencil against two box_derivative_h passes on
/// `trials` random grid functions; returns the largest discrepancy.
inline double stencil_consistency(const Grid1D& grid, double h, std::uint64_t seed,
                                  int trials = 5) {
  const std::size_t m = grid.steps(h);
  const double hs = static_cast<double>(m) * grid.delta();
  const Grid1D g = grid.with_ghost(2 * m);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<cplx> v(g.size());
    for (auto& z : v) z = cplx(u(rng), u(rng));
    const GridFunction1D f(g, v);
    const GridFunction1D ref = box_derivative_n(f, h, 2);
    for (std::size_t k = g.first(); k <= g.last(); ++k) {
      cplx s = 0;
      for (const auto& tap : detail::box_square_stencil()) {
        s += tap.weight * f[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) +
                                                     tap.offset * static_cast<std::ptrdiff_t>(m))];
      }
      s /= hs * hs;
      const double scale = std::max(1.0, std::abs(ref[k - 2 * m]));
      worst = std::max(worst, std::abs(s - ref[k - 2 * m]) / scale);
    }
  }
  return worst;
}

/// L = A v^2 + B y^2 + c y + d v with constant complex coefficients.
struct QuadraticLagrangian1D {
  cplx A = 0.5;
  cplx B = 0;
  cplx c = 0;
  cplx d = 0;
};

/// Integral constraint int_a^b (t1 y + t0) dx = value, with multiplier unknown.
struct LinearConstraint {
  cplx t1 = 1;
  cplx t0 = 0;
  cplx value = 0;
};

struct LinearSolution1D {
  GridFunction1D y;
  std::optional<cplx> multiplier;
  SolveStats stats;
};

/// Solves 2B y + c - B_h(2A B_h y + d) = lambda t1 at interior nodes with
/// y(a) = ya, y(b) = yb (and the trapezoid constraint when given).
inline LinearSolution1D solve_linear_el_1d(const QuadraticLagrangian1D& L, cplx ya, cplx yb,
                                           const Grid1D& grid, double h,
                                           std::optional<LinearConstraint> constraint = {},
                                           double tol = 1e-10) {
  const std::string context = "h = " + std::to_string(h) + ", n = " + std::to_string(grid.n());
  if (L.A == cplx{}) throw Error(Errc::singular_system, "A = 0 leaves no box term; " + context);
  if (grid.n() < 4) throw Error(Errc::singular_system, "need n >= 4 for " + context);
  const std::size_t m = grid.steps(h);
  const double hs = static_cast<double>(m) * grid.delta();
  const auto N = static_cast<std::ptrdiff_t>(grid.n());
  const auto M = static_cast<std::ptrdiff_t>(m);
  const Eigen::Index inner = N - 2;
  const Eigen::Index dim = inner + (constraint ? 1 : 0);

  std::vector<Eigen::Triplet<cplx>> t;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
  auto add = [&](Eigen::Index row, std::ptrdiff_t node, cplx w) {
    if (node == 0) {
      rhs[row] -= w * ya;
    } else if (node == N - 1) {
      rhs[row] -= w * yb;
    } else {
      t.emplace_back(row, node - 1, w);
    }
  };
  for (std::ptrdiff_t k = 1; k < N - 1; ++k) {
    const Eigen::Index row = k - 1;
    add(row, k, 2.0 * L.B);
    for (const auto& tap : detail::box_square_stencil()) {
      int count = 0;
      const auto taps = detail::extrapolated(k + tap.offset * M, N, count);
      for (int q = 0; q < count; ++q) {
        add(row, taps[q].index, -2.0 * L.A * tap.weight * taps[q].weight / (hs * hs));
      }
    }
    rhs[row] -= L.c;
    if (constraint) t.emplace_back(row, inner, -constraint->t1);
  }
  if (constraint) {
    const Eigen::Index row = inner;
    const double dx = grid.delta();
    for (std::ptrdiff_t k = 0; k < N; ++k) {
      const double w = (k == 0 || k == N - 1) ? 0.5 * dx : dx;
      add(row, k, constraint->t1 * w);
    }
    rhs[row] += constraint->value - constraint->t0 * (grid.b() - grid.a());
  }

  LinearELSystem sys;
  sys.matrix.resize(dim, dim);
  sys.matrix.setFromTriplets(t.begin(), t.end());
  sys.matrix.makeCompressed();
  sys.rhs = std::move(rhs);
  sys.tol = tol;
  sys.context = context;
  LinearSolution1D out{GridFunction1D(grid, std::vector<cplx>(grid.size())), std::nullopt, {}};
  const Eigen::VectorXcd x = solve(sys, out.stats);

  std::vector<cplx> line(static_cast<std::size_t>(N));
  line.front() = ya;
  line.back() = yb;
  for (Eigen::Index k = 0; k < inner; ++k) line[static_cast<std::size_t>(k + 1)] = x[k];
  if (constraint) out.multiplier = x[inner];
  out.stats.ghost = 2 * m - 1;
  out.y = detail::with_extrapolated_ghosts(grid, line, out.stats.ghost);
  return out;
}

/// Dirichlet data on the four edges of R, each sampled at that edge's nodes.
struct MembraneBoundary {
  std::optional<std::vector<cplx>> x1_a, x1_b;  // along x2, at x1 = a and x1 = b
  std::optional<std::vector<cplx>> x2_c, x2_d;  // along x1, at x2 = c and x2 = d

  template <class F>
  static MembraneBoundary from_function(const Grid2D& grid, F&& u) {
    const Grid1D& a1 = grid.axis1();
    const Grid1D& a2 = grid.axis2();
    MembraneBoundary b;
    b.x1_a.emplace();
    b.x1_b.emplace();
    b.x2_c.emplace();
    b.x2_d.emplace();
    for (std::size_t j = a2.first(); j <= a2.last(); ++j) {
      b.x1_a->push_back(cplx(u(a1.a(), a2.node(j))));
      b.x1_b->push_back(cplx(u(a1.b(), a2.node(j))));
    }
    for (std::size_t i = a1.first(); i <= a1.last(); ++i) {
      b.x2_c->push_back(cplx(u(a1.node(i), a2.a())));
      b.x2_d->push_back(cplx(u(a1.node(i), a2.b())));
    }
    return b;
  }
};

struct MembraneSolution {
  GridFunction2D u;
  SolveStats stats;
};

/// Solves B_1(B_1 u) + B_2(B_2 u) = 0 on the interior of R with u given on the boundary.
inline MembraneSolution solve_membrane(const MembraneBoundary& boundary, const Grid2D& grid,
                                       double h, double tol = 1e-10) {
  const Grid1D a1 = grid.axis1().with_ghost(0);
  const Grid1D a2 = grid.axis2().with_ghost(0);
  const auto N1 = static_cast<std::ptrdiff_t>(a1.n());
  const auto N2 = static_cast<std::ptrdiff_t>(a2.n());
  auto edge_ok = [](const std::optional<std::vector<cplx>>& e, std::ptrdiff_t n) {
    return e && static_cast<std::ptrdiff_t>(e->size()) == n;
  };
  if (!edge_ok(boundary.x1_a, N2) || !edge_ok(boundary.x1_b, N2) ||
      !edge_ok(boundary.x2_c, N1) || !edge_ok(boundary.x2_d, N1)) {
    throw Error(Errc::boundary_incomplete,
                "membrane needs samples on all four edges matching the grid node counts");
  }
  const double corner_gap = std::max(
      {std::abs((*boundary.x1_a)[0] - (*boundary.x2_c)[0]),
       std::abs((*boundary.x1_a)[N2 - 1] - (*boundary.x2_d)[0]),
       std::abs((*boundary.x1_b)[0] - (*boundary.x2_c)[N1 - 1]),
       std::abs((*boundary.x1_b)[N2 - 1] - (*boundary.x2_d)[N1 - 1])});
  if (corner_gap > 1e-12) {
    throw Error(Errc::boundary_incomplete, "edge samples disagree at a corner");
  }
  const std::string context = "h = " + std::to_string(h) + ", grid " + std::to_string(N1) + "x" +
                              std::to_string(N2);
  if (N1 < 4 || N2 < 4) throw Error(Errc::singular_system, "need at least 4 nodes per axis for " + context);
  const std::size_t m1 = a1.steps(h), m2 = a2.steps(h);
  const double h1 = static_cast<double>(m1) * a1.delta();
  const double h2 = static_cast<double>(m2) * a2.delta();

  auto known = [&](std::ptrdiff_t i, std::ptrdiff_t j) -> std::optional<cplx> {
    if (i == 0) return (*boundary.x1_a)[static_cast<std::size_t>(j)];
    if (i == N1 - 1) return (*boundary.x1_b)[static_cast<std::size_t>(j)];
    if (j == 0) return (*boundary.x2_c)[static_cast<std::size_t>(i)];
    if (j == N2 - 1) return (*boundary.x2_d)[static_cast<std::size_t>(i)];
    return std::nullopt;
  };
  const std::ptrdiff_t in2 = N2 - 2;
  auto col = [&](std::ptrdiff_t i, std::ptrdiff_t j) { return (i - 1) * in2 + (j - 1); };
  const Eigen::Index dim = (N1 - 2) * in2;

  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(dim) * 18);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
  auto add = [&](Eigen::Index row, std::ptrdiff_t i, std::ptrdiff_t j, cplx w) {
    if (auto v = known(i, j)) {
      rhs[row] -= w * *v;
    } else {
      t.emplace_back(row, col(i, j), w);
    }
  };
  for (std::ptrdiff_t i = 1; i < N1 - 1; ++i) {
    for (std::ptrdiff_t j = 1; j < N2 - 1; ++j) {
      const Eigen::Index row = col(i, j);
      for (const auto& tap : detail::box_square_stencil()) {
        int count = 0;
        auto taps = detail::extrapolated(i + tap.offset * static_cast<std::ptrdiff_t>(m1), N1, count);
        for (int q = 0; q < count; ++q) add(row, taps[q].index, j, tap.weight * taps[q].weight / (h1 * h1));
        taps = detail::extrapolated(j + tap.offset * static_cast<std::ptrdiff_t>(m2), N2, count);
        for (int q = 0; q < count; ++q) add(row, i, taps[q].index, tap.weight * taps[q].weight / (h2 * h2));
      }
    }
  }
  LinearELSystem sys;
  sys.matrix.resize(dim, dim);
  sys.matrix.setFromTriplets(t.begin(), t.end());
  sys.matrix.makeCompressed();
  sys.rhs = std::move(rhs);
  sys.tol = tol;
  sys.context = context;
  SolveStats stats;
  const Eigen::VectorXcd x = solve(sys, stats);

  // assemble [a,b]x[c,d], then extend along axis 2 and then along axis 1
  const std::size_t g1 = 2 * m1 - 1, g2 = 2 * m2 - 1;
  const Grid2D og(a1.with_ghost(g1), a2.with_ghost(g2));
  GridFunction2D u(og, std::vector<cplx>(og.size()));
  std::vector<std::vector<cplx>> rows(static_cast<std::size_t>(N1), std::vector<cplx>(static_cast<std::size_t>(N2)));
  for (std::ptrdiff_t i = 0; i < N1; ++i) {
    for (std::ptrdiff_t j = 0; j < N2; ++j) {
      const auto v = known(i, j);
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v ? *v : x[col(i, j)];
    }
  }
  const auto G1 = static_cast<std::ptrdiff_t>(g1), G2 = static_cast<std::ptrdiff_t>(g2);
  std::vector<std::vector<cplx>> wide(static_cast<std::size_t>(N1));
  for (std::ptrdiff_t i = 0; i < N1; ++i) {
    auto& w = wide[static_cast<std::size_t>(i)];
    for (std::ptrdiff_t j = -G2; j < N2 + G2; ++j) {
      w.push_back(detail::extrapolate_value(rows[static_cast<std::size_t>(i)], j));
    }
  }
  std::vector<cplx> column(static_cast<std::size_t>(N1));
  for (std::size_t jj = 0; jj < og.axis2().size(); ++jj) {
    for (std::ptrdiff_t i = 0; i < N1; ++i) column[static_cast<std::size_t>(i)] = wide[static_cast<std::size_t>(i)][jj];
    for (std::ptrdiff_t i = -G1; i < N1 + G1; ++i) {
      u(static_cast<std::size_t>(i + G1), jj) = detail::extrapolate_value(column, i);
    }
  }
  stats.ghost = std::min(g1, g2);
  return {std::move(u), stats};
}

/// Membrane with boundary data taken from a closed-form function.
template <class F>
MembraneSolution solve_membrane(F&& boundary_fn, const Grid2D& grid, double h, double tol = 1e-10)
  requires std::is_invocable_v<F, double, double>
{
  return solve_membrane(MembraneBoundary::from_function(grid, boundary_fn), grid, h, tol);
}

}  // namespace boxcalc
