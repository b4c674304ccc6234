#pragma once

/**
 * @file euler_lagrange.hpp
 * @brief Residual evaluators for the box-calculus Euler-Lagrange equations.
 *
 * All residuals are evaluated at a fixed working step h with the complex box
 * rule applied at every stage:
 *
 *   first order     dL/dy[y] - B(dL/dv[y])
 *   higher order    dL/dy[y]^n + sum_i (-1)^i B^i(dL/dv_i[y]^n)
 *   double integral dL/dy[y] - B_1(dL/dv1[y]) - B_2(dL/dv2[y])
 *
 * plus natural boundary conditions, the isoperimetric multiplier and the
 * parameter condition. Nodes whose values depend on a one-sided boundary
 * fallback are excluded from residual norms.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "boxcalc/box_derivative.hpp"
#include "boxcalc/error.hpp"
#include "boxcalc/grid.hpp"
#include "boxcalc/identities.hpp"
#include "boxcalc/lagrangian.hpp"
#include "boxcalc/quadrature.hpp"
#include "boxcalc/scale_limit.hpp"

namespace boxcalc {

enum class BoundaryKind { fixed, free };

/// y on a 1D grid with its boundary treatment and an optional box-derivative cache.
class Trajectory1D {
 public:
  explicit Trajectory1D(GridFunction1D y, BoundaryKind boundary = BoundaryKind::fixed)
      : y_(std::move(y)), boundary_(boundary) {
    ya_ = y_[y_.grid().first()];
    yb_ = y_[y_.grid().last()];
  }

  const GridFunction1D& y() const noexcept { return y_; }
  BoundaryKind boundary() const noexcept { return boundary_; }
  cplx ya() const noexcept { return ya_; }
  cplx yb() const noexcept { return yb_; }

  /// Precomputes B_h^k y for k = 1..order (with boundary fallback).
  Trajectory1D& cache(double h, unsigned order) {
    cache_h_ = h;
    box_cache_.clear();
    GridFunction1D cur = y_;
    for (unsigned k = 0; k < order; ++k) {
      cur = box_derivative_h(cur, h, BoxOptions{true});
      box_cache_.push_back(cur);
    }
    return *this;
  }

  /// Cached B_h^k y, if present for this h.
  const GridFunction1D* cached(double h, unsigned k) const {
    if (k == 0) return &y_;
    if (cache_h_ == h && k <= box_cache_.size()) return &box_cache_[k - 1];
    return nullptr;
  }

 private:
  GridFunction1D y_;
  BoundaryKind boundary_;
  cplx ya_, yb_;
  double cache_h_ = 0;
  std::vector<GridFunction1D> box_cache_;
};

struct Trajectory2D {
  GridFunction2D y;
  BoundaryKind boundary = BoundaryKind::fixed;
};

enum class ELVariant {
  first_order,
  natural_bc,
  isoperimetric,
  parameter,
  higher_order,
  double_integral,
  natural_bc_2d
};

inline std::string_view to_string(ELVariant v) {
  switch (v) {
    case ELVariant::first_order: return "first_order";
    case ELVariant::natural_bc: return "natural_bc";
    case ELVariant::isoperimetric: return "isoperimetric";
    case ELVariant::parameter: return "parameter";
    case ELVariant::higher_order: return "higher_order";
    case ELVariant::double_integral: return "double_integral";
    case ELVariant::natural_bc_2d: return "natural_bc_2d";
  }
  return "unknown";
}

struct ELOptions {
  /// Absolute tolerance; defaults to 1e-8 * scale.
  std::optional<double> tol;
  /// C in the smooth-limit tolerance C * h * scale.
  double smooth_constant = 10.0;
  /// Run the vanishing-E-part check on dL/dv * w for three sampled w.
  bool check_condition3 = false;
};

struct ELReport {
  ELVariant variant = ELVariant::first_order;
  std::variant<GridFunction1D, GridFunction2D> residual_field{
      GridFunction1D(Grid1D(0, 1, 3), std::vector<cplx>(3))};
  double residual_norm = 0;
  std::vector<NamedValue> boundary_defects;
  std::optional<cplx> multiplier;
  std::optional<cplx> parameter;
  double h = 0;
  double scale = 1;
  double tol = 0;
  double smooth_tol = 0;
  bool is_extremal = false;
  bool is_extremal_smooth = false;
  std::vector<std::string> warnings;
};

namespace detail {

inline constexpr BoxOptions kFallback{true};

// y and its first `order` box derivatives cropped to a common ghost band.
struct Bracket1D {
  GridFunction1D y;
  std::vector<GridFunction1D> v;
};

inline Bracket1D bracket(const Trajectory1D& t, double h, unsigned order, BoxOptions opt) {
  std::vector<GridFunction1D> v;
  const GridFunction1D* cur = &t.y();
  v.reserve(order);
  for (unsigned k = 1; k <= order; ++k) {
    const GridFunction1D* c = opt.allow_fallback ? t.cached(h, k) : nullptr;
    if (c) {
      v.push_back(*c);
    } else {
      v.push_back(box_derivative_h(*cur, h, opt));
    }
    cur = &v.back();
  }
  std::size_t ghost = t.y().grid().ghost();
  for (const auto& f : v) ghost = std::min(ghost, f.grid().ghost());
  Bracket1D b{t.y().crop(ghost), {}};
  for (auto& f : v) b.v.push_back(f.crop(ghost));
  return b;
}

inline Bracket1D bracket(const GridFunction1D& y, double h, unsigned order, BoxOptions opt) {
  return bracket(Trajectory1D(y), h, order, opt);
}

// Evaluates `fn` on [y](x) at every node of the bracket grid.
template <class Fn>
GridFunction1D eval_field(const Bracket1D& b, cplx xi, Fn&& fn) {
  GridFunction1D out = b.y.map([](cplx) { return cplx{}; });
  const Grid1D& g = b.y.grid();
  LagrangianArgs a;
  a.xi = xi;
  for (std::size_t k = 0; k < g.size(); ++k) {
    a.x1 = g.node(k);
    a.y = b.y[k];
    bool bad = !b.y.trusted(k);
    for (std::size_t i = 0; i < b.v.size(); ++i) {
      a.v[i] = b.v[i][k];
      bad = bad || !b.v[i].trusted(k);
    }
    out[k] = fn(a);
    if (bad) out.mark_untrusted(k);
  }
  return out;
}

struct Bracket2D {
  GridFunction2D y, v1, v2;
};

inline Bracket2D bracket(const GridFunction2D& y, double h, BoxOptions opt) {
  const GridFunction2D d1 = partial_box_derivative_h(y, h, 1, opt);
  const GridFunction2D d2 = partial_box_derivative_h(y, h, 2, opt);
  const std::size_t g1 = std::min(d1.grid().axis1().ghost(), d2.grid().axis1().ghost());
  const std::size_t g2 = std::min(d1.grid().axis2().ghost(), d2.grid().axis2().ghost());
  return {y.crop(g1, g2), d1.crop(g1, g2), d2.crop(g1, g2)};
}

template <class Fn>
GridFunction2D eval_field(const Bracket2D& b, Fn&& fn) {
  GridFunction2D out = b.y.map([](cplx) { return cplx{}; });
  const Grid1D& a1 = b.y.grid().axis1();
  const Grid1D& a2 = b.y.grid().axis2();
  LagrangianArgs a;
  for (std::size_t i = 0; i < a1.size(); ++i) {
    for (std::size_t j = 0; j < a2.size(); ++j) {
      a.x1 = a1.node(i);
      a.x2 = a2.node(j);
      a.y = b.y(i, j);
      a.v[0] = b.v1(i, j);
      a.v[1] = b.v2(i, j);
      out(i, j) = fn(a);
      if (!b.y.trusted(i, j) || !b.v1.trusted(i, j) || !b.v2.trusted(i, j)) {
        out.mark_untrusted(i, j);
      }
    }
  }
  return out;
}

inline void require_arity(const Lagrangian& L, unsigned dims, std::optional<unsigned> order,
                          const char* what) {
  const Arity& ar = L.arity();
  if (ar.dims != dims || (order && ar.order != *order)) {
    throw Error(Errc::arity_mismatch, std::string(what) + ": Lagrangian arity does not fit");
  }
}

template <class Field>
void finish(ELReport& r, Field field, double scale, const ELOptions& opt) {
  r.residual_norm = field.sup_norm();
  r.scale = scale;
  r.tol = opt.tol.value_or(1e-8 * scale);
  r.smooth_tol = opt.smooth_constant * r.h * scale;
  r.residual_field = std::move(field);
  bool bc_ok = true, bc_ok_smooth = true;
  for (const auto& d : r.boundary_defects) {
    bc_ok = bc_ok && std::abs(d.value) <= r.tol;
    bc_ok_smooth = bc_ok_smooth && std::abs(d.value) <= r.smooth_tol;
  }
  r.is_extremal = r.residual_norm <= r.tol && bc_ok;
  r.is_extremal_smooth = r.residual_norm <= r.smooth_tol && bc_ok_smooth;
}

struct Residual1D {
  GridFunction1D field;
  double scale;
};

// dL/dy[y] - B_h(dL/dv[y]) with the scale of its two terms.
inline Residual1D first_order_residual(const Lagrangian& L, const Trajectory1D& y, double h,
                                       cplx xi) {
  const Bracket1D b = bracket(y, h, 1, kFallback);
  const GridFunction1D dy = eval_field(b, xi, [&](const LagrangianArgs& a) { return L.d_y(a); });
  const GridFunction1D p = eval_field(b, xi, [&](const LagrangianArgs& a) { return L.d_v(1, a); });
  const GridFunction1D bp = box_derivative_h(p, h, kFallback);
  return {dy - bp, std::max({1.0, dy.sup_norm(), bp.sup_norm()})};
}

}  // namespace detail

/// Variations vanishing, together with their first box derivatives, on a band
/// of 2*order*(h/delta)+2 nodes at each end: a random cubic times
/// ((x-l)(r-x))^(order+2) on the inner support [l, r].
inline GridFunction1D admissible_variation(const Grid1D& grid, unsigned order, double h,
                                           std::uint64_t seed) {
  const std::size_t m = grid.steps(h);
  const std::size_t margin = 2 * order * m + 2;
  if (2 * margin + 4 >= grid.n()) {
    throw Error(Errc::parameter_out_of_range, "grid too coarse for a compactly supported variation");
  }
  const double l = grid.a() + static_cast<double>(margin) * grid.delta();
  const double r = grid.b() - static_cast<double>(margin) * grid.delta();
  const double mid = 0.5 * (l + r);
  const double half = 0.5 * (r - l);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::array<double, 4> c{};
  for (auto& ci : c) ci = coef(rng);
  return GridFunction1D::sample(
      grid,
      [&](double x) {
        if (x <= l || x >= r) return 0.0;
        const double t = (x - mid) / half;
        const double window = std::pow((x - l) * (r - x) / (half * half), order + 2);
        return window * (c[0] + t * (c[1] + t * (c[2] + t * c[3])));
      },
      Source::closed_form);
}

/// Product of two independent 1D bump variations.
inline GridFunction2D admissible_variation(const Grid2D& grid, double h, std::uint64_t seed) {
  const GridFunction1D w1 = admissible_variation(grid.axis1(), 1, h, seed);
  const GridFunction1D w2 = admissible_variation(grid.axis2(), 1, h, seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<cplx> v(grid.size());
  for (std::size_t i = 0; i < grid.axis1().size(); ++i) {
    for (std::size_t j = 0; j < grid.axis2().size(); ++j) v[grid.index(i, j)] = w1[i] * w2[j];
  }
  return GridFunction2D(grid, std::move(v), Source::closed_form);
}

/// Runs the vanishing-E-part meter on dL/dv[y] * w for three sampled variations.
inline std::vector<std::string> condition3_warnings(const Lagrangian& L, const Trajectory1D& y,
                                                    double h) {
  std::vector<std::string> out;
  try {
    const detail::Bracket1D b = detail::bracket(y, h, 1, BoxOptions{});
    const GridFunction1D p =
        detail::eval_field(b, {}, [&](const LagrangianArgs& a) { return L.d_v(1, a); });
    const Grid1D& g = p.grid();
    const std::size_t m = g.steps(h);
    const BoxDerivativeConfig cfg{static_cast<double>(4 * m) * g.delta(), 3, 0.5, 0.1};
    for (std::uint64_t s = 1; s <= 3; ++s) {
      const GridFunction1D w = admissible_variation(g, 1, g.delta(), s);
      const DefectReport e = econdition_estimate(p * w, cfg, BoxOptions{true});
      if (!e.pass) {
        out.push_back("vanishing E-part condition not met for sampled variation " +
                      std::to_string(s));
      }
    }
  } catch (const Error& e) {
    out.push_back(std::string("vanishing E-part condition not checked: ") + e.what());
  }
  return out;
}

/// First-order residual dL/dy[y] - B_h(dL/dv[y]).
inline ELReport el_residual_1d(const Lagrangian& L, const Trajectory1D& y, double h,
                               const ELOptions& opt = {}) {
  detail::require_arity(L, 1, 1u, "el_residual_1d");
  if (L.arity().uses_xi) {
    throw Error(Errc::arity_mismatch, "el_residual_1d: Lagrangian depends on a parameter");
  }
  ELReport r;
  r.variant = ELVariant::first_order;
  r.h = h;
  detail::Residual1D res = detail::first_order_residual(L, y, h, {});
  if (opt.check_condition3) r.warnings = condition3_warnings(L, y, h);
  detail::finish(r, std::move(res.field), res.scale, opt);
  return r;
}

/// Interior residual plus the endpoint values of dL/dv for a free boundary.
inline ELReport natural_bc_1d(const Lagrangian& L, const Trajectory1D& y, double h,
                              const ELOptions& opt = {}) {
  detail::require_arity(L, 1, 1u, "natural_bc_1d");
  if (y.boundary() != BoundaryKind::free) {
    throw Error(Errc::parameter_out_of_range, "natural boundary conditions need a free boundary");
  }
  ELReport r;
  r.variant = ELVariant::natural_bc;
  r.h = h;
  const detail::Bracket1D b = detail::bracket(y, h, 1, detail::kFallback);
  const GridFunction1D p =
      detail::eval_field(b, {}, [&](const LagrangianArgs& a) { return L.d_v(1, a); });
  const Grid1D& g = p.grid();
  r.boundary_defects = {{"dL/dv at a", p[g.first()]}, {"dL/dv at b", p[g.last()]}};
  if (!p.trusted(g.first()) || !p.trusted(g.last())) {
    r.warnings.push_back("endpoint box derivative used the one-sided fallback");
  }
  detail::Residual1D res = detail::first_order_residual(L, y, h, {});
  detail::finish(r, std::move(res.field), res.scale, opt);
  return r;
}

/// dL/dy[y]^n + sum_{i=1..n} (-1)^i B_h^i(dL/dv_i[y]^n).
inline ELReport el_residual_higher(const Lagrangian& L, const Trajectory1D& y, double h,
                                   const ELOptions& opt = {}) {
  detail::require_arity(L, 1, std::nullopt, "el_residual_higher");
  const unsigned n = L.arity().order;
  ELReport r;
  r.variant = ELVariant::higher_order;
  r.h = h;
  const detail::Bracket1D b = detail::bracket(y, h, n, detail::kFallback);
  GridFunction1D dy = detail::eval_field(b, {}, [&](const LagrangianArgs& a) { return L.d_y(a); });
  double scale = std::max(1.0, dy.sup_norm());
  GridFunction1D res = dy;
  for (unsigned i = 1; i <= n; ++i) {
    const GridFunction1D p =
        detail::eval_field(b, {}, [&](const LagrangianArgs& a) { return L.d_v(i, a); });
    const GridFunction1D term = box_derivative_n(p, h, i, detail::kFallback);
    scale = std::max(scale, term.sup_norm());
    res = (i % 2 == 1) ? res - term : res + term;
  }
  detail::finish(r, std::move(res), scale, opt);
  return r;
}

/// Least-squares multiplier lambda minimising |R_L - lambda R_theta| over trusted nodes.
inline ELReport iso_solve(const Lagrangian& L, const Lagrangian& theta, const Trajectory1D& y,
                          cplx constraint_value, double h, const ELOptions& opt = {}) {
  detail::require_arity(L, 1, 1u, "iso_solve");
  detail::require_arity(theta, 1, 1u, "iso_solve");
  const detail::Bracket1D b = detail::bracket(y, h, 1, detail::kFallback);
  const GridFunction1D th = detail::eval_field(b, {}, [&](const LagrangianArgs& a) { return theta(a); });
  const cplx level = quad_1d(th);
  // trapezoid error is O(delta^2) times the size of theta
  const Grid1D& tg = th.grid();
  const double quad_slack = tg.delta() * tg.delta() * (tg.b() - tg.a()) * th.sup_norm();
  if (std::abs(level - constraint_value) >
      1e-6 * std::max(1.0, std::abs(constraint_value)) + quad_slack) {
    throw Error(Errc::constraint_violated,
                "integral constraint is off by " + std::to_string(std::abs(level - constraint_value)));
  }
  const detail::Residual1D rl = detail::first_order_residual(L, y, h, {});
  const detail::Residual1D rt = detail::first_order_residual(theta, y, h, {});
  if (rt.field.sup_norm() <= 1e-8 * rt.scale) {
    throw Error(Errc::nondegeneracy_failure,
                "trajectory is an extremal of the constraint functional");
  }
  const Grid1D& g = rl.field.grid();
  cplx num = 0;
  double den = 0;
  for (std::size_t k = g.first(); k <= g.last(); ++k) {
    if (!rl.field.trusted(k) || !rt.field.trusted(k)) continue;
    num += std::conj(rt.field[k]) * rl.field[k];
    den += std::norm(rt.field[k]);
  }
  const cplx lambda = num / den;
  ELReport r;
  r.variant = ELVariant::isoperimetric;
  r.h = h;
  r.multiplier = lambda;
  GridFunction1D combined = rl.field - lambda * rt.field;
  const double scale = std::max(rl.scale, std::abs(lambda) * rt.scale);
  detail::finish(r, std::move(combined), scale, opt);
  // the constraint was enforced above; reported only
  r.boundary_defects = {{"constraint defect", level - constraint_value}};
  return r;
}

/// Residual in y at parameter xi, and int_a^b dL/dxi[y]_xi dx as a boundary defect.
inline ELReport el_residual_parameter(const Lagrangian& L, const Trajectory1D& y, cplx xi,
                                      double h, const ELOptions& opt = {}) {
  detail::require_arity(L, 1, 1u, "el_residual_parameter");
  if (!L.arity().uses_xi) {
    throw Error(Errc::arity_mismatch, "el_residual_parameter: Lagrangian has no parameter slot");
  }
  ELReport r;
  r.variant = ELVariant::parameter;
  r.h = h;
  r.parameter = xi;
  const detail::Bracket1D b = detail::bracket(y, h, 1, detail::kFallback);
  const GridFunction1D dxi = detail::eval_field(b, xi, [&](const LagrangianArgs& a) { return L.d_xi(a); });
  r.boundary_defects = {{"parameter integral", quad_1d(dxi)}};
  detail::Residual1D res = detail::first_order_residual(L, y, h, xi);
  detail::finish(r, std::move(res.field), res.scale, opt);
  return r;
}

/// Solves the parameter condition for xi when dL/dxi is affine in xi, then reports.
inline ELReport solve_parameter(const Lagrangian& L, const Trajectory1D& y, double h,
                                const ELOptions& opt = {}) {
  auto integral = [&](cplx xi) {
    return el_residual_parameter(L, y, xi, h, opt).boundary_defects.front().value;
  };
  const cplx i0 = integral(0.0), i1 = integral(1.0), i2 = integral(2.0);
  const double mag = std::max({1.0, std::abs(i0), std::abs(i1), std::abs(i2)});
  if (std::abs(i2 - 2.0 * i1 + i0) > 1e-9 * mag) {
    throw Error(Errc::not_affine, "parameter integral is not affine in xi");
  }
  const cplx slope = i1 - i0;
  if (std::abs(slope) <= 1e-14 * mag) {
    if (std::abs(i0) <= 1e-12 * mag) return el_residual_parameter(L, y, 0.0, h, opt);
    throw Error(Errc::not_affine, "parameter integral is constant and nonzero");
  }
  return el_residual_parameter(L, y, -i0 / slope, h, opt);
}

/// dL/dy[y] - B_1(dL/dv1[y]) - B_2(dL/dv2[y]) on the rectangle.
inline ELReport el_residual_2d(const Lagrangian& L, const Trajectory2D& y, double h,
                               const ELOptions& opt = {}) {
  if (L.arity().dims != 2) throw Error(Errc::arity_mismatch, "el_residual_2d needs dims = 2");
  ELReport r;
  r.variant = ELVariant::double_integral;
  r.h = h;
  const detail::Bracket2D b = detail::bracket(y.y, h, detail::kFallback);
  const GridFunction2D dy = detail::eval_field(b, [&](const LagrangianArgs& a) { return L.d_y(a); });
  const GridFunction2D p1 = detail::eval_field(b, [&](const LagrangianArgs& a) { return L.d_v(1, a); });
  const GridFunction2D p2 = detail::eval_field(b, [&](const LagrangianArgs& a) { return L.d_v(2, a); });
  const GridFunction2D t1 = partial_box_derivative_h(p1, h, 1, detail::kFallback);
  const GridFunction2D t2 = partial_box_derivative_h(p2, h, 2, detail::kFallback);
  const double scale = std::max({1.0, dy.sup_norm(), t1.sup_norm(), t2.sup_norm()});
  detail::finish(r, dy - t1 - t2, scale, opt);
  return r;
}

/// Interior residual plus edge-wise sup norms of dL/dv1 on x1 = a, b and dL/dv2 on x2 = c, d.
inline ELReport natural_bc_2d(const Lagrangian& L, const Trajectory2D& y, double h,
                              const ELOptions& opt = {}) {
  if (y.boundary != BoundaryKind::free) {
    throw Error(Errc::parameter_out_of_range, "natural boundary conditions need a free boundary");
  }
  ELReport r = el_residual_2d(L, y, h, opt);
  r.variant = ELVariant::natural_bc_2d;
  const detail::Bracket2D b = detail::bracket(y.y, h, detail::kFallback);
  const GridFunction2D p1 = detail::eval_field(b, [&](const LagrangianArgs& a) { return L.d_v(1, a); });
  const GridFunction2D p2 = detail::eval_field(b, [&](const LagrangianArgs& a) { return L.d_v(2, a); });
  const Grid1D& a1 = p1.grid().axis1();
  const Grid1D& a2 = p1.grid().axis2();
  double ea = 0, eb = 0, ec = 0, ed = 0;
  bool fallback = false;
  for (std::size_t j = a2.first(); j <= a2.last(); ++j) {
    ea = std::max(ea, std::abs(p1(a1.first(), j)));
    eb = std::max(eb, std::abs(p1(a1.last(), j)));
    fallback = fallback || !p1.trusted(a1.first(), j) || !p1.trusted(a1.last(), j);
  }
  for (std::size_t i = a1.first(); i <= a1.last(); ++i) {
    ec = std::max(ec, std::abs(p2(i, a2.first())));
    ed = std::max(ed, std::abs(p2(i, a2.last())));
    fallback = fallback || !p2.trusted(i, a2.first()) || !p2.trusted(i, a2.last());
  }
  if (fallback) r.warnings.push_back("edge box derivatives used the one-sided fallback");
  r.boundary_defects = {{"dL/dv1 on x1=a", ea},
                        {"dL/dv1 on x1=b", eb},
                        {"dL/dv2 on x2=c", ec},
                        {"dL/dv2 on x2=d", ed}};
  const double edges = std::max({ea, eb, ec, ed});
  r.is_extremal = r.is_extremal && edges <= r.tol;
  r.is_extremal_smooth = r.is_extremal_smooth && edges <= r.smooth_tol;
  return r;
}

}  // namespace boxcalc
