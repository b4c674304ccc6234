#pragma once

/**
 * @file identities.hpp
 * @brief Defect meters for the box-calculus identities: Leibniz, Barrow, the
 * vanishing-E-part condition, Green's theorem on a rectangle, and the 2D
 * integration-by-parts formula.
 *
 * Every meter works at fixed h (or across an h-sequence) and reports how far
 * the identity is from holding. The identities hold in the h -> 0 limit, so
 * each meter carries an explicit pass rule: either a decrease of the defect
 * along the sequence or a threshold of the form 10 * h * natural scale.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "boxcalc/box_derivative.hpp"
#include "boxcalc/error.hpp"
#include "boxcalc/grid.hpp"
#include "boxcalc/quadrature.hpp"
#include "boxcalc/scale_limit.hpp"

namespace boxcalc {

enum class Identity { leibniz, barrow, econdition, green, byparts2d, byparts2d_zero_boundary };

inline std::string_view to_string(Identity id) {
  switch (id) {
    case Identity::leibniz: return "leibniz";
    case Identity::barrow: return "barrow";
    case Identity::econdition: return "econdition";
    case Identity::green: return "green";
    case Identity::byparts2d: return "byparts2d";
    case Identity::byparts2d_zero_boundary: return "byparts2d_zero_boundary";
  }
  return "unknown";
}

struct NamedValue {
  std::string name;
  cplx value;
};

struct DefectReport {
  Identity identity = Identity::leibniz;
  std::vector<double> h_sequence;
  std::vector<double> defect_norm;
  double fitted_slope = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  double threshold = 0;  // absolute tolerance used by threshold-type pass rules
  std::vector<NamedValue> components;
  std::vector<std::string> warnings;
};

/// Least-squares slope of log(defect) against log(h) over the positive entries;
/// NaN when fewer than two entries are positive.
inline double loglog_slope(std::span<const double> hs, std::span<const double> defects) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < hs.size() && i < defects.size(); ++i) {
    if (defects[i] > 0 && hs[i] > 0) {
      lx.push_back(std::log(hs[i]));
      ly.push_back(std::log(defects[i]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

namespace detail {

inline void require_decreasing(std::span<const double> hs) {
  if (hs.empty()) throw Error(Errc::parameter_out_of_range, "empty h-sequence");
  for (std::size_t i = 1; i < hs.size(); ++i) {
    if (!(hs[i] < hs[i - 1])) {
      throw Error(Errc::parameter_out_of_range, "h-sequence must be strictly decreasing");
    }
  }
}

inline void holder_warning(std::vector<std::string>& warnings, std::optional<double> a,
                           std::optional<double> b, const std::string& what) {
  if (a && b && *a + *b <= 1.0) {
    warnings.push_back(what + ": holder exponents sum to " + std::to_string(*a + *b) +
                       " <= 1, the product rule is not guaranteed");
  }
}

inline double boundary_sup(const GridFunction2D& w) {
  const Grid1D& a1 = w.grid().axis1();
  const Grid1D& a2 = w.grid().axis2();
  double s = 0;
  for (std::size_t i = a1.first(); i <= a1.last(); ++i) {
    s = std::max({s, std::abs(w(i, a2.first())), std::abs(w(i, a2.last()))});
  }
  for (std::size_t j = a2.first(); j <= a2.last(); ++j) {
    s = std::max({s, std::abs(w(a1.first(), j)), std::abs(w(a1.last(), j))});
  }
  return s;
}

}  // namespace detail

/// Pointwise product-rule defect B_h(fg) - (B_h f g + f B_h g) at one h.
inline GridFunction1D leibniz_defect_field(const GridFunction1D& f, const GridFunction1D& g,
                                           double h) {
  if (!f.grid().same_nodes(g.grid())) {
    throw Error(Errc::grid_mismatch, "leibniz meter needs both factors on one grid");
  }
  const BoxOptions fb{true};
  const GridFunction1D lhs = box_derivative_h(f * g, h, fb);
  const GridFunction1D rhs = box_derivative_h(f, h, fb) * g + f * box_derivative_h(g, h, fb);
  return lhs - rhs;
}

/// Sup-norm of the product-rule defect over [a,b] along a decreasing h-sequence.
/// Passes when the finest defect is at most a quarter of the coarsest.
inline DefectReport leibniz_defect(const GridFunction1D& f, const GridFunction1D& g,
                                   std::span<const double> hs) {
  detail::require_decreasing(hs);
  DefectReport r;
  r.identity = Identity::leibniz;
  detail::holder_warning(r.warnings, f.holder_alpha(), g.holder_alpha(), "leibniz");
  for (double h : hs) {
    r.h_sequence.push_back(h);
    r.defect_norm.push_back(leibniz_defect_field(f, g, h).sup_norm());
  }
  r.fitted_slope = loglog_slope(r.h_sequence, r.defect_norm);
  r.pass = r.defect_norm.back() <= 0.25 * r.defect_norm.front();
  return r;
}

inline DefectReport leibniz_defect(const GridFunction1D& f, const GridFunction1D& g, double h) {
  const double hs[] = {h};
  return leibniz_defect(f, g, hs);
}

/// |int_a^b B_h f dx - (f(b) - f(a))| for each h of the configured sequence.
inline DefectReport barrow_defect(const GridFunction1D& f, const BoxDerivativeConfig& cfg) {
  const Grid1D& g = f.grid();
  DefectReport r;
  r.identity = Identity::barrow;
  const cplx increment = f[g.last()] - f[g.first()];
  for (double h : cfg.h_sequence(g)) {
    const cplx integral = quad_1d(box_derivative_h(f, h), g.a(), g.b());
    r.h_sequence.push_back(h);
    r.defect_norm.push_back(std::abs(integral - increment));
  }
  r.components.push_back({"increment", increment});
  r.fitted_slope = loglog_slope(r.h_sequence, r.defect_norm);
  const double scale = std::max(1.0, f.sup_norm());
  const double worst = *std::max_element(r.defect_norm.begin(), r.defect_norm.end());
  if (worst <= 1e-12 * scale) {
    r.pass = true;
    r.threshold = 1e-12 * scale;
  } else if (r.defect_norm.size() >= 2) {
    r.pass = r.fitted_slope > 0 && r.defect_norm.back() < r.defect_norm.front();
  } else {
    r.threshold = 10.0 * r.h_sequence.front() * (g.b() - g.a()) * scale;
    r.pass = r.defect_norm.front() <= r.threshold;
  }
  return r;
}

/// Integral over [a,b] of the numerical E-part B_{h_k} f - (c0 + c1 h_k^gamma)
/// at every level of the sequence.
inline DefectReport econdition_estimate(const GridFunction1D& f, const BoxDerivativeConfig& cfg,
                                        BoxOptions opt = {}) {
  const ScaleDerivative sd = scale_derivative(f, cfg, opt);
  const Grid1D& g = sd.limit.grid();
  DefectReport r;
  r.identity = Identity::econdition;
  for (std::size_t lvl = 0; lvl < sd.h_sequence.size(); ++lvl) {
    const double h = sd.h_sequence[lvl];
    GridFunction1D epart = sd.quotients[lvl];
    for (std::size_t k = 0; k < g.size(); ++k) epart[k] -= sd.nodes[k].model(h);
    r.h_sequence.push_back(h);
    r.defect_norm.push_back(std::abs(quad_1d(epart, g.a(), g.b())));
  }
  r.fitted_slope = loglog_slope(r.h_sequence, r.defect_norm);
  r.threshold = 1e-3 * (g.b() - g.a()) * f.sup_norm();
  r.pass = r.defect_norm.back() <= r.threshold;
  return r;
}

namespace detail {

inline DefectReport threshold_report(Identity id, double h, cplx lhs, cplx rhs, double scale) {
  DefectReport r;
  r.identity = id;
  r.h_sequence = {h};
  r.defect_norm = {std::abs(lhs - rhs)};
  r.components = {{"lhs", lhs}, {"rhs", rhs}};
  r.threshold = std::max(10.0 * h * scale, 1e-10);
  r.pass = r.defect_norm.front() <= r.threshold;
  return r;
}

}  // namespace detail

/// Green's theorem on R: boundary integral of f dx1 + g dx2 against the area
/// integral of B_h g / B x1 - B_h f / B x2.
inline DefectReport green_defect(const GridFunction2D& f, const GridFunction2D& g, double h) {
  if (!f.grid().same_nodes(g.grid())) {
    throw Error(Errc::grid_mismatch, "green meter needs f and g on one grid");
  }
  const cplx lhs = boundary_integral(f, g);
  const cplx rhs = quad_2d(partial_box_derivative_h(g, h, 1) - partial_box_derivative_h(f, h, 2));
  return detail::threshold_report(Identity::green, h, lhs, rhs, f.sup_norm() + g.sup_norm());
}

/// Integration by parts on R:
///   iint (G B w/B x1 + F B w/B x2) = oint (-F w dx1 + G w dx2) - iint (B G/B x1 + B F/B x2) w.
/// With zero_boundary the contour term is dropped after checking w = 0 on the boundary.
inline DefectReport byparts2d_defect(const GridFunction2D& F, const GridFunction2D& G,
                                     const GridFunction2D& w, double h, bool zero_boundary) {
  if (!F.grid().same_nodes(G.grid()) || !F.grid().same_nodes(w.grid())) {
    throw Error(Errc::grid_mismatch, "integration by parts needs F, G, w on one grid");
  }
  if (zero_boundary) {
    const double wb = detail::boundary_sup(w);
    if (wb > 1e-12) {
      throw Error(Errc::boundary_not_zero,
                  "w reaches " + std::to_string(wb) + " on the boundary of R");
    }
  }
  const GridFunction2D lhs_field =
      G * partial_box_derivative_h(w, h, 1) + F * partial_box_derivative_h(w, h, 2);
  const GridFunction2D div =
      partial_box_derivative_h(G, h, 1) + partial_box_derivative_h(F, h, 2);
  const GridFunction2D Fw = F * w;
  const GridFunction2D Gw = G * w;
  cplx rhs = -quad_2d(div * w);
  if (!zero_boundary) rhs += boundary_integral(-1.0 * Fw, Gw);
  DefectReport r = detail::threshold_report(
      zero_boundary ? Identity::byparts2d_zero_boundary : Identity::byparts2d, h,
      quad_2d(lhs_field), rhs, Fw.sup_norm() + Gw.sup_norm());
  detail::holder_warning(r.warnings, F.holder_alpha(), w.holder_alpha(), "byparts F,w");
  detail::holder_warning(r.warnings, G.holder_alpha(), w.holder_alpha(), "byparts G,w");
  return r;
}

}  // namespace boxcalc
