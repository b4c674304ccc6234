#pragma once

/**
 * @file cli.hpp
 * @brief Command dispatch behind the boxcalc executable.
 *
 * `run` takes a parsed RunConfig, builds grid functions and Lagrangians from
 * their expressions, calls the matching library operation and writes a JSON
 * report (plus optional CSV). Exit status: 0 pass, 1 usage or validation
 * error, 2 identity or extremality failure.
 *
 * Ghost bands of closed-form inputs are sized from the largest step the
 * command needs, so no boundary fallback is used where samples exist.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "boxcalc/box_derivative.hpp"
#include "boxcalc/error.hpp"
#include "boxcalc/euler_lagrange.hpp"
#include "boxcalc/expression.hpp"
#include "boxcalc/grid.hpp"
#include "boxcalc/holder.hpp"
#include "boxcalc/identities.hpp"
#include "boxcalc/report_io.hpp"
#include "boxcalc/scale_limit.hpp"
#include "boxcalc/solver.hpp"

namespace boxcalc::cli {

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"deriv", "scale",  "holder", "leibniz", "barrow",
                                          "econdition", "green", "byparts", "el", "nbc",
                                          "iso",   "param",  "higher", "el2d",   "nbc2d",
                                          "membrane", "study"};
  return c;
}

inline const std::vector<std::string>& study_meters() {
  static const std::vector<std::string> m{"leibniz", "barrow", "econdition", "green",
                                          "byparts", "el",     "higher",     "el2d"};
  return m;
}

struct RunConfig {
  std::string command;
  // expressions
  std::string f, g, F, G, w, L, theta, y;
  std::string C;   // constraint level (constant expression)
  std::string xi;  // parameter value (constant expression); empty = solve for it
  // grid: a b n, or a b c d n, or a b c d n1 n2
  std::vector<double> grid;
  // box configuration
  double h = 0.01;
  std::size_t levels = 4;
  double ratio = 0.5;
  double tau = 0.1;
  std::vector<double> hs;  // explicit h-sequence (leibniz)
  unsigned order = 0;      // 0 = inferred from the expression
  std::optional<double> at;
  int sigma = 0;
  std::string boundary = "fixed";
  bool zero_boundary = false;
  std::optional<double> tol;
  double smooth_constant = 10.0;
  bool condition3 = false;
  std::string boundary_csv;
  std::string meter;
  bool grid_sweep = false;
  // outputs
  std::string json_path;
  std::string csv_path;
  std::string dat_path;
};

struct Outcome {
  Json report;
  std::optional<bool> pass;
  std::string csv;
  std::string dat;
};

namespace detail {

[[noreturn]] inline void invalid(const std::string& field, const std::string& what) {
  throw Error(Errc::config_invalid, "field '" + field + "': " + what);
}

inline void require(const std::string& value, const char* field) {
  if (value.empty()) invalid(field, "required by this command");
}

inline cplx constant(const std::string& text, const char* field) {
  const Expression e(text);
  if (e.uses(Var::x1) || e.uses(Var::x2) || e.uses(Var::y) || e.uses(Var::v) || e.uses(Var::xi)) {
    invalid(field, "must be a constant expression");
  }
  return e.eval({});
}

inline std::size_t node_count(double v, const char* field) {
  if (!(v >= 3) || v != std::round(v) || v > 1e8) invalid(field, "node count must be an integer >= 3");
  return static_cast<std::size_t>(v);
}

inline Grid1D grid_1d(const RunConfig& c, std::size_t ghost) {
  if (c.grid.size() != 3) invalid("grid", "expected 'a b n' for a one-dimensional command");
  return Grid1D(c.grid[0], c.grid[1], node_count(c.grid[2], "grid"), ghost);
}

inline Grid2D grid_2d(const RunConfig& c, std::size_t g1, std::size_t g2) {
  if (c.grid.size() != 5 && c.grid.size() != 6) {
    invalid("grid", "expected 'a b c d n' or 'a b c d n1 n2' for a two-dimensional command");
  }
  const std::size_t n1 = node_count(c.grid[4], "grid");
  const std::size_t n2 = c.grid.size() == 6 ? node_count(c.grid[5], "grid") : n1;
  return Grid2D(Grid1D(c.grid[0], c.grid[1], n1, g1), Grid1D(c.grid[2], c.grid[3], n2, g2));
}

inline BoxDerivativeConfig box_config(const RunConfig& c) {
  return BoxDerivativeConfig{c.h, c.levels, c.ratio, c.tau};
}

inline std::size_t steps(const Grid1D& g, double h) { return g.steps(h); }

inline std::size_t steps_2d(const Grid2D& g, double h) {
  return std::max(g.axis1().steps(h), g.axis2().steps(h));
}

inline ELOptions el_options(const RunConfig& c) {
  ELOptions o;
  o.tol = c.tol;
  o.smooth_constant = c.smooth_constant;
  o.check_condition3 = c.condition3;
  return o;
}

inline BoundaryKind boundary_kind(const RunConfig& c) {
  if (c.boundary == "fixed") return BoundaryKind::fixed;
  if (c.boundary == "free") return BoundaryKind::free;
  invalid("boundary", "must be 'fixed' or 'free'");
}

inline Json inputs(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  auto put = [&](const char* k, const std::string& v) {
    if (!v.empty()) j[k] = v;
  };
  put("f", c.f);
  put("g", c.g);
  put("F", c.F);
  put("G", c.G);
  put("w", c.w);
  put("L", c.L);
  put("theta", c.theta);
  put("y", c.y);
  put("C", c.C);
  put("xi", c.xi);
  put("meter", c.meter);
  j["grid"] = c.grid;
  j["h"] = c.h;
  j["levels"] = c.levels;
  j["ratio"] = c.ratio;
  j["tau"] = c.tau;
  if (!c.hs.empty()) j["hs"] = c.hs;
  if (c.order) j["order"] = c.order;
  j["boundary"] = c.boundary;
  return j;
}

inline Json field_summary(const GridFunction1D& f) {
  Json j;
  j["nodes"] = f.grid().n();
  j["sup_norm"] = f.sup_norm();
  j["untrusted_nodes"] = f.untrusted_count();
  return j;
}

inline Outcome defect_outcome(const DefectReport& r) {
  return {to_json(r), r.pass, to_csv(r), {}};
}

inline std::string el_csv(const ELReport& r) {
  if (const auto* f = std::get_if<GridFunction1D>(&r.residual_field)) return to_csv(*f, "residual");
  return to_csv(std::get<GridFunction2D>(r.residual_field), "residual");
}

inline Outcome el_outcome(const ELReport& r) { return {to_json(r), r.is_extremal, el_csv(r), {}}; }

// ---- one function per command -------------------------------------------

inline Outcome deriv(const RunConfig& c) {
  require(c.f, "f");
  const unsigned order = c.order ? c.order : 1;
  const std::size_t m = steps(grid_1d(c, 0), c.h);
  const GridFunction1D f = function_1d(Expression(c.f), grid_1d(c, order * m));
  const GridFunction1D d = box_derivative_n(f, c.h, order);
  Outcome o;
  o.report["h"] = c.h;
  o.report["order"] = order;
  o.report["field"] = field_summary(d);
  if (c.at) {
    o.report["at"] = *c.at;
    o.report["value"] = to_json(d.at(*c.at));
    if (c.sigma != 0) o.report["h_derivative"] = to_json(h_derivative(f, *c.at, c.h, c.sigma));
  }
  o.csv = to_csv(d, "box_derivative");
  return o;
}

inline Outcome scale(const RunConfig& c) {
  require(c.f, "f");
  const std::size_t m = steps(grid_1d(c, 0), c.h);
  const GridFunction1D f = function_1d(Expression(c.f), grid_1d(c, m));
  const ScaleDerivative sd = scale_derivative(f, box_config(c));
  Outcome o;
  o.report["h_sequence"] = sd.h_sequence;
  o.report["convergent_fraction"] = sd.convergent_fraction();
  o.report["limit"] = field_summary(sd.limit);
  if (c.at) {
    const std::size_t k = sd.limit.grid().locate(*c.at);
    const ScaleLimitResult& r = sd.nodes[k];
    o.report["at"] = *c.at;
    o.report["node"] = Json{{"limit", to_json(r.limit)},
                            {"fit_residual", r.fit_residual},
                            {"convergent", r.convergent},
                            {"epart_magnitude", r.epart_magnitude}};
  }
  o.csv = to_csv(sd.limit, "limit");
  return o;
}

inline Outcome holder(const RunConfig& c) {
  require(c.f, "f");
  const GridFunction1D f = function_1d(Expression(c.f), grid_1d(c, 0));
  const HolderEstimate est = estimate_holder_exponent(f);
  Outcome o;
  o.report["alpha"] = est.alpha;
  o.report["flat"] = est.flat;
  o.report["declared_alpha"] = f.holder_alpha() ? Json(*f.holder_alpha()) : Json(nullptr);
  return o;
}

inline std::vector<double> h_list(const RunConfig& c, const Grid1D& g) {
  return c.hs.empty() ? box_config(c).h_sequence(g) : c.hs;
}

inline Outcome leibniz(const RunConfig& c) {
  require(c.f, "f");
  require(c.g, "g");
  const Grid1D base = grid_1d(c, 0);
  const std::vector<double> hs = h_list(c, base);
  std::size_t m = 0;
  for (double h : hs) m = std::max(m, steps(base, h));
  const Grid1D g = grid_1d(c, m);
  return defect_outcome(
      leibniz_defect(function_1d(Expression(c.f), g), function_1d(Expression(c.g), g), hs));
}

inline Outcome barrow(const RunConfig& c) {
  require(c.f, "f");
  const std::size_t m = steps(grid_1d(c, 0), c.h);
  return defect_outcome(barrow_defect(function_1d(Expression(c.f), grid_1d(c, m)), box_config(c)));
}

inline Outcome econdition(const RunConfig& c) {
  require(c.f, "f");
  const std::size_t m = steps(grid_1d(c, 0), c.h);
  return defect_outcome(
      econdition_estimate(function_1d(Expression(c.f), grid_1d(c, m)), box_config(c)));
}

inline Outcome green(const RunConfig& c) {
  require(c.f, "f");
  require(c.g, "g");
  const std::size_t m = steps_2d(grid_2d(c, 0, 0), c.h);
  const Grid2D g = grid_2d(c, m, m);
  return defect_outcome(
      green_defect(function_2d(Expression(c.f), g), function_2d(Expression(c.g), g), c.h));
}

inline Outcome byparts(const RunConfig& c) {
  require(c.F, "F");
  require(c.G, "G");
  require(c.w, "w");
  const std::size_t m = steps_2d(grid_2d(c, 0, 0), c.h);
  const Grid2D g = grid_2d(c, m, m);
  return defect_outcome(byparts2d_defect(function_2d(Expression(c.F), g),
                                         function_2d(Expression(c.G), g),
                                         function_2d(Expression(c.w), g), c.h, c.zero_boundary));
}

inline Trajectory1D trajectory_1d(const RunConfig& c, unsigned order) {
  require(c.y, "y");
  const std::size_t m = steps(grid_1d(c, 0), c.h);
  return Trajectory1D(function_1d(Expression(c.y), grid_1d(c, 2 * order * m)), boundary_kind(c));
}

inline Trajectory2D trajectory_2d(const RunConfig& c) {
  require(c.y, "y");
  const std::size_t m = steps_2d(grid_2d(c, 0, 0), c.h);
  return {function_2d(Expression(c.y), grid_2d(c, 2 * m, 2 * m)), boundary_kind(c)};
}

inline Lagrangian lagrangian_1d(const RunConfig& c, std::optional<unsigned> order = 1u) {
  require(c.L, "L");
  return lagrangian(Expression(c.L), 1, order);
}

inline Outcome el(const RunConfig& c) {
  return el_outcome(el_residual_1d(lagrangian_1d(c), trajectory_1d(c, 1), c.h, el_options(c)));
}

inline Outcome nbc(const RunConfig& c) {
  if (c.boundary != "free") invalid("boundary", "nbc needs boundary = free");
  return el_outcome(natural_bc_1d(lagrangian_1d(c), trajectory_1d(c, 1), c.h, el_options(c)));
}

inline Outcome iso(const RunConfig& c) {
  require(c.theta, "theta");
  require(c.C, "C");
  const Lagrangian th = lagrangian(Expression(c.theta), 1, 1u);
  return el_outcome(iso_solve(lagrangian_1d(c), th, trajectory_1d(c, 1), constant(c.C, "C"), c.h,
                              el_options(c)));
}

inline Outcome param(const RunConfig& c) {
  const Lagrangian L = lagrangian_1d(c);
  const Trajectory1D y = trajectory_1d(c, 1);
  if (c.xi.empty()) return el_outcome(solve_parameter(L, y, c.h, el_options(c)));
  return el_outcome(el_residual_parameter(L, y, constant(c.xi, "xi"), c.h, el_options(c)));
}

inline Outcome higher(const RunConfig& c) {
  const Lagrangian L =
      lagrangian_1d(c, c.order ? std::optional<unsigned>(c.order) : std::nullopt);
  return el_outcome(
      el_residual_higher(L, trajectory_1d(c, L.arity().order), c.h, el_options(c)));
}

inline Outcome el2d(const RunConfig& c) {
  require(c.L, "L");
  return el_outcome(
      el_residual_2d(lagrangian(Expression(c.L), 2), trajectory_2d(c), c.h, el_options(c)));
}

inline Outcome nbc2d(const RunConfig& c) {
  require(c.L, "L");
  if (c.boundary != "free") invalid("boundary", "nbc2d needs boundary = free");
  return el_outcome(
      natural_bc_2d(lagrangian(Expression(c.L), 2), trajectory_2d(c), c.h, el_options(c)));
}

// edge,k,re,im with edge one of x1=a, x1=b, x2=c, x2=d
inline MembraneBoundary read_boundary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("boundary_csv", "cannot open " + path);
  MembraneBoundary b;
  std::map<std::string, std::optional<std::vector<cplx>>*> edges{
      {"x1=a", &b.x1_a}, {"x1=b", &b.x1_b}, {"x2=c", &b.x2_c}, {"x2=d", &b.x2_d}};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line.rfind("edge", 0) == 0)) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    const std::string where = path + " line " + std::to_string(lineno);
    if (cells.size() != 4 || !edges.count(cells[0])) {
      invalid("boundary_csv", where + ": expected edge,k,re,im");
    }
    std::size_t k = 0;
    double re = 0, im = 0;
    try {
      k = std::stoul(cells[1]);
      re = std::stod(cells[2]);
      im = std::stod(cells[3]);
    } catch (const std::exception&) {
      invalid("boundary_csv", where + ": unreadable number");
    }
    auto& e = *edges[cells[0]];
    if (!e) e.emplace();
    if (e->size() <= k) e->resize(k + 1);
    (*e)[k] = cplx(re, im);
  }
  return b;
}

inline Outcome membrane(const RunConfig& c) {
  const Grid2D grid = grid_2d(c, 0, 0);
  const double tol = c.tol.value_or(1e-10);
  MembraneSolution sol = [&] {
    if (!c.boundary_csv.empty()) return solve_membrane(read_boundary_csv(c.boundary_csv), grid, c.h, tol);
    require(c.f, "f");
    const Expression e(c.f);
    return solve_membrane(
        [&](double x1, double x2) {
          Bindings b;
          b.x1 = x1;
          b.x2 = x2;
          return e.eval(b);
        },
        grid, c.h, tol);
  }();
  const Lagrangian L = lagrangian(Expression("(v1^2 + v2^2)/2"), 2);
  ELOptions opt;
  opt.tol = 10 * tol;
  const ELReport r = el_residual_2d(L, {sol.u, BoundaryKind::fixed}, c.h, opt);
  Outcome o;
  o.report["solver"] = to_json(sol.stats);
  o.report["el_residual_norm"] = r.residual_norm;
  o.report["residual_tol"] = r.tol;
  o.pass = r.is_extremal;
  o.csv = to_csv(sol.u, "u");
  return o;
}

// Defect of one meter at one level of a study.
inline double study_defect(const RunConfig& c, double h) {
  RunConfig one = c;
  one.h = h;
  one.levels = 1;
  one.hs = {h};
  const std::string& m = c.meter;
  auto defect_of = [](const Outcome& o) { return o.report["defect_norm"].back().get<double>(); };
  if (m == "leibniz") return defect_of(leibniz(one));
  if (m == "barrow") return defect_of(barrow(one));
  if (m == "green") return defect_of(green(one));
  if (m == "byparts") return defect_of(byparts(one));
  if (m == "el") return el(one).report["residual_norm"].get<double>();
  if (m == "higher") return higher(one).report["residual_norm"].get<double>();
  return el2d(one).report["residual_norm"].get<double>();
}

inline Outcome study(const RunConfig& c) {
  if (std::find(study_meters().begin(), study_meters().end(), c.meter) == study_meters().end()) {
    invalid("meter", "unknown meter '" + c.meter + "'");
  }
  if (c.levels < 2) throw Error(Errc::fit_degenerate, "a study needs at least 2 levels");
  std::vector<double> hs, defects, ns;
  if (c.meter == "econdition") {
    const Outcome o = econdition(c);
    hs = o.report["h_sequence"].get<std::vector<double>>();
    defects = o.report["defect_norm"].get<std::vector<double>>();
    ns.assign(hs.size(), c.grid.at(2));
  } else {
    const bool two_d = c.meter == "green" || c.meter == "byparts" || c.meter == "el2d";
    std::vector<double> level_h;
    if (c.grid_sweep) {
      for (std::size_t k = 0; k < c.levels; ++k) level_h.push_back(c.h * std::pow(c.ratio, k));
    } else {
      level_h = two_d ? BoxDerivativeConfig{c.h, c.levels, c.ratio, c.tau}.h_sequence(
                            grid_2d(c, 0, 0).axis1())
                      : box_config(c).h_sequence(grid_1d(c, 0));
    }
    for (std::size_t k = 0; k < level_h.size(); ++k) {
      RunConfig lc = c;
      if (c.grid_sweep) {
        // refine the grid so that h / delta stays fixed
        const double scale = std::pow(c.ratio, -static_cast<double>(k));
        for (std::size_t idx = two_d ? 4 : 2; idx < c.grid.size(); ++idx) {
          const double n = (c.grid[idx] - 1) * scale + 1;
          if (std::abs(n - std::round(n)) > 1e-9) {
            invalid("grid", "grid sweep needs (n-1)/ratio^k to be an integer");
          }
          lc.grid[idx] = std::round(n);
        }
      }
      hs.push_back(level_h[k]);
      ns.push_back(lc.grid[two_d ? 4 : 2]);
      defects.push_back(study_defect(lc, level_h[k]));
    }
  }
  const double slope = loglog_slope(hs, defects);
  bool monotone = true;
  for (std::size_t k = 1; k < defects.size(); ++k) monotone = monotone && defects[k] <= defects[k - 1];
  const bool tiny = std::all_of(defects.begin(), defects.end(), [](double d) { return d <= 1e-12; });
  Outcome o;
  o.report["meter"] = c.meter;
  o.report["h_sequence"] = hs;
  o.report["grid_nodes"] = ns;
  o.report["defect"] = defects;
  o.report["fitted_slope"] = slope;
  o.report["monotone_nonincreasing"] = monotone;
  o.pass = tiny || (monotone && slope > 0);
  o.csv = csv_row({"h", "n", "defect", "slope"});
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const double local =
        k == 0 ? std::nan("")
               : std::log(defects[k] / defects[k - 1]) / std::log(hs[k] / hs[k - 1]);
    o.csv += csv_row({format_double(hs[k]), format_double(ns[k]), format_double(defects[k]),
                      std::isfinite(local) ? format_double(local) : ""});
    o.dat += format_double(hs[k]) + " " + format_double(defects[k]) + "\n";
  }
  return o;
}

inline Outcome dispatch(const RunConfig& c) {
  const std::string& k = c.command;
  if (k == "deriv") return deriv(c);
  if (k == "scale") return scale(c);
  if (k == "holder") return holder(c);
  if (k == "leibniz") return leibniz(c);
  if (k == "barrow") return barrow(c);
  if (k == "econdition") return econdition(c);
  if (k == "green") return green(c);
  if (k == "byparts") return byparts(c);
  if (k == "el") return el(c);
  if (k == "nbc") return nbc(c);
  if (k == "iso") return iso(c);
  if (k == "param") return param(c);
  if (k == "higher") return higher(c);
  if (k == "el2d") return el2d(c);
  if (k == "nbc2d") return nbc2d(c);
  if (k == "membrane") return membrane(c);
  if (k == "study") return study(c);
  invalid("command", "unknown command '" + k + "'");
}

inline void validate(const RunConfig& c) {
  if (c.command.empty()) invalid("command", "missing");
  if (std::find(commands().begin(), commands().end(), c.command) == commands().end()) {
    invalid("command", "unknown command '" + c.command + "'");
  }
  if (c.grid.empty()) invalid("grid", "missing");
  if (!(c.h > 0) || !std::isfinite(c.h)) invalid("h", "must be positive");
  if (c.levels < 1) invalid("levels", "must be positive");
  if (!(c.ratio > 0 && c.ratio < 1)) invalid("ratio", "must lie in (0,1)");
  if (!(c.tau > 0)) invalid("tau", "must be positive");
  if (c.order > kMaxOrder) invalid("order", "must not exceed " + std::to_string(kMaxOrder));
  if (c.sigma != 0 && c.sigma != 1 && c.sigma != -1) invalid("sigma", "must be +1 or -1");
  if (c.tol && !(*c.tol > 0)) invalid("tol", "must be positive");
  for (double h : c.hs) {
    if (!(h > 0)) invalid("hs", "entries must be positive");
  }
}

}  // namespace detail

/// Runs one command; reports go to the configured paths or to `out`.
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Outcome o;
  try {
    detail::validate(c);
    o = detail::dispatch(c);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  Json doc;
  doc["inputs"] = detail::inputs(c);
  doc["report"] = o.report;
  if (o.pass) doc["pass"] = *o.pass;
  const std::string text = dump(doc);
  std::string reread;
  try {
    if (!c.csv_path.empty() && !o.csv.empty()) write_file(c.csv_path, o.csv);
    if (!c.dat_path.empty() && !o.dat.empty()) write_file(c.dat_path, o.dat);
    if (c.json_path.empty()) {
      out << text;
      reread = text;
    } else {
      write_file(c.json_path, text);
      std::ifstream in(c.json_path, std::ios::binary);
      reread.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  if (o.pass && !*o.pass) return 2;
  // re-validate the report as written
  const Json back = Json::parse(reread, nullptr, false);
  if (back.is_discarded() || (back.contains("pass") && back["pass"] != true)) {
    err << "error: written report does not parse back to a passing run\n";
    return 1;
  }
  return 0;
}

}  // namespace boxcalc::cli
