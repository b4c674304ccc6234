// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "boxcalc/boxcalc.hpp"

using namespace boxcalc;

namespace {

const cplx I(0, 1);

struct Check {
  bool ok = true;
  std::ostringstream note;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note << " [failed: " << what << "]";
    }
  }
};

template <class F>
double sup_interior(const GridFunction1D& f, F&& ref) {
  double s = 0;
  for (std::size_t k = f.grid().first(); k <= f.grid().last(); ++k) {
    s = std::max(s, std::abs(f[k] - cplx(ref(f.grid().node(k)))));
  }
  return s;
}

Lagrangian L1(const char* text) { return lagrangian(Expression(text), 1); }
Lagrangian L2(const char* text) { return lagrangian(Expression(text), 2); }

void exactness(Check& c) {
  double worst = 0;
  for (double h : {0.1, 0.01}) {
    const Grid1D g(0.0, 2.0, 2001, 100);
    const auto sq = GridFunction1D::sample(g, [](double x) { return x * x; });
    const auto cu = GridFunction1D::sample(g, [](double x) { return x * x * x; });
    const double d2 = sup_interior(box_derivative_h(sq, h), [&](double x) { return 2 * x + I * h; });
    const double d3 = sup_interior(box_derivative_h(cu, h), [&](double x) {
      return (3 * x * x + h * h) + 3.0 * I * x * h;
    });
    worst = std::max({worst, d2, d3});
  }
  c.note << "sup defect " << worst;
  c.require(worst <= 1e-12, "sup defect <= 1e-12");
}

void smooth_limit(Check& c) {
  const auto f = GridFunction1D::sample(Grid1D(0.0, 1.0, 40001, 400),
                                        [](double x) { return std::sin(x); });
  const ScaleDerivative sd = scale_derivative(f, BoxDerivativeConfig{1e-2, 6, 0.5, 0.1});
  const double err = sup_interior(sd.limit, [](double x) { return std::cos(x); });
  c.note << "sup |limit - cos| " << err;
  c.require(err <= 1e-6, "error <= 1e-6");
}

void leibniz(Check& c) {
  const Grid1D g(0.0, 1.0, 4001, 80);
  const auto w = weierstrass(0.5, 3, 40, g);
  const double hs[] = {0.02, 0.01, 0.005, 0.0025};
  const DefectReport r = leibniz_defect(w, w, hs);
  const double ratio = r.defect_norm.back() / r.defect_norm.front();
  c.note << "weierstrass defects";
  for (double d : r.defect_norm) c.note << " " << d;
  c.note << ", finest/coarsest " << ratio;
  c.require(ratio <= 0.25, "finest <= coarsest/4");
  const auto k = GridFunction1D::sample(g, [](double) { return 1.7; });
  const DefectReport rc = leibniz_defect(k, w, hs);
  double worst = 0;
  for (double d : rc.defect_norm) worst = std::max(worst, d);
  c.note << "; constant factor " << worst;
  c.require(worst <= 1e-12, "constant factor <= 1e-12");
}

void barrow(Check& c) {
  const auto sq =
      GridFunction1D::sample(Grid1D(0.0, 1.0, 10001, 10), [](double x) { return x * x; });
  const double dq = barrow_defect(sq, BoxDerivativeConfig{1e-3, 1, 0.5, 0.1}).defect_norm[0];
  const auto af = GridFunction1D::sample(Grid1D(0.0, 1.0, 1025, 64),
                                         [](double x) { return 0.25 + 1.5 * x; });
  const DefectReport ra = barrow_defect(af, BoxDerivativeConfig{64.0 / 1024, 5, 0.5, 0.1});
  const double da = *std::max_element(ra.defect_norm.begin(), ra.defect_norm.end());
  const auto se =
      GridFunction1D::sample(Grid1D(0.0, 1.0, 1025, 32), [](double x) { return x * x; });
  const DefectReport re = econdition_estimate(se, BoxDerivativeConfig{32.0 / 1024, 4, 0.5, 0.1});
  const double de = *std::max_element(re.defect_norm.begin(), re.defect_norm.end());
  c.note << "x^2 defect " << dq << ", affine " << da << ", E-part of x^2 " << de;
  c.require(dq <= 1e-2, "x^2 <= 1e-2");
  c.require(da <= 1e-12, "affine <= 1e-12");
  c.require(de <= 1e-8, "E-part <= 1e-8");
}

void green(Check& c) {
  const Grid2D g(Grid1D(0.0, 1.0, 201, 1), Grid1D(0.0, 1.0, 201, 1));
  const double h = 1.0 / 200;
  auto on = [&](auto f) { return GridFunction2D::sample(g, f); };
  const double d1 = green_defect(on([](double, double b) { return b; }),
                                 on([](double a, double) { return a; }), h)
                        .defect_norm[0];
  const double d2 = green_defect(on([](double, double) { return 0.0; }),
                                 on([](double a, double) { return a; }), h)
                        .defect_norm[0];
  c.note << "(x2,x1) " << d1 << ", (0,x1) " << d2;
  c.require(d1 <= 1e-10, "(x2,x1) <= 1e-10");
  c.require(d2 <= 10 * h, "(0,x1) <= 10h");
}

constexpr double kH = 1.0 / 64;

Trajectory1D traj(double (*f)(double), std::size_t ghost) {
  return Trajectory1D(GridFunction1D::sample(Grid1D(0.0, 1.0, 257, ghost), f));
}

Trajectory2D saddle() {
  const Grid2D g(Grid1D(0.0, 1.0, 129, 4), Grid1D(0.0, 1.0, 129, 4));
  return {GridFunction2D::sample(g, [](double a, double b) { return a * a - b * b; })};
}

void el_exact(Check& c) {
  const double r1 =
      el_residual_1d(L1("v^2/2 + y"), traj([](double x) { return x * x / 2; }, 8), kH).residual_norm;
  const double r2 =
      el_residual_higher(L1("v2^2/2"), traj([](double x) { return x * x * x; }, 16), kH).residual_norm;
  const double r3 = el_residual_2d(L2("(v1^2 + v2^2)/2"), saddle(), 2.0 / 128).residual_norm;
  c.note << "first order " << r1 << ", higher " << r2 << ", double integral " << r3;
  c.require(r1 <= 1e-12 && r2 <= 1e-12 && r3 <= 1e-12, "all <= 1e-12");
}

void gateaux(Check& c) {
  double worst = 0;
  const Trajectory1D y1 = traj([](double x) { return x * x / 2; }, 8);
  const Trajectory1D y2 = traj([](double x) { return x * x * x; }, 16);
  const Trajectory2D y3 = saddle();
  const ActionSpec s1{L1("v^2/2 + y"), kH}, s2{L1("v2^2/2"), kH}, s3{L2("(v1^2 + v2^2)/2"), 2.0 / 128};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    worst = std::max(worst, std::abs(gateaux_derivative(
                                s1, y1, admissible_variation(y1.y().grid(), 1, kH, seed))));
    worst = std::max(worst, std::abs(gateaux_derivative(
                                s2, y2, admissible_variation(y2.y().grid(), 2, kH, seed))));
    worst = std::max(worst, std::abs(gateaux_derivative(
                                s3, y3, admissible_variation(y3.y.grid(), 2.0 / 128, seed))));
  }
  c.note << "max |Gateaux| over 30 variations " << worst;
  c.require(worst <= 1e-6, "<= 1e-6");
}

void isoperimetric(Check& c) {
  const Grid1D g(0.0, 1.0, 2001, 2);
  const Trajectory1D y(GridFunction1D::sample(g, [](double x) { return (x - x * x) / 4; }));
  const ELReport r = iso_solve(L1("v^2"), L1("y"), y, 1.0 / 24, g.delta());
  const double err = std::abs(*r.multiplier - 1.0);
  c.note << "|lambda - 1| " << err;
  c.require(err <= 1e-6, "lambda within 1e-6");
  bool raised = false;
  try {
    const Trajectory1D line(GridFunction1D::sample(g, [](double x) { return x; }));
    iso_solve(L1("v^2"), L1("v^2/2"), line, 0.5, g.delta());
  } catch (const Error& e) {
    raised = e.code() == Errc::nondegeneracy_failure;
  }
  c.note << ", NondegeneracyFailure " << (raised ? "raised" : "not raised");
  c.require(raised, "NondegeneracyFailure");
}

void parameter(Check& c) {
  const Trajectory1D y = traj([](double x) { return x; }, 8);
  const Lagrangian L = L1("(v - xi)^2");
  const double e1 = std::abs(*solve_parameter(L, y, kH).parameter - 1.0);
  const double e2 =
      std::abs(el_residual_parameter(L, y, 0.0, kH).boundary_defects[0].value + 2.0);
  c.note << "|xi - 1| " << e1 << ", |integral(0) + 2| " << e2;
  c.require(e1 <= 1e-12, "xi within 1e-12");
  c.require(e2 <= 1e-9, "integral within 1e-9");
}

void natural(Check& c) {
  auto free1 = [](double (*f)(double)) {
    return Trajectory1D(GridFunction1D::sample(Grid1D(0.0, 1.0, 257, 8), f), BoundaryKind::free);
  };
  const ELReport a = natural_bc_1d(L1("v^2/2"), free1([](double) { return 2.0; }), kH);
  const ELReport b = natural_bc_1d(L1("v^2/2"), free1([](double x) { return x; }), kH);
  const ELReport d = natural_bc_1d(L1("(v - 1)^2/2"), free1([](double x) { return x; }), kH);
  auto defects = [](const ELReport& r) {
    double s = 0;
    for (const auto& v : r.boundary_defects) s = std::max(s, std::abs(v.value));
    return s;
  };
  const Grid2D g(Grid1D(0.0, 1.0, 65, 2), Grid1D(0.0, 1.0, 65, 2));
  auto free2 = [&](auto f) { return Trajectory2D{GridFunction2D::sample(g, f), BoundaryKind::free}; };
  const ELReport p = natural_bc_2d(L2("(v1^2 + v2^2)/2"), free2([](double, double) { return 1.0; }), 1.0 / 64);
  const ELReport q = natural_bc_2d(L2("(v1^2 + v2^2)/2"), free2([](double x, double) { return x; }), 1.0 / 64);
  const ELReport s = natural_bc_2d(L2("((v1 - 1)^2 + v2^2)/2"), free2([](double x, double) { return x; }), 1.0 / 64);
  const bool one_d = a.is_extremal && defects(a) == 0 && !b.is_extremal &&
                     std::abs(b.boundary_defects[0].value - 1.0) <= 1e-12 &&
                     std::abs(b.boundary_defects[1].value - 1.0) <= 1e-12 && d.is_extremal &&
                     defects(d) <= 1e-12;
  const bool two_d = p.is_extremal && defects(p) == 0 && !q.is_extremal &&
                     std::abs(q.boundary_defects[0].value - 1.0) <= 1e-12 &&
                     std::abs(q.boundary_defects[1].value - 1.0) <= 1e-12 &&
                     std::abs(q.boundary_defects[2].value) <= 1e-12 &&
                     std::abs(q.boundary_defects[3].value) <= 1e-12 && s.is_extremal &&
                     defects(s) <= 1e-12;
  c.note << "1D triple " << (one_d ? "reproduced" : "differs") << ", 2D quintuple "
         << (two_d ? "reproduced" : "differs");
  c.require(one_d && two_d, "pass/fail pattern");
}

void membrane(Check& c) {
  const Grid2D g(Grid1D(0.0, 1.0, 65), Grid1D(0.0, 1.0, 65));
  const double h = g.axis1().delta();
  const auto sol = solve_membrane([](double a, double b) { return a * a - b * b; }, g, h);
  double err = 0;
  const auto& a1 = sol.u.grid().axis1();
  const auto& a2 = sol.u.grid().axis2();
  for (std::size_t i = a1.first(); i <= a1.last(); ++i) {
    for (std::size_t j = a2.first(); j <= a2.last(); ++j) {
      const double x1 = a1.node(i), x2 = a2.node(j);
      err = std::max(err, std::abs(sol.u(i, j) - (x1 * x1 - x2 * x2)));
    }
  }
  const double zero = solve_membrane([](double, double) { return 0.0; }, g, h).u.sup_norm();
  const double res = el_residual_2d(L2("(v1^2 + v2^2)/2"), Trajectory2D{sol.u}, h).residual_norm;
  c.note << "interior error " << err << ", zero data sup " << zero << ", EL residual " << res;
  c.require(err <= 1e-8, "error <= 1e-8");
  c.require(zero == 0, "zero interior");
  c.require(res <= 1e-9, "residual <= 1e-9");
}

void holder(Check& c) {
  const Grid1D g(0.0, 1.0, 4096);
  const double aw = estimate_holder_exponent(weierstrass(0.5, 3, 40, g)).alpha;
  const double aq =
      estimate_holder_exponent(GridFunction1D::sample(g, [](double x) { return x * x; })).alpha;
  c.note << "weierstrass " << aw << ", x^2 " << aq;
  c.require(aw >= 0.53 && aw <= 0.73, "weierstrass in [0.53, 0.73]");
  c.require(aq >= 0.9, "x^2 >= 0.9");
}

void variants(Check& c) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  int same = 0;
  for (int t = 0; t < 5; ++t) {
    const double a = 0.5 + std::abs(u(rng)), b = u(rng), p = u(rng), q = u(rng), r = u(rng);
    const Lagrangian L({false, 1, false, 1}, [=](const LagrangianArgs& x) {
      return a * x.v[0] * x.v[0] + b * x.y * x.y + p * x.y;
    });
    const Trajectory1D y(GridFunction1D::sample(Grid1D(0.0, 1.0, 257, 8),
                                                [=](double x) { return q * x * x + r * x; }));
    const auto f = std::get<GridFunction1D>(el_residual_1d(L, y, kH).residual_field);
    const auto g = std::get<GridFunction1D>(el_residual_higher(L, y, kH).residual_field);
    if (f.grid() == g.grid() && f.values() == g.values()) ++same;
  }
  c.note << same << "/5 pairs bit-identical";
  c.require(same == 5, "all identical");
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Check&)>> criteria[] = {
      {"exactness grade", exactness},       {"smooth scale limit", smooth_limit},
      {"Leibniz defect", leibniz},          {"Barrow defect", barrow},
      {"Green defect", green},              {"exact extremals", el_exact},
      {"Gateaux oracle", gateaux},          {"isoperimetric multiplier", isoperimetric},
      {"parameter condition", parameter},   {"natural boundary conditions", natural},
      {"membrane", membrane},               {"Holder estimator", holder},
      {"variant consistency", variants}};
  int failed = 0, n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.note << " threw " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!c.ok) ++failed;
    std::printf("%2d %-28s %s  %s (%.2fs)\n", n, name, c.ok ? "PASS" : "FAIL",
                c.note.str().c_str(), secs);
  }
  std::printf("%d of %d criteria pass\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
