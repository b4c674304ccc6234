#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "boxcalc/error.hpp"
#include "boxcalc/grid.hpp"

namespace boxcalc {

inline constexpr std::size_t kMaxOrder = 8;

/// Evaluation point (x1 [, x2], y, v1..vn [, xi]). In one dimension v_k stands
/// for the k-th box derivative of y; in two dimensions v1, v2 are the partial
/// box derivatives along x1 and x2.
struct LagrangianArgs {
  double x1 = 0;
  double x2 = 0;
  cplx y;
  std::array<cplx, kMaxOrder> v{};
  cplx xi;
};

struct Arity {
  bool uses_x = false;
  unsigned order = 1;
  bool uses_xi = false;
  unsigned dims = 1;

  /// Number of v-slots the Lagrangian reads.
  unsigned slots() const noexcept { return dims == 2 ? 2u : order; }
};

/// Identifies one argument of the Lagrangian; v slots are 1-based.
struct Slot {
  enum Kind { y, v, xi } kind = y;
  unsigned index = 0;
};

namespace detail {

inline cplx& slot_ref(LagrangianArgs& a, Slot s) {
  switch (s.kind) {
    case Slot::y: return a.y;
    case Slot::v: return a.v[s.index - 1];
    case Slot::xi: return a.xi;
  }
  return a.y;
}

}  // namespace detail

class Lagrangian {
 public:
  using Fn = std::function<cplx(const LagrangianArgs&)>;

  struct Partials {
    Fn dy;
    std::vector<Fn> dv;  // one per v-slot
    Fn dxi;
  };

  /// Partials are taken by central finite differences.
  Lagrangian(Arity arity, Fn eval) : arity_(arity), eval_(std::move(eval)) { check_arity(); }

  /// Closed-form partials, checked against finite differences on a probe set.
  Lagrangian(Arity arity, Fn eval, Partials partials)
      : arity_(arity), eval_(std::move(eval)), partials_(std::move(partials)), closed_(true) {
    check_arity();
    if (partials_.dv.size() != arity_.slots() || !partials_.dy) {
      throw Error(Errc::arity_mismatch, "closed-form partials do not match the arity");
    }
    if (arity_.uses_xi && !partials_.dxi) {
      throw Error(Errc::arity_mismatch, "missing closed-form partial in xi");
    }
    validate_partials();
  }

  const Arity& arity() const noexcept { return arity_; }
  bool closed_form_partials() const noexcept { return closed_; }

  cplx operator()(const LagrangianArgs& a) const { return eval_(a); }

  cplx partial(Slot s, const LagrangianArgs& a) const {
    if (closed_) {
      switch (s.kind) {
        case Slot::y: return partials_.dy(a);
        case Slot::v: return partials_.dv.at(s.index - 1)(a);
        case Slot::xi: return arity_.uses_xi ? partials_.dxi(a) : cplx{};
      }
    }
    return finite_difference(s, a);
  }

  cplx d_y(const LagrangianArgs& a) const { return partial({Slot::y, 0}, a); }
  cplx d_v(unsigned i, const LagrangianArgs& a) const { return partial({Slot::v, i}, a); }
  cplx d_xi(const LagrangianArgs& a) const { return partial({Slot::xi, 0}, a); }

  /// Central difference with step 1e-6 * max(1, |argument|).
  cplx finite_difference(Slot s, const LagrangianArgs& a) const {
    LagrangianArgs p = a;
    cplx& target = detail::slot_ref(p, s);
    const cplx base = target;
    const double step = 1e-6 * std::max(1.0, std::abs(base));
    target = base + step;
    const cplx up = eval_(p);
    target = base - step;
    const cplx down = eval_(p);
    return (up - down) / (2.0 * step);
  }

  /// L - lambda * theta, with partials combined the same way.
  friend Lagrangian combine(const Lagrangian& L, cplx lambda, const Lagrangian& theta) {
    if (L.arity_.dims != theta.arity_.dims || L.arity_.order != theta.arity_.order) {
      throw Error(Errc::arity_mismatch, "cannot combine Lagrangians of different arity");
    }
    Arity ar = L.arity_;
    ar.uses_x = L.arity_.uses_x || theta.arity_.uses_x;
    ar.uses_xi = L.arity_.uses_xi || theta.arity_.uses_xi;
    Fn eval = [L, theta, lambda](const LagrangianArgs& a) { return L(a) - lambda * theta(a); };
    Partials p;
    p.dy = [L, theta, lambda](const LagrangianArgs& a) {
      return L.d_y(a) - lambda * theta.d_y(a);
    };
    for (unsigned i = 1; i <= ar.slots(); ++i) {
      p.dv.push_back([L, theta, lambda, i](const LagrangianArgs& a) {
        return L.d_v(i, a) - lambda * theta.d_v(i, a);
      });
    }
    p.dxi = [L, theta, lambda](const LagrangianArgs& a) {
      return L.d_xi(a) - lambda * theta.d_xi(a);
    };
    Lagrangian out(ar, std::move(eval));
    out.partials_ = std::move(p);
    out.closed_ = true;
    return out;
  }

  /// L + c for a constant c; partials unchanged.
  Lagrangian plus_constant(cplx c) const {
    Lagrangian out = *this;
    Fn base = eval_;
    out.eval_ = [base, c](const LagrangianArgs& a) { return base(a) + c; };
    return out;
  }

 private:
  void check_arity() const {
    if (!eval_) throw Error(Errc::arity_mismatch, "Lagrangian without evaluation map");
    if (arity_.dims != 1 && arity_.dims != 2) {
      throw Error(Errc::arity_mismatch, "dims must be 1 or 2");
    }
    if (arity_.order < 1 || arity_.order > kMaxOrder) {
      throw Error(Errc::arity_mismatch, "order must lie in [1, " + std::to_string(kMaxOrder) + "]");
    }
    if (arity_.dims == 2 && arity_.order != 1) {
      throw Error(Errc::arity_mismatch, "double-integral Lagrangians are first order");
    }
  }

  void validate_partials() const {
    static constexpr std::array<double, 3> ys{-0.7, 0.3, 1.9};
    static constexpr std::array<double, 3> xs{0.1, 0.45, 0.8};
    for (std::size_t p = 0; p < ys.size(); ++p) {
      LagrangianArgs a;
      a.x1 = xs[p];
      a.x2 = xs[(p + 1) % xs.size()];
      a.y = ys[p];
      for (unsigned i = 0; i < kMaxOrder; ++i) {
        a.v[i] = cplx(0.35 * (i + 1) - ys[p], 0.2 * ys[(p + i) % ys.size()]);
      }
      a.xi = cplx(0.5 - ys[p], 0.25);
      std::vector<Slot> slots{{Slot::y, 0}};
      for (unsigned i = 1; i <= arity_.slots(); ++i) slots.push_back({Slot::v, i});
      if (arity_.uses_xi) slots.push_back({Slot::xi, 0});
      for (Slot s : slots) {
        const cplx cf = partial(s, a);
        const cplx fd = finite_difference(s, a);
        if (std::abs(cf - fd) > 1e-5 * std::max(1.0, std::abs(cf))) {
          throw Error(Errc::partials_mismatch,
                      "closed-form partial disagrees with finite differences");
        }
      }
    }
  }

  Arity arity_;
  Fn eval_;
  Partials partials_;
  bool closed_ = false;
};

}  // namespace boxcalc
