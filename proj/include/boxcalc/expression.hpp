#pragma once

/**
 * @file expression.hpp
 * @brief The small expression language used to declare functions and
 * Lagrangians from the command line or a config file.
 *
 * Grammar (usual precedence, ^ binds tightest and is right-associative):
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := ('+' | '-') unary | power
 *   power   := primary ('^' unary)?
 *   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
 *
 * Names: x (same as x1), x1, x2, y, v (same as v1), v1..v8, xi, pi, i.
 * Functions: sin, cos, exp, weierstrass(a, b, terms) evaluated at x.
 *
 * Evaluation is forward-mode on dual numbers, so Lagrangian partials are
 * exact. Integer powers are expanded into products to keep polynomial
 * expressions bit-exact.
 */

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "boxcalc/error.hpp"
#include "boxcalc/grid.hpp"
#include "boxcalc/holder.hpp"
#include "boxcalc/lagrangian.hpp"

namespace boxcalc {

/// Value and one directional derivative.
struct Dual {
  cplx v;
  cplx d;
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}

enum class Var { x1, x2, y, v, xi };

struct Bindings {
  double x1 = 0;
  double x2 = 0;
  cplx y;
  std::array<cplx, kMaxOrder> v{};
  cplx xi;
};

class Expression {
 public:
  /// Parses `text`; throws ConfigInvalid with the offending column.
  explicit Expression(std::string text);

  const std::string& text() const noexcept { return text_; }

  bool uses(Var var) const;
  /// Largest v index referenced (0 if none).
  unsigned max_v() const;

  cplx eval(const Bindings& b) const { return eval_dual(b, std::nullopt).v; }

  /// Value and derivative along the seeded slot.
  Dual eval_dual(const Bindings& b, std::optional<Slot> seed) const;

  /// Parameters of a top-level weierstrass(a, b, terms) call.
  struct WeierstrassCall {
    double a;
    unsigned b;
    unsigned terms;
  };
  std::optional<WeierstrassCall> top_level_weierstrass() const;

 private:
  struct Node;
  using Ptr = std::shared_ptr<const Node>;
  enum class Kind { number, variable, neg, add, sub, mul, div, pow, call };
  struct Node {
    Kind kind;
    cplx number;
    Var var = Var::x1;
    unsigned index = 0;  // v slot, 1-based
    std::string fn;
    std::vector<Ptr> args;
  };

  class Parser;

  Dual eval_node(const Node& n, const Bindings& b, const std::optional<Slot>& seed) const;
  WeierstrassCall weierstrass_params(const Node& call) const;
  static void collect(const Node& n, std::vector<const Node*>& out);

  std::string text_;
  Ptr root_;
};

class Expression::Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Ptr parse() {
    Ptr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::config_invalid, "expression \"" + std::string(s_) + "\" column " +
                                          std::to_string(pos_ + 1) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static Ptr make(Kind k, std::vector<Ptr> args = {}) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->args = std::move(args);
    return n;
  }

  Ptr expr() {
    Ptr lhs = term();
    for (;;) {
      if (eat('+')) {
        lhs = make(Kind::add, {lhs, term()});
      } else if (eat('-')) {
        lhs = make(Kind::sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }
  Ptr term() {
    Ptr lhs = unary();
    for (;;) {
      if (eat('*')) {
        lhs = make(Kind::mul, {lhs, unary()});
      } else if (eat('/')) {
        lhs = make(Kind::div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }
  Ptr unary() {
    if (eat('-')) return make(Kind::neg, {unary()});
    if (eat('+')) return unary();
    return power();
  }
  Ptr power() {
    Ptr base = primary();
    if (eat('^')) return make(Kind::pow, {base, unary()});
    return base;
  }
  Ptr primary() {
    skip();
    if (pos_ >= s_.size()) fail("expression ends early");
    const char c = s_[pos_];
    if (eat('(')) {
      Ptr e = expr();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }
  Ptr number() {
    const char* begin = s_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Node>();
    n->kind = Kind::number;
    n->number = v;
    return n;
  }
  Ptr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    if (eat('(')) {
      if (id != "sin" && id != "cos" && id != "exp" && id != "weierstrass") {
        pos_ = start;
        fail("unknown function '" + id + "'");
      }
      std::vector<Ptr> args{expr()};
      while (eat(',')) args.push_back(expr());
      if (!eat(')')) fail("missing ')' after arguments of " + id);
      const std::size_t want = id == "weierstrass" ? 3 : 1;
      if (args.size() != want) {
        fail(id + " takes " + std::to_string(want) + " argument" + (want == 1 ? "" : "s"));
      }
      auto n = std::make_shared<Node>();
      n->kind = Kind::call;
      n->fn = id;
      n->args = std::move(args);
      return n;
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    if (id == "pi") {
      n->kind = Kind::number;
      n->number = std::numbers::pi;
    } else if (id == "i") {
      n->kind = Kind::number;
      n->number = cplx(0, 1);
    } else if (id == "x" || id == "x1") {
      n->var = Var::x1;
    } else if (id == "x2") {
      n->var = Var::x2;
    } else if (id == "y") {
      n->var = Var::y;
    } else if (id == "xi") {
      n->var = Var::xi;
    } else if (id == "v") {
      n->var = Var::v;
      n->index = 1;
    } else if (id.size() == 2 && id[0] == 'v' && id[1] >= '1' && static_cast<std::size_t>(id[1] - '0') <= kMaxOrder) {
      n->var = Var::v;
      n->index = static_cast<unsigned>(id[1] - '0');
    } else {
      pos_ = start;
      fail("unknown name '" + id + "'");
    }
    return n;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline Expression::Expression(std::string text) : text_(std::move(text)) {
  root_ = Parser(text_).parse();
  std::vector<const Node*> all;
  collect(*root_, all);
  for (const Node* n : all) {
    if (n->kind == Kind::call && n->fn == "weierstrass") {
      const WeierstrassCall w = weierstrass_params(*n);
      check_weierstrass_parameters(w.a, w.b, w.terms);
    }
  }
}

inline void Expression::collect(const Node& n, std::vector<const Node*>& out) {
  out.push_back(&n);
  for (const auto& a : n.args) collect(*a, out);
}

inline bool Expression::uses(Var var) const {
  std::vector<const Node*> all;
  collect(*root_, all);
  for (const Node* n : all) {
    if (n->kind == Kind::variable && n->var == var) return true;
    if (var == Var::x1 && n->kind == Kind::call && n->fn == "weierstrass") return true;
  }
  return false;
}

inline unsigned Expression::max_v() const {
  std::vector<const Node*> all;
  collect(*root_, all);
  unsigned m = 0;
  for (const Node* n : all) {
    if (n->kind == Kind::variable && n->var == Var::v) m = std::max(m, n->index);
  }
  return m;
}

inline Expression::WeierstrassCall Expression::weierstrass_params(const Node& call) const {
  std::vector<const Node*> inside;
  for (const auto& a : call.args) collect(*a, inside);
  for (const Node* n : inside) {
    if (n->kind == Kind::variable) {
      throw Error(Errc::config_invalid, "weierstrass parameters must be constants");
    }
  }
  const Bindings none;
  double p[3];
  for (std::size_t k = 0; k < 3; ++k) {
    const cplx z = eval_node(*call.args[k], none, std::nullopt).v;
    if (z.imag() != 0) throw Error(Errc::config_invalid, "weierstrass parameters must be real");
    p[k] = z.real();
  }
  if (p[1] != std::round(p[1]) || p[2] != std::round(p[2]) || p[1] < 0 || p[2] < 0) {
    throw Error(Errc::config_invalid, "weierstrass b and terms must be nonnegative integers");
  }
  return {p[0], static_cast<unsigned>(p[1]), static_cast<unsigned>(p[2])};
}

inline std::optional<Expression::WeierstrassCall> Expression::top_level_weierstrass() const {
  if (root_->kind != Kind::call || root_->fn != "weierstrass") return std::nullopt;
  return weierstrass_params(*root_);
}

inline Dual Expression::eval_dual(const Bindings& b, std::optional<Slot> seed) const {
  return eval_node(*root_, b, seed);
}

inline Dual Expression::eval_node(const Node& n, const Bindings& b,
                                  const std::optional<Slot>& seed) const {
  auto arg = [&](std::size_t k) { return eval_node(*n.args[k], b, seed); };
  switch (n.kind) {
    case Kind::number: return {n.number, 0};
    case Kind::variable: {
      switch (n.var) {
        case Var::x1: return {b.x1, 0};
        case Var::x2: return {b.x2, 0};
        case Var::y: return {b.y, seed && seed->kind == Slot::y ? 1.0 : 0.0};
        case Var::xi: return {b.xi, seed && seed->kind == Slot::xi ? 1.0 : 0.0};
        case Var::v:
          return {b.v[n.index - 1], seed && seed->kind == Slot::v && seed->index == n.index ? 1.0 : 0.0};
      }
      return {};
    }
    case Kind::neg: return -arg(0);
    case Kind::add: return arg(0) + arg(1);
    case Kind::sub: return arg(0) - arg(1);
    case Kind::mul: return arg(0) * arg(1);
    case Kind::div: return arg(0) / arg(1);
    case Kind::pow: {
      const Dual base = arg(0);
      const Dual ex = arg(1);
      const bool integer = ex.d == cplx{} && ex.v.imag() == 0 &&
                           ex.v.real() == std::round(ex.v.real()) && std::abs(ex.v.real()) <= 64;
      if (integer) {
        const int k = static_cast<int>(ex.v.real());
        Dual r{1.0, 0.0};
        for (int j = 0; j < std::abs(k); ++j) r = r * base;
        return k < 0 ? Dual{1.0, 0.0} / r : r;
      }
      const cplx val = std::pow(base.v, ex.v);
      cplx d = ex.d * std::log(base.v) * val;
      if (base.d != cplx{}) d += ex.v * std::pow(base.v, ex.v - 1.0) * base.d;
      return {val, d};
    }
    case Kind::call: {
      if (n.fn == "weierstrass") {
        const WeierstrassCall w = weierstrass_params(n);
        return {weierstrass_value(w.a, w.b, w.terms, b.x1), 0};
      }
      const Dual a = arg(0);
      if (n.fn == "sin") return {std::sin(a.v), std::cos(a.v) * a.d};
      if (n.fn == "cos") return {std::cos(a.v), -std::sin(a.v) * a.d};
      const cplx e = std::exp(a.v);
      return {e, e * a.d};
    }
  }
  return {};
}

/// Samples a function of x on the grid. A top-level weierstrass call carries
/// its Holder exponent.
inline GridFunction1D function_1d(const Expression& e, const Grid1D& grid) {
  if (e.uses(Var::y) || e.uses(Var::v) || e.uses(Var::xi) || e.uses(Var::x2)) {
    throw Error(Errc::config_invalid, "function \"" + e.text() + "\" may only depend on x");
  }
  if (auto w = e.top_level_weierstrass()) return weierstrass(w->a, w->b, w->terms, grid);
  Bindings b;
  return GridFunction1D::sample(grid, [&](double x) {
    b.x1 = x;
    return e.eval(b);
  });
}

/// Samples a function of (x1, x2) on the grid.
inline GridFunction2D function_2d(const Expression& e, const Grid2D& grid) {
  if (e.uses(Var::y) || e.uses(Var::v) || e.uses(Var::xi)) {
    throw Error(Errc::config_invalid, "function \"" + e.text() + "\" may only depend on x1, x2");
  }
  Bindings b;
  return GridFunction2D::sample(grid, [&](double x1, double x2) {
    b.x1 = x1;
    b.x2 = x2;
    return e.eval(b);
  });
}

namespace detail {

inline Bindings bind(const LagrangianArgs& a) {
  Bindings b;
  b.x1 = a.x1;
  b.x2 = a.x2;
  b.y = a.y;
  b.v = a.v;
  b.xi = a.xi;
  return b;
}

}  // namespace detail

/// Lagrangian with exact partials from an expression in x, y, v1.., xi.
/// In two dimensions v1, v2 are the partial box derivatives along x1, x2.
inline Lagrangian lagrangian(const Expression& e, unsigned dims,
                             std::optional<unsigned> order = std::nullopt) {
  Arity ar;
  ar.dims = dims;
  ar.uses_x = e.uses(Var::x1) || e.uses(Var::x2);
  ar.uses_xi = e.uses(Var::xi);
  const unsigned used = e.max_v();
  if (dims == 2) {
    if (used > 2) throw Error(Errc::arity_mismatch, "double-integral Lagrangians read v1, v2 only");
    ar.order = 1;
  } else {
    if (e.uses(Var::x2)) throw Error(Errc::arity_mismatch, "x2 is not defined in one dimension");
    ar.order = std::max(1u, order.value_or(used));
    if (used > ar.order) {
      throw Error(Errc::arity_mismatch, "expression reads v" + std::to_string(used) +
                                            " but the order is " + std::to_string(ar.order));
    }
  }
  auto along = [e](Slot s) {
    return [e, s](const LagrangianArgs& a) { return e.eval_dual(detail::bind(a), s).d; };
  };
  Lagrangian::Partials p;
  p.dy = along({Slot::y, 0});
  for (unsigned i = 1; i <= ar.slots(); ++i) p.dv.push_back(along({Slot::v, i}));
  if (ar.uses_xi) p.dxi = along({Slot::xi, 0});
  return Lagrangian(ar, [e](const LagrangianArgs& a) { return e.eval(detail::bind(a)); },
                    std::move(p));
}

}  // namespace boxcalc
