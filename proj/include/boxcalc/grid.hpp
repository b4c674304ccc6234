#pragma once

/**
 * @file grid.hpp
 * @brief Uniform grids and complex-valued grid functions in one and two variables.
 *
 * A Grid1D covers [a,b] with n nodes of spacing delta = (b-a)/(n-1) and carries
 * `ghost` extra nodes beyond each end. Storage index k runs over
 * [0, n + 2*ghost); node(k) = a + (k - ghost)*delta. Shifts by h are only
 * allowed when h is an integer multiple of delta, so every difference quotient
 * reads stored samples and no interpolation error enters.
 *
 * Every function is stored complex-valued; real inputs carry a zero imaginary
 * part. Each node also carries a trust flag which is cleared whenever a value
 * was produced by a one-sided boundary fallback.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "boxcalc/error.hpp"

namespace boxcalc {

using cplx = std::complex<double>;

class Grid1D {
 public:
  Grid1D(double a, double b, std::size_t n, std::size_t ghost = 0)
      : a_(a), b_(b), n_(n), ghost_(ghost) {
    if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
      throw Error(Errc::parameter_out_of_range, "grid requires finite a < b");
    }
    if (n < 3) throw Error(Errc::parameter_out_of_range, "grid requires n >= 3");
    delta_ = (b - a) / static_cast<double>(n - 1);
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t ghost() const noexcept { return ghost_; }
  double delta() const noexcept { return delta_; }
  /// Total node count including both ghost bands.
  std::size_t size() const noexcept { return n_ + 2 * ghost_; }

  /// Storage index of the node sitting at a.
  std::size_t first() const noexcept { return ghost_; }
  /// Storage index of the node sitting at b.
  std::size_t last() const noexcept { return ghost_ + n_ - 1; }

  double node(std::size_t k) const noexcept {
    const auto offset = static_cast<double>(static_cast<std::ptrdiff_t>(k) -
                                            static_cast<std::ptrdiff_t>(ghost_));
    if (k == last()) return b_;
    return a_ + offset * delta_;
  }

  bool in_interval(std::size_t k) const noexcept { return k >= first() && k <= last(); }

  Grid1D with_ghost(std::size_t g) const { return Grid1D(a_, b_, n_, g); }

  /// Same interval and resolution; ghost bands may differ.
  bool same_nodes(const Grid1D& o) const noexcept {
    return a_ == o.a_ && b_ == o.b_ && n_ == o.n_;
  }
  bool operator==(const Grid1D& o) const noexcept {
    return same_nodes(o) && ghost_ == o.ghost_;
  }

  /// Number of grid steps m with h = m*delta.
  std::size_t steps(double h) const {
    if (!(h > 0) || !std::isfinite(h)) {
      throw Error(Errc::parameter_out_of_range, "step h must be positive");
    }
    const double ratio = h / delta_;
    const double m = std::round(ratio);
    if (m < 1 || std::abs(ratio - m) > 1e-8 * std::max(1.0, m)) {
      throw Error(Errc::non_uniform_shift,
                  "h = " + std::to_string(h) + " is not an integer multiple of delta = " +
                      std::to_string(delta_));
    }
    return static_cast<std::size_t>(m);
  }

  /// Storage index of the node at x; x must coincide with a node.
  std::size_t locate(double x) const {
    const double pos = (x - a_) / delta_ + static_cast<double>(ghost_);
    const double k = std::round(pos);
    if (k < 0 || k >= static_cast<double>(size())) {
      throw Error(Errc::out_of_domain, "x = " + std::to_string(x) + " lies outside the grid");
    }
    if (std::abs(pos - k) > 1e-7) {
      throw Error(Errc::non_uniform_shift, "x = " + std::to_string(x) + " is not a grid node");
    }
    return static_cast<std::size_t>(k);
  }

 private:
  double a_, b_;
  std::size_t n_;
  std::size_t ghost_;
  double delta_ = 0;
};

enum class Source { closed_form, sampled };

class GridFunction1D {
 public:
  GridFunction1D(Grid1D grid, std::vector<cplx> values, Source source = Source::sampled,
                 std::optional<double> holder_alpha = std::nullopt)
      : grid_(std::move(grid)),
        values_(std::move(values)),
        untrusted_(values_.size(), 0),
        holder_alpha_(holder_alpha),
        source_(source) {
    if (values_.size() != grid_.size()) {
      throw Error(Errc::grid_mismatch, "value count " + std::to_string(values_.size()) +
                                           " does not match grid size " +
                                           std::to_string(grid_.size()));
    }
    if (holder_alpha_ && !(*holder_alpha_ > 0 && *holder_alpha_ < 1)) {
      throw Error(Errc::parameter_out_of_range, "holder exponent must lie in (0,1)");
    }
  }

  /// Samples a closed-form function at every node, ghosts included.
  template <class F>
  static GridFunction1D sample(const Grid1D& grid, F&& f, Source source = Source::closed_form,
                               std::optional<double> holder_alpha = std::nullopt) {
    std::vector<cplx> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) v[k] = cplx(f(grid.node(k)));
    return GridFunction1D(grid, std::move(v), source, holder_alpha);
  }

  const Grid1D& grid() const noexcept { return grid_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  cplx operator[](std::size_t k) const { return values_[k]; }
  cplx& operator[](std::size_t k) { return values_[k]; }
  /// Value at the node sitting at x.
  cplx at(double x) const { return values_[grid_.locate(x)]; }

  bool trusted(std::size_t k) const { return untrusted_[k] == 0; }
  void mark_untrusted(std::size_t k) { untrusted_[k] = 1; }
  std::size_t untrusted_count() const {
    return static_cast<std::size_t>(std::count(untrusted_.begin(), untrusted_.end(), 1));
  }

  std::optional<double> holder_alpha() const noexcept { return holder_alpha_; }
  void set_holder_alpha(std::optional<double> alpha) { holder_alpha_ = alpha; }
  Source source() const noexcept { return source_; }

  /// Restriction to a narrower ghost band.
  GridFunction1D crop(std::size_t ghost) const {
    if (ghost > grid_.ghost()) {
      throw Error(Errc::out_of_domain, "cannot widen a ghost band by cropping");
    }
    const std::size_t off = grid_.ghost() - ghost;
    Grid1D g = grid_.with_ghost(ghost);
    std::vector<cplx> v(values_.begin() + static_cast<std::ptrdiff_t>(off),
                        values_.begin() + static_cast<std::ptrdiff_t>(off + g.size()));
    GridFunction1D out(g, std::move(v), source_, holder_alpha_);
    for (std::size_t k = 0; k < g.size(); ++k) out.untrusted_[k] = untrusted_[k + off];
    return out;
  }

  /// Sup of |f| over trusted nodes of [a,b].
  double sup_norm() const {
    double s = 0;
    for (std::size_t k = grid_.first(); k <= grid_.last(); ++k) {
      if (trusted(k)) s = std::max(s, std::abs(values_[k]));
    }
    return s;
  }

  template <class Op>
  GridFunction1D map(Op&& op) const {
    GridFunction1D out = *this;
    for (auto& z : out.values_) z = op(z);
    out.holder_alpha_.reset();
    out.source_ = Source::sampled;
    return out;
  }

  friend GridFunction1D combine(const GridFunction1D& f, const GridFunction1D& g,
                                auto&& op) {
    const std::size_t ghost = std::min(f.grid().ghost(), g.grid().ghost());
    if (!f.grid().same_nodes(g.grid())) {
      throw Error(Errc::grid_mismatch, "grid functions live on different grids");
    }
    GridFunction1D fc = f.crop(ghost);
    const GridFunction1D gc = g.crop(ghost);
    for (std::size_t k = 0; k < fc.size(); ++k) {
      fc.values_[k] = op(fc.values_[k], gc.values_[k]);
      fc.untrusted_[k] = static_cast<std::uint8_t>(fc.untrusted_[k] | gc.untrusted_[k]);
    }
    fc.holder_alpha_.reset();
    fc.source_ = (f.source_ == Source::closed_form && g.source_ == Source::closed_form)
                     ? Source::closed_form
                     : Source::sampled;
    return fc;
  }

  friend GridFunction1D operator+(const GridFunction1D& f, const GridFunction1D& g) {
    return combine(f, g, [](cplx p, cplx q) { return p + q; });
  }
  friend GridFunction1D operator-(const GridFunction1D& f, const GridFunction1D& g) {
    return combine(f, g, [](cplx p, cplx q) { return p - q; });
  }
  friend GridFunction1D operator*(const GridFunction1D& f, const GridFunction1D& g) {
    return combine(f, g, [](cplx p, cplx q) { return p * q; });
  }
  friend GridFunction1D operator*(cplx s, const GridFunction1D& f) {
    return f.map([s](cplx z) { return s * z; });
  }

 private:
  Grid1D grid_;
  std::vector<cplx> values_;
  std::vector<std::uint8_t> untrusted_;
  std::optional<double> holder_alpha_;
  Source source_;
};

/// Tensor grid over R = [a,b] x [c,d]; axis 1 is x1, axis 2 is x2.
class Grid2D {
 public:
  Grid2D(Grid1D axis1, Grid1D axis2) : ax1_(std::move(axis1)), ax2_(std::move(axis2)) {}

  const Grid1D& axis1() const noexcept { return ax1_; }
  const Grid1D& axis2() const noexcept { return ax2_; }
  const Grid1D& axis(int j) const { return j == 1 ? ax1_ : ax2_; }
  std::size_t size() const noexcept { return ax1_.size() * ax2_.size(); }
  /// Row-major storage: x1 index selects the row.
  std::size_t index(std::size_t k1, std::size_t k2) const noexcept {
    return k1 * ax2_.size() + k2;
  }

  Grid2D with_ghost(std::size_t g1, std::size_t g2) const {
    return Grid2D(ax1_.with_ghost(g1), ax2_.with_ghost(g2));
  }
  bool same_nodes(const Grid2D& o) const noexcept {
    return ax1_.same_nodes(o.ax1_) && ax2_.same_nodes(o.ax2_);
  }
  bool operator==(const Grid2D& o) const noexcept { return ax1_ == o.ax1_ && ax2_ == o.ax2_; }

 private:
  Grid1D ax1_, ax2_;
};

class GridFunction2D {
 public:
  GridFunction2D(Grid2D grid, std::vector<cplx> values, Source source = Source::sampled,
                 std::optional<double> holder_alpha = std::nullopt)
      : grid_(std::move(grid)),
        values_(std::move(values)),
        untrusted_(values_.size(), 0),
        holder_alpha_(holder_alpha),
        source_(source) {
    if (values_.size() != grid_.size()) {
      throw Error(Errc::grid_mismatch, "value count does not match the node product");
    }
  }

  template <class F>
  static GridFunction2D sample(const Grid2D& grid, F&& f, Source source = Source::closed_form) {
    std::vector<cplx> v(grid.size());
    for (std::size_t i = 0; i < grid.axis1().size(); ++i) {
      for (std::size_t j = 0; j < grid.axis2().size(); ++j) {
        v[grid.index(i, j)] = cplx(f(grid.axis1().node(i), grid.axis2().node(j)));
      }
    }
    return GridFunction2D(grid, std::move(v), source);
  }

  const Grid2D& grid() const noexcept { return grid_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  cplx operator()(std::size_t k1, std::size_t k2) const { return values_[grid_.index(k1, k2)]; }
  cplx& operator()(std::size_t k1, std::size_t k2) { return values_[grid_.index(k1, k2)]; }

  bool trusted(std::size_t k1, std::size_t k2) const {
    return untrusted_[grid_.index(k1, k2)] == 0;
  }
  void mark_untrusted(std::size_t k1, std::size_t k2) { untrusted_[grid_.index(k1, k2)] = 1; }

  std::optional<double> holder_alpha() const noexcept { return holder_alpha_; }
  Source source() const noexcept { return source_; }

  GridFunction2D crop(std::size_t g1, std::size_t g2) const {
    const auto& a1 = grid_.axis1();
    const auto& a2 = grid_.axis2();
    if (g1 > a1.ghost() || g2 > a2.ghost()) {
      throw Error(Errc::out_of_domain, "cannot widen a ghost band by cropping");
    }
    const std::size_t o1 = a1.ghost() - g1;
    const std::size_t o2 = a2.ghost() - g2;
    Grid2D g = grid_.with_ghost(g1, g2);
    GridFunction2D out(g, std::vector<cplx>(g.size()), source_, holder_alpha_);
    for (std::size_t i = 0; i < g.axis1().size(); ++i) {
      for (std::size_t j = 0; j < g.axis2().size(); ++j) {
        out.values_[g.index(i, j)] = values_[grid_.index(i + o1, j + o2)];
        out.untrusted_[g.index(i, j)] = untrusted_[grid_.index(i + o1, j + o2)];
      }
    }
    return out;
  }

  /// Sup of |f| over trusted nodes of R.
  double sup_norm() const {
    const auto& a1 = grid_.axis1();
    const auto& a2 = grid_.axis2();
    double s = 0;
    for (std::size_t i = a1.first(); i <= a1.last(); ++i) {
      for (std::size_t j = a2.first(); j <= a2.last(); ++j) {
        if (trusted(i, j)) s = std::max(s, std::abs((*this)(i, j)));
      }
    }
    return s;
  }

  template <class Op>
  GridFunction2D map(Op&& op) const {
    GridFunction2D out = *this;
    for (auto& z : out.values_) z = op(z);
    out.holder_alpha_.reset();
    out.source_ = Source::sampled;
    return out;
  }

  friend GridFunction2D combine(const GridFunction2D& f, const GridFunction2D& g,
                                auto&& op) {
    if (!f.grid().same_nodes(g.grid())) {
      throw Error(Errc::grid_mismatch, "grid functions live on different grids");
    }
    const std::size_t g1 = std::min(f.grid().axis1().ghost(), g.grid().axis1().ghost());
    const std::size_t g2 = std::min(f.grid().axis2().ghost(), g.grid().axis2().ghost());
    GridFunction2D fc = f.crop(g1, g2);
    const GridFunction2D gc = g.crop(g1, g2);
    for (std::size_t k = 0; k < fc.size(); ++k) {
      fc.values_[k] = op(fc.values_[k], gc.values_[k]);
      fc.untrusted_[k] = static_cast<std::uint8_t>(fc.untrusted_[k] | gc.untrusted_[k]);
    }
    fc.holder_alpha_.reset();
    fc.source_ = Source::sampled;
    return fc;
  }

  friend GridFunction2D operator+(const GridFunction2D& f, const GridFunction2D& g) {
    return combine(f, g, [](cplx p, cplx q) { return p + q; });
  }
  friend GridFunction2D operator-(const GridFunction2D& f, const GridFunction2D& g) {
    return combine(f, g, [](cplx p, cplx q) { return p - q; });
  }
  friend GridFunction2D operator*(const GridFunction2D& f, const GridFunction2D& g) {
    return combine(f, g, [](cplx p, cplx q) { return p * q; });
  }
  friend GridFunction2D operator*(cplx s, const GridFunction2D& f) {
    return f.map([s](cplx z) { return s * z; });
  }

 private:
  Grid2D grid_;
  std::vector<cplx> values_;
  std::vector<std::uint8_t> untrusted_;
  std::optional<double> holder_alpha_;
  Source source_;
};

}  // namespace boxcalc
