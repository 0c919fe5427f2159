#pragma once
// Midpoint-rule sampling and Haar-measure quadrature on boxes in H^1.
//
// A grid covers [-Lx,Lx]^2 x [-Lt,Lt] (optionally shifted by a Euclidean offset)
// with n cells per axis, n = ceil(2L/h). When 2L/h is not an integer the box
// grows symmetrically to n*h. Cells are indexed (k1, k2, k3) with t fastest.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hha/error.hpp"
#include "hha/group.hpp"

namespace hha {

struct GridSpec {
  double Lx = 4.0;
  double Lt = 4.0;
  double hx = 1.0 / 16;
  double ht = 1.0 / 16;
  /// Euclidean offset of the box center (x1, x2, t). Zero for the usual centered box.
  Point1 offset{};

  bool operator==(const GridSpec&) const = default;

  void validate() const {
    if (!(Lx > 0 && Lt > 0 && hx > 0 && ht > 0) || !std::isfinite(Lx) || !std::isfinite(Lt))
      throw DomainError("grid extents and spacings must be positive and finite");
    if (hx > Lx || ht > Lt) throw DomainError("grid spacing larger than half-width");
    if (!offset.finite()) throw DomainError("grid offset must be finite");
  }

  /// The grid spec whose cells are the images of these cells under dilate(r, .).
  GridSpec dilated(double r) const {
    if (!(r > 0.0)) throw DomainError("dilation factor must be positive");
    GridSpec s = *this;
    s.Lx *= r;
    s.hx *= r;
    s.Lt *= r * r;
    s.ht *= r * r;
    s.offset = dilate(r, offset);
    return s;
  }

  GridSpec recentered(const Point1& center) const {
    GridSpec s = *this;
    s.offset = center;
    return s;
  }
};

namespace detail {

inline int cells_for(double half_width, double h) {
  return static_cast<int>(std::ceil(2.0 * half_width / h - 1e-9));
}

}  // namespace detail

class Grid {
 public:
  Grid() : Grid(GridSpec{1.0, 1.0, 0.5, 0.5}) {}

  explicit Grid(const GridSpec& spec) : spec_(spec) {
    spec.validate();
    nx_ = detail::cells_for(spec.Lx, spec.hx);
    nt_ = detail::cells_for(spec.Lt, spec.ht);
    const double ex = 0.5 * nx_ * spec.hx, et = 0.5 * nt_ * spec.ht;
    lo_ = {spec.offset.x[0] - ex, spec.offset.x[1] - ex, spec.offset.t - et};
    for (int a = 0; a < 2; ++a) {
      axis_[a].resize(static_cast<std::size_t>(nx_));
      for (int k = 0; k < nx_; ++k) axis_[a][k] = lo_[a] + (k + 0.5) * spec.hx;
    }
    axis_[2].resize(static_cast<std::size_t>(nt_));
    for (int k = 0; k < nt_; ++k) axis_[2][k] = lo_[2] + (k + 0.5) * spec.ht;
  }

  const GridSpec& spec() const { return spec_; }
  int nx() const { return nx_; }
  int nt() const { return nt_; }
  std::array<int, 3> shape() const { return {nx_, nx_, nt_}; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * nx_ * nt_; }
  double cell_volume() const { return spec_.hx * spec_.hx * spec_.ht; }
  double box_volume() const { return static_cast<double>(size()) * cell_volume(); }

  /// Cell-center coordinates along axis a (0, 1: x-axes; 2: t-axis).
  const std::vector<double>& axis(int a) const { return axis_[a]; }
  double lower(int a) const { return lo_[a]; }
  double upper(int a) const { return lo_[a] + (a < 2 ? nx_ * spec_.hx : nt_ * spec_.ht); }

  std::size_t index(int k1, int k2, int k3) const {
    return (static_cast<std::size_t>(k1) * nx_ + k2) * nt_ + k3;
  }

  std::array<int, 3> unravel(std::size_t idx) const {
    const int k3 = static_cast<int>(idx % nt_);
    idx /= nt_;
    return {static_cast<int>(idx / nx_), static_cast<int>(idx % nx_), k3};
  }

  Point1 center(int k1, int k2, int k3) const { return make_point1(axis_[0][k1], axis_[1][k2], axis_[2][k3]); }
  Point1 center(std::size_t idx) const {
    const auto k = unravel(idx);
    return center(k[0], k[1], k[2]);
  }

  /// The cell whose half-open box [lo, lo+h) contains z, if any.
  std::optional<std::array<int, 3>> locate(const Point1& z) const {
    std::array<int, 3> k{};
    for (int a = 0; a < 3; ++a) {
      const double h = a < 2 ? spec_.hx : spec_.ht;
      const int n = a < 2 ? nx_ : nt_;
      const double f = std::floor((z.coord(a) - lo_[a]) / h);
      if (!(f >= 0.0 && f < n)) return std::nullopt;
      k[a] = static_cast<int>(f);
    }
    return k;
  }

  /// True when the Euclidean box [lo, hi] lies inside the grid with `margin_cells`
  /// cells to spare on every side.
  bool contains_box(const std::array<double, 3>& lo, const std::array<double, 3>& hi, int margin_cells = 1) const {
    for (int a = 0; a < 3; ++a) {
      const double m = margin_cells * (a < 2 ? spec_.hx : spec_.ht);
      if (lo[a] < lower(a) + m - 1e-12 || hi[a] > upper(a) - m + 1e-12) return false;
    }
    return true;
  }

  bool operator==(const Grid& o) const { return spec_ == o.spec_; }

 private:
  GridSpec spec_;
  int nx_ = 0, nt_ = 0;
  std::array<double, 3> lo_{};
  std::array<std::vector<double>, 3> axis_;
};

inline Grid build_grid(const GridSpec& spec) { return Grid(spec); }

/// Euclidean bounding box of B(c, r): |x - c_x| < r and |t - c_t| < r^2/4 + |c_x| r / 2.
inline std::pair<std::array<double, 3>, std::array<double, 3>> ball_bounding_box(const Ball1& b) {
  const double r = b.radius;
  const double cx = std::hypot(b.center.x[0], b.center.x[1]);
  const double dt = 0.25 * r * r + 0.5 * cx * r;
  return {{b.center.x[0] - r, b.center.x[1] - r, b.center.t - dt},
          {b.center.x[0] + r, b.center.x[1] + r, b.center.t + dt}};
}

inline bool grid_holds_ball(const Grid& g, const Ball1& b, int margin_cells = 1) {
  const auto [lo, hi] = ball_bounding_box(b);
  return g.contains_box(lo, hi, margin_cells);
}

class Field {
 public:
  Field() = default;

  Field(Grid grid, std::vector<double> values, std::optional<Ball1> support_hint = std::nullopt)
      : grid_(std::move(grid)), values_(std::move(values)), hint_(support_hint) {
    if (values_.size() != grid_.size())
      throw DimensionError("field has " + std::to_string(values_.size()) + " values, grid has " +
                           std::to_string(grid_.size()) + " cells");
    for (double v : values_)
      if (!std::isfinite(v)) throw NumericError("field value is not finite");
    if (hint_ && !grid_holds_ball(grid_, *hint_))
      throw DomainError("grid box does not contain the declared support with a one-cell margin");
  }

  static Field zeros(const Grid& g) { return Field(g, std::vector<double>(g.size(), 0.0)); }

  const Grid& grid() const { return grid_; }
  const GridSpec& spec() const { return grid_.spec(); }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double at(int k1, int k2, int k3) const { return values_[grid_.index(k1, k2, k3)]; }
  const std::optional<Ball1>& support_hint() const { return hint_; }

  Field with_hint(std::optional<Ball1> hint) const { return Field(grid_, values_, hint); }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }

  /// Same values relabeled on the dilated grid r.G, multiplied by `scale`.
  Field dilated(double r, double scale = 1.0) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= scale;
    std::optional<Ball1> hint;
    if (hint_) hint = Ball1(dilate(r, hint_->center), hint_->radius * r);
    return Field(Grid(grid_.spec().dilated(r)), std::move(v), hint);
  }

  /// Same values on the grid moved by the central element c = (0, 0, t0), i.e.
  /// u -> f(c^-1 u) (left translation by c is the Euclidean shift in t).
  Field shifted_center(const Point1& c) const {
    if (c.x[0] != 0.0 || c.x[1] != 0.0) throw DomainError("shifted_center needs a central element (x = 0)");
    GridSpec s = grid_.spec();
    s.offset.t += c.t;
    std::optional<Ball1> hint;
    if (hint_) hint = Ball1(group_mul(c, hint_->center), hint_->radius);
    return Field(Grid(s), values_, hint);
  }

  /// Pointwise map; the result keeps the grid and support hint.
  template <class F>
  Field map(F&& f) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(values_[i]);
    return Field(grid_, std::move(v), hint_);
  }

 private:
  Grid grid_;
  std::vector<double> values_;
  std::optional<Ball1> hint_;
};

/// values[k] = f(center(k)).
template <class F>
Field sample(F&& f, const Grid& grid, std::optional<Ball1> support_hint = std::nullopt) {
  std::vector<double> v(grid.size());
  std::size_t i = 0;
  for (int a = 0; a < grid.nx(); ++a)
    for (int b = 0; b < grid.nx(); ++b)
      for (int c = 0; c < grid.nt(); ++c, ++i) {
        v[i] = f(grid.center(a, b, c));
        if (!std::isfinite(v[i])) throw NumericError("non-finite sample at cell " + std::to_string(i));
      }
  return Field(grid, std::move(v), support_hint);
}

inline Field indicator(const Ball1& b, const Grid& grid) {
  return sample([&b](const Point1& z) { return ball_contains(b, z) ? 1.0 : 0.0; }, grid, b);
}

/// Cells whose centers lie in the ball (the discrete ball).
inline std::vector<std::size_t> ball_cells(const Ball1& b, const Grid& grid) {
  std::vector<std::size_t> out;
  const auto [lo, hi] = ball_bounding_box(b);
  const auto first = [&](int a) {
    const double h = a < 2 ? grid.spec().hx : grid.spec().ht;
    return std::max(0, static_cast<int>(std::floor((lo[a] - grid.lower(a)) / h)) - 1);
  };
  const auto last = [&](int a) {
    const double h = a < 2 ? grid.spec().hx : grid.spec().ht;
    const int n = a < 2 ? grid.nx() : grid.nt();
    return std::min(n - 1, static_cast<int>(std::ceil((hi[a] - grid.lower(a)) / h)) + 1);
  };
  for (int a = first(0); a <= last(0); ++a)
    for (int c = first(1); c <= last(1); ++c)
      for (int d = first(2); d <= last(2); ++d)
        if (ball_contains(b, grid.center(a, c, d))) out.push_back(grid.index(a, c, d));
  return out;
}

inline double discrete_ball_measure(const Ball1& b, const Grid& grid) {
  return static_cast<double>(ball_cells(b, grid).size()) * grid.cell_volume();
}

namespace detail {

/// Sum in index order; Neumaier-compensated when the range is long.
template <class It>
double ordered_sum(It first, It last) {
  const auto n = static_cast<std::size_t>(std::distance(first, last));
  if (n <= 1000000) {
    double s = 0.0;
    for (; first != last; ++first) s += *first;
    return s;
  }
  double s = 0.0, c = 0.0;
  for (; first != last; ++first) {
    const double v = *first;
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  return s + c;
}

}  // namespace detail

/// Midpoint rule: sum(values) * hx^2 * ht.
inline double integrate(const Field& f) {
  return detail::ordered_sum(f.values().begin(), f.values().end()) * f.grid().cell_volume();
}

inline void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw DimensionError("fields live on different grids");
}

/// a*f + b*g on a shared grid.
inline Field combine(double a, const Field& f, double b, const Field& g) {
  require_same_grid(f, g);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * f[i] + b * g[i];
  return Field(f.grid(), std::move(v));
}

inline Field product(const Field& f, const Field& g) {
  require_same_grid(f, g);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[i] * g[i];
  return Field(f.grid(), std::move(v));
}

}  // namespace hha
