#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qnd {

using cplx = std::complex<double>;

/// Uniform 1-D lattice over the quadrature axis: x_k = x_min + k * step.
class Grid {
 public:
  static constexpr std::size_t kMinPoints = 16;

  Grid(double x_min, double x_max, std::size_t n_points);

  /// Grid of `n_points` nodes spanning center +/- half_width.
  static Grid centered(double center, double half_width, std::size_t n_points);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double step() const { return step_; }
  double operator[](std::size_t k) const {
    return k + 1 == n_ ? x_max_ : x_min_ + static_cast<double>(k) * step_;
  }
  std::vector<double> points() const;

  bool contains(double x) const { return x >= x_min_ && x <= x_max_; }

  /// Same node positions up to a relative tolerance on the step size.
  bool matches(const Grid& other, double rel_tol = 1e-9) const;

  /// Grid mapped through x -> scale * x + shift (scale > 0).
  Grid affine(double scale, double shift) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double step_;
};

/// Trapezoidal weights for the grid (step/2 at the ends, step inside).
double trapezoid_weight(const Grid& grid, std::size_t k);

double trapezoid(const Grid& grid, std::span<const double> values);
cplx trapezoid(const Grid& grid, std::span<const cplx> values);

/// Four-point Lagrange (cubic) interpolation of samples on `grid`.
/// Points outside the grid evaluate to zero: every sampled field is
/// required to have decayed at the grid edges.
double interpolate(const Grid& grid, std::span<const double> values, double x);
cplx interpolate(const Grid& grid, std::span<const cplx> values, double x);

}  // namespace qnd
