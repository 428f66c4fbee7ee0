#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qnd/grid.hpp"

namespace qnd {

/// Vacuum quadrature variance for x = (a^dag + a) / 2.
inline constexpr double kVacuumVariance = 0.25;

/// Default lattice resolution for states and outcome densities.
inline constexpr std::size_t kDefaultGridPoints = 2048;

/// Default half-width of an automatically sized grid, in standard deviations.
inline constexpr double kDefaultSpanSigmas = 10.0;

/// Relative edge amplitude above which a state is considered to leak off its grid.
inline constexpr double kEdgeDecay = 1e-6;

/// Gaussian quadrature statistics: mean and variance of |psi(x)|^2.
struct GaussianSpec {
  double mean = 0.0;
  double variance = kVacuumVariance;

  double stddev() const;
  /// Throws NonpositiveVariance unless variance > 0 and finite.
  void validate() const;
};

/// Unit-norm complex amplitudes sampled on a Grid.
class WaveFunction {
 public:
  /// Normalizes `amplitudes` and checks that the support has decayed at the
  /// grid edges (GridTooNarrow otherwise).
  static WaveFunction from_amplitudes(Grid grid, std::vector<cplx> amplitudes);

  const Grid& grid() const { return grid_; }
  std::span<const cplx> amplitudes() const { return amplitudes_; }
  std::size_t size() const { return amplitudes_.size(); }
  cplx operator[](std::size_t k) const { return amplitudes_[k]; }

  /// Cubic interpolation of the amplitude; zero off the grid.
  cplx at(double x) const { return interpolate(grid_, std::span<const cplx>(amplitudes_), x); }

  double norm() const;

 private:
  WaveFunction(Grid grid, std::vector<cplx> amplitudes)
      : grid_(grid), amplitudes_(std::move(amplitudes)) {}

  Grid grid_;
  std::vector<cplx> amplitudes_;
};

/// Nonnegative density on a Grid with unit trapezoidal integral.
class Distribution {
 public:
  /// Normalizes `density`. Entries below -1e-14 * max are rejected; smaller
  /// negative round-off is clipped to zero.
  static Distribution from_density(Grid grid, std::vector<double> density);

  const Grid& grid() const { return grid_; }
  std::span<const double> density() const { return density_; }
  std::size_t size() const { return density_.size(); }
  double operator[](std::size_t k) const { return density_[k]; }
  double at(double x) const { return interpolate(grid_, std::span<const double>(density_), x); }

  double integral() const;
  double mean() const;
  double variance() const;

  /// Trapezoidal cumulative: cdf[0] = 0, cdf[k] = integral up to node k.
  std::vector<double> cumulative() const;

 private:
  Distribution(Grid grid, std::vector<double> density)
      : grid_(grid), density_(std::move(density)) {}

  Grid grid_;
  std::vector<double> density_;
};

/// Grid holding mean +/- kDefaultSpanSigmas standard deviations.
Grid default_grid(const GaussianSpec& spec, std::size_t n_points = kDefaultGridPoints);

/// (2 pi v)^{-1/4} exp(-(x-m)^2 / (4 v)), renormalized on the grid.
/// The grid must cover mean +/- 8 standard deviations.
WaveFunction build_gaussian(const GaussianSpec& spec, const Grid& grid);

/// Even superposition of Gaussians centered at +/- separation.
WaveFunction build_cat(double separation, double component_variance, const Grid& grid);

/// Grid holding both cat components with kDefaultSpanSigmas of margin.
Grid default_cat_grid(double separation, double component_variance,
                      std::size_t n_points = kDefaultGridPoints);

/// Trapezoidal <a|b>. Grids must match.
cplx overlap(const WaveFunction& a, const WaveFunction& b);

Distribution density(const WaveFunction& psi);

/// L2 distance between two states on matching grids.
double l2_distance(const WaveFunction& a, const WaveFunction& b);

/// Mean photon number of the squeezed probes in the reciprocal form
/// (s + 1/s - 2) / 4. Note the variance convention: it vanishes at s = 1,
/// not at the vacuum variance 1/4 used everywhere else in this library.
double photon_number_reciprocal(double sigma2);

/// Mean photon number of a squeezed vacuum whose quadrature variance is
/// `variance` under x = (a^dag + a)/2; zero at variance 1/4.
double photon_number_squeezed_vacuum(double variance);

}  // namespace qnd
