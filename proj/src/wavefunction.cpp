#include "qnd/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qnd/error.hpp"

namespace qnd {

double GaussianSpec::stddev() const { return std::sqrt(variance); }

void GaussianSpec::validate() const {
  if (!std::isfinite(mean)) throw Error(ErrorKind::InvalidArgument, "gaussian mean must be finite");
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    std::ostringstream msg;
    msg << "variance must be positive (got " << variance << ")";
    throw Error(ErrorKind::NonpositiveVariance, msg.str());
  }
}

WaveFunction WaveFunction::from_amplitudes(Grid grid, std::vector<cplx> amplitudes) {
  if (amplitudes.size() != grid.size()) {
    throw Error(ErrorKind::GridMismatch, "amplitude count does not match grid size");
  }
  std::vector<double> mod2(amplitudes.size());
  double peak = 0.0;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    if (!std::isfinite(amplitudes[k].real()) || !std::isfinite(amplitudes[k].imag())) {
      throw Error(ErrorKind::InvalidArgument, "non-finite amplitude");
    }
    mod2[k] = std::norm(amplitudes[k]);
    peak = std::max(peak, std::abs(amplitudes[k]));
  }
  const double norm2 = trapezoid(grid, mod2);
  if (!(norm2 > 0.0) || peak == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "cannot normalize a zero wavefunction");
  }
  const double edge = std::max(std::abs(amplitudes.front()), std::abs(amplitudes.back()));
  if (edge >= kEdgeDecay * peak) {
    std::ostringstream msg;
    msg << "support does not fit grid [" << grid.x_min() << ", " << grid.x_max()
        << "]: edge amplitude ratio " << edge / peak;
    throw Error(ErrorKind::GridTooNarrow, msg.str());
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& a : amplitudes) a *= scale;
  return WaveFunction(grid, std::move(amplitudes));
}

double WaveFunction::norm() const {
  std::vector<double> mod2(amplitudes_.size());
  std::transform(amplitudes_.begin(), amplitudes_.end(), mod2.begin(),
                 [](cplx a) { return std::norm(a); });
  return std::sqrt(trapezoid(grid_, mod2));
}

Distribution Distribution::from_density(Grid grid, std::vector<double> density) {
  if (density.size() != grid.size()) {
    throw Error(ErrorKind::GridMismatch, "density sample count does not match grid size");
  }
  const double peak = *std::max_element(density.begin(), density.end());
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw Error(ErrorKind::InvalidArgument, "density must have positive finite mass");
  }
  for (auto& p : density) {
    if (!std::isfinite(p)) throw Error(ErrorKind::InvalidArgument, "non-finite density value");
    if (p < 0.0) {
      if (p < -1e-14 * peak) throw Error(ErrorKind::InvalidArgument, "negative density value");
      p = 0.0;
    }
  }
  const double mass = trapezoid(grid, density);
  for (auto& p : density) p /= mass;
  return Distribution(grid, std::move(density));
}

double Distribution::integral() const { return trapezoid(grid_, density_); }

double Distribution::mean() const {
  std::vector<double> f(density_.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = grid_[k] * density_[k];
  return trapezoid(grid_, f) / integral();
}

double Distribution::variance() const {
  const double m = mean();
  std::vector<double> f(density_.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double d = grid_[k] - m;
    f[k] = d * d * density_[k];
  }
  return trapezoid(grid_, f) / integral();
}

std::vector<double> Distribution::cumulative() const {
  std::vector<double> cdf(density_.size(), 0.0);
  const double h = grid_.step();
  for (std::size_t k = 1; k < cdf.size(); ++k) {
    cdf[k] = cdf[k - 1] + 0.5 * h * (density_[k - 1] + density_[k]);
  }
  return cdf;
}

Grid default_grid(const GaussianSpec& spec, std::size_t n_points) {
  spec.validate();
  return Grid::centered(spec.mean, kDefaultSpanSigmas * spec.stddev(), n_points);
}

namespace {

void require_cover(const Grid& grid, double lo, double hi) {
  if (grid.x_min() > lo || grid.x_max() < hi) {
    std::ostringstream msg;
    msg << "grid [" << grid.x_min() << ", " << grid.x_max() << "] does not cover required support ["
        << lo << ", " << hi << "]";
    throw Error(ErrorKind::GridTooNarrow, msg.str());
  }
}

double gaussian_amplitude(double x, double mean, double variance) {
  const double d = x - mean;
  return std::pow(2.0 * std::numbers::pi * variance, -0.25) * std::exp(-d * d / (4.0 * variance));
}

}  // namespace

WaveFunction build_gaussian(const GaussianSpec& spec, const Grid& grid) {
  spec.validate();
  const double reach = 8.0 * spec.stddev();
  require_cover(grid, spec.mean - reach, spec.mean + reach);
  std::vector<cplx> amps(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    amps[k] = gaussian_amplitude(grid[k], spec.mean, spec.variance);
  }
  return WaveFunction::from_amplitudes(grid, std::move(amps));
}

WaveFunction build_cat(double separation, double component_variance, const Grid& grid) {
  GaussianSpec{0.0, component_variance}.validate();
  if (!std::isfinite(separation)) throw Error(ErrorKind::InvalidArgument, "cat separation must be finite");
  const double reach = std::abs(separation) + 8.0 * std::sqrt(component_variance);
  require_cover(grid, -reach, reach);
  std::vector<cplx> amps(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    amps[k] = gaussian_amplitude(grid[k], separation, component_variance) +
              gaussian_amplitude(grid[k], -separation, component_variance);
  }
  return WaveFunction::from_amplitudes(grid, std::move(amps));
}

Grid default_cat_grid(double separation, double component_variance, std::size_t n_points) {
  GaussianSpec{0.0, component_variance}.validate();
  return Grid::centered(0.0, std::abs(separation) + kDefaultSpanSigmas * std::sqrt(component_variance),
                        n_points);
}

cplx overlap(const WaveFunction& a, const WaveFunction& b) {
  if (!a.grid().matches(b.grid())) throw Error(ErrorKind::GridMismatch, "overlap requires identical grids");
  std::vector<cplx> f(a.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::conj(a[k]) * b[k];
  return trapezoid(a.grid(), f);
}

Distribution density(const WaveFunction& psi) {
  std::vector<double> p(psi.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(psi[k]);
  return Distribution::from_density(psi.grid(), std::move(p));
}

double l2_distance(const WaveFunction& a, const WaveFunction& b) {
  if (!a.grid().matches(b.grid())) throw Error(ErrorKind::GridMismatch, "l2_distance requires identical grids");
  std::vector<double> f(a.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::norm(a[k] - b[k]);
  return std::sqrt(trapezoid(a.grid(), f));
}

double photon_number_reciprocal(double sigma2) {
  GaussianSpec{0.0, sigma2}.validate();
  return (sigma2 + 1.0 / sigma2 - 2.0) / 4.0;
}

double photon_number_squeezed_vacuum(double variance) {
  GaussianSpec{0.0, variance}.validate();
  const double s = 4.0 * variance;
  return (s + 1.0 / s - 2.0) / 4.0;
}

}  // namespace qnd
