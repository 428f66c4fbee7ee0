#include "qnd/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qnd/error.hpp"

namespace qnd {

void validate_phase(double phi) {
  if (!std::isfinite(phi) || !(phi > 0.0) || !(phi < std::numbers::pi / 2) ||
      !(std::sin(phi) > kPhaseMargin) || !(std::cos(phi) > kPhaseMargin)) {
    std::ostringstream msg;
    msg << "phase phi=" << phi << " must lie in (0, pi/2) with sin(phi) and cos(phi) above "
        << kPhaseMargin;
    throw Error(ErrorKind::DegeneratePhase, msg.str());
  }
}

void ChainConfig::validate() const {
  validate_phase(phi);
  probe.validate();
}

double ChainConfig::transmittivity() const {
  const double c = std::cos(phi);
  return c * c;
}

double ChainConfig::squeeze_factor() const { return std::cos(phi); }

double ChainConfig::squeeze_parameter() const { return std::log(std::cos(phi)); }

JointWaveFunction::JointWaveFunction(Grid grid1, Grid grid2, std::vector<cplx> amplitudes)
    : grid1_(grid1), grid2_(grid2), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != grid1_.size() * grid2_.size()) {
    throw Error(ErrorKind::GridMismatch, "joint amplitude count does not match grid1 x grid2");
  }
}

double JointWaveFunction::norm() const {
  double total = 0.0;
  for (std::size_t i = 0; i < grid1_.size(); ++i) {
    const double wi = trapezoid_weight(grid1_, i);
    double row = 0.0;
    for (std::size_t j = 0; j < grid2_.size(); ++j) {
      row += trapezoid_weight(grid2_, j) * std::norm((*this)(i, j));
    }
    total += wi * row;
  }
  return std::sqrt(total);
}

Distribution JointWaveFunction::marginal_mode1() const {
  std::vector<double> p(grid1_.size(), 0.0);
  for (std::size_t i = 0; i < grid1_.size(); ++i) {
    for (std::size_t j = 0; j < grid2_.size(); ++j) {
      p[i] += trapezoid_weight(grid2_, j) * std::norm((*this)(i, j));
    }
  }
  return Distribution::from_density(grid1_, std::move(p));
}

Distribution JointWaveFunction::marginal_mode2() const {
  std::vector<double> p(grid2_.size(), 0.0);
  for (std::size_t i = 0; i < grid1_.size(); ++i) {
    const double wi = trapezoid_weight(grid1_, i);
    for (std::size_t j = 0; j < grid2_.size(); ++j) p[j] += wi * std::norm((*this)(i, j));
  }
  return Distribution::from_density(grid2_, std::move(p));
}

WaveFunction JointWaveFunction::project_mode2(double X) const {
  const std::size_t n2 = grid2_.size();
  std::vector<cplx> slice(grid1_.size());
  for (std::size_t i = 0; i < grid1_.size(); ++i) {
    slice[i] = interpolate(grid2_, std::span<const cplx>(amplitudes_.data() + i * n2, n2), X);
  }
  return WaveFunction::from_amplitudes(grid1_, std::move(slice));
}

Outcome make_outcome(double x0, double phi, double density_at_x0) {
  return Outcome{x0, -x0 * std::sin(phi), density_at_x0};
}

namespace {

double reach(const Grid& g) { return std::max(std::abs(g.x_min()), std::abs(g.x_max())); }

void require_null_free(double p, double x0) {
  if (!(p > kNullOutcomeThreshold)) {
    std::ostringstream msg;
    msg << "outcome x0=" << x0 << " has density " << p << " below " << kNullOutcomeThreshold;
    throw Error(ErrorKind::NullOutcome, msg.str());
  }
}

double probe_filter_width(const WaveFunction& probe, double phi) {
  return std::sqrt(density(probe).variance()) / std::tan(phi);
}

// Samples f(x) on `target` and wraps it as a WaveFunction, translating a
// vanishing result into an error naming the stage.
template <typename F>
WaveFunction sample_on(const Grid& target, F&& f, const char* stage) {
  std::vector<cplx> amps(target.size());
  bool any = false;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    amps[k] = f(target[k]);
    any = any || amps[k] != cplx{};
  }
  if (!any) {
    throw Error(ErrorKind::GridTooNarrow, std::string(stage) + ": state vanishes on the target grid");
  }
  return WaveFunction::from_amplitudes(target, std::move(amps));
}

}  // namespace

JointWaveFunction beam_splitter_transform(const WaveFunction& signal, const WaveFunction& probe,
                                          double phi, std::optional<Grid> output_grid,
                                          std::size_t n_points) {
  validate_phase(phi);
  const Grid grid = output_grid ? *output_grid
                                : Grid::centered(0.0, std::hypot(reach(signal.grid()), reach(probe.grid())),
                                                 n_points);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const std::size_t n = grid.size();
  std::vector<cplx> amps(n * n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y1 = grid[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double y2 = grid[j];
      const cplx v = signal.at(y1 * c - y2 * s) * probe.at(y1 * s + y2 * c);
      amps[i * n + j] = v;
      peak = std::max(peak, std::abs(v));
    }
  }
  double edge = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    edge = std::max({edge, std::abs(amps[k]), std::abs(amps[(n - 1) * n + k]), std::abs(amps[k * n]),
                     std::abs(amps[k * n + n - 1])});
  }
  if (!(peak > 0.0) || edge >= kEdgeDecay * peak) {
    throw Error(ErrorKind::GridTooNarrow, "rotated two-mode support leaks past the output grid");
  }
  return JointWaveFunction(grid, grid, std::move(amps));
}

Grid default_outcome_grid(const WaveFunction& signal, const WaveFunction& probe, double phi,
                          std::size_t n_points, double span_sigmas) {
  validate_phase(phi);
  const auto ps = density(signal);
  const auto pp = density(probe);
  const double t = std::tan(phi);
  const double mean = ps.mean() - pp.mean() / t;
  const double var = ps.variance() + pp.variance() / (t * t);
  return Grid::centered(mean, span_sigmas * std::sqrt(var), n_points);
}

double outcome_density(const WaveFunction& signal, const WaveFunction& probe, double phi, double x0) {
  validate_phase(phi);
  const double t = std::tan(phi);
  const Grid& gs = signal.grid();
  const Grid& gp = probe.grid();
  // Integrate over whichever lattice is finer in signal coordinates.
  if (gs.step() <= gp.step() / t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < gs.size(); ++k) {
      sum += trapezoid_weight(gs, k) * std::norm(signal[k]) * std::norm(probe.at(t * (gs[k] - x0)));
    }
    return t * sum;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < gp.size(); ++k) {
    sum += trapezoid_weight(gp, k) * std::norm(probe[k]) * std::norm(signal.at(x0 + gp[k] / t));
  }
  return sum;
}

Distribution homodyne_distribution(const WaveFunction& signal, const WaveFunction& probe, double phi,
                                   std::optional<Grid> outcome_grid) {
  validate_phase(phi);
  const Grid grid = outcome_grid ? *outcome_grid : default_outcome_grid(signal, probe, phi);
  std::vector<double> p(grid.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = outcome_density(signal, probe, phi, grid[k]);
  const double mass = trapezoid(grid, p);
  if (std::abs(mass - 1.0) > 1e-4) {
    std::ostringstream msg;
    msg << "outcome grid [" << grid.x_min() << ", " << grid.x_max() << "] captures mass " << mass
        << " of p(x0)";
    throw Error(ErrorKind::GridTooNarrow, msg.str());
  }
  return Distribution::from_density(grid, std::move(p));
}

WaveFunction conditional_state_raw(const WaveFunction& signal, const WaveFunction& probe, double phi,
                                   double x0, std::optional<Grid> grid) {
  validate_phase(phi);
  require_null_free(outcome_density(signal, probe, phi, x0), x0);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const Grid target = grid ? *grid : signal.grid().affine(1.0 / c, -feedback_displacement(x0, phi));
  return sample_on(
      target, [&](double y) { return signal.at(y * c + x0 * s * s) * probe.at(y * s - x0 * c * s); },
      "conditional_state_raw");
}

double feedback_displacement(double x0, double phi) { return x0 * std::sin(phi) * std::tan(phi); }

WaveFunction feedback_displace(const WaveFunction& state, double x0, double phi, std::optional<Grid> target) {
  validate_phase(phi);
  const double d = feedback_displacement(x0, phi);
  const Grid out = target ? *target : state.grid().affine(1.0, d);
  return sample_on(out, [&](double y) { return state.at(y - d); }, "feedback_displace");
}

WaveFunction output_squeeze(const WaveFunction& state, double phi, std::optional<Grid> target) {
  validate_phase(phi);
  const double c = std::cos(phi);
  const Grid out = target ? *target : state.grid().affine(c, 0.0);
  const double scale = 1.0 / std::sqrt(c);
  return sample_on(out, [&](double y) { return scale * state.at(y / c); }, "output_squeeze");
}

WaveFunction conditional_output(const WaveFunction& signal, const WaveFunction& probe, double phi, double x0) {
  validate_phase(phi);
  require_null_free(outcome_density(signal, probe, phi, x0), x0);
  const double t = std::tan(phi);
  const Grid& g = signal.grid();
  std::vector<cplx> amps(g.size());
  bool any = false;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    amps[k] = signal[k] * probe.at((g[k] - x0) * t);
    any = any || amps[k] != cplx{};
  }
  if (!any) {
    std::ostringstream msg;
    msg << "signal grid (step " << g.step() << ") cannot resolve the conditional state of filter width "
        << probe_filter_width(probe, phi);
    throw Error(ErrorKind::GridTooNarrow, msg.str());
  }
  return WaveFunction::from_amplitudes(g, std::move(amps));
}

WaveFunction run_pipeline(const WaveFunction& signal, const WaveFunction& probe, double phi, double x0) {
  const auto raw = conditional_state_raw(signal, probe, phi, x0);
  const auto displaced = feedback_displace(raw, x0, phi);
  return output_squeeze(displaced, phi, signal.grid());
}

std::vector<double> sample_outcomes(const Distribution& dist, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(ErrorKind::ZeroCount, "sample count must be positive");
  const auto cdf = dist.cumulative();
  const Grid& g = dist.grid();
  std::mt19937_64 engine(seed);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    const double target = u * cdf.back();
    // First node whose cumulative exceeds the target; the draw lies in the
    // preceding cell.
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    std::size_t hi = static_cast<std::size_t>(it - cdf.begin());
    hi = std::clamp<std::size_t>(hi, 1, cdf.size() - 1);
    const std::size_t lo = hi - 1;
    const double span = cdf[hi] - cdf[lo];
    const double frac = span > 0.0 ? (target - cdf[lo]) / span : 0.0;
    out.push_back(g[lo] + frac * g.step());
  }
  return out;
}

}  // namespace qnd
