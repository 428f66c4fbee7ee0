#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qnd/state_spec.hpp"
#include "qnd/wavefunction.hpp"

namespace qnd {

/// Both port couplings sin(phi) and cos(phi) must exceed this.
inline constexpr double kPhaseMargin = 1e-6;

/// Conditioning is refused below this outcome density.
inline constexpr double kNullOutcomeThreshold = 1e-12;

/// Throws DegeneratePhase unless phi lies in (0, pi/2) with kPhaseMargin.
void validate_phase(double phi);

struct ChainConfig {
  double phi = 0.7853981633974483;
  GaussianSpec probe{};
  GridPolicy grid{};
  std::uint64_t seed = 0;

  void validate() const;
  /// tau = cos^2(phi).
  double transmittivity() const;
  /// e^{r*} = cos(phi): the output squeezer rescales the quadrature axis by cos(phi).
  double squeeze_factor() const;
  double squeeze_parameter() const;
};

/// Two-mode amplitudes Psi(y1, y2) on grid1 x grid2, stored row-major
/// (index i * n2 + j for y1 = grid1[i], y2 = grid2[j]).
class JointWaveFunction {
 public:
  JointWaveFunction(Grid grid1, Grid grid2, std::vector<cplx> amplitudes);

  const Grid& grid1() const { return grid1_; }
  const Grid& grid2() const { return grid2_; }
  cplx operator()(std::size_t i, std::size_t j) const { return amplitudes_[i * grid2_.size() + j]; }

  /// Two-dimensional trapezoidal norm (not renormalized by construction).
  double norm() const;

  Distribution marginal_mode1() const;
  Distribution marginal_mode2() const;

  /// Mode-1 state left by the sharp projection of mode 2 onto |X>, using
  /// cubic interpolation along y2. Renormalized.
  WaveFunction project_mode2(double X) const;

 private:
  Grid grid1_;
  Grid grid2_;
  std::vector<cplx> amplitudes_;
};

/// Homodyne record: inferred signal quadrature x0 and the raw reading X = -x0 sin(phi).
struct Outcome {
  double x0 = 0.0;
  double raw_X = 0.0;
  double density_at_x0 = 0.0;
};

Outcome make_outcome(double x0, double phi, double density_at_x0);

/// Interferometer output Psi(y1,y2) = psi_s(y1 c - y2 s) psi_p(y1 s + y2 c),
/// c = cos(phi), s = sin(phi). Both output modes use `output_grid`; by
/// default a symmetric grid of `n_points` nodes large enough for any
/// rotation of the input supports.
JointWaveFunction beam_splitter_transform(const WaveFunction& signal, const WaveFunction& probe,
                                          double phi, std::optional<Grid> output_grid = {},
                                          std::size_t n_points = 512);

/// Outcome grid centered on the mean of p(x0), spanning `span_sigmas`
/// standard deviations of sigma_s^2 + sigma_p^2 / tan^2(phi).
Grid default_outcome_grid(const WaveFunction& signal, const WaveFunction& probe, double phi,
                          std::size_t n_points = kDefaultGridPoints,
                          double span_sigmas = kDefaultSpanSigmas);

/// p(x0) = tan(phi) * integral |psi_s(y)|^2 |psi_p(tan(phi)(y - x0))|^2 dy at a single x0.
double outcome_density(const WaveFunction& signal, const WaveFunction& probe, double phi, double x0);

/// p(x0) tabulated on `outcome_grid` (default_outcome_grid if absent).
/// Throws GridTooNarrow if the grid truncates more than 1e-4 of the mass.
Distribution homodyne_distribution(const WaveFunction& signal, const WaveFunction& probe, double phi,
                                   std::optional<Grid> outcome_grid = {});

/// Mode-1 state right after homodyne detection:
/// psi_s(y c + x0 s^2) psi_p(y s - x0 c s), renormalized. Defaults to the
/// signal grid mapped through y -> y / c - x0 s tan(phi), which the
/// displacement and output squeezing carry back onto the signal grid.
WaveFunction conditional_state_raw(const WaveFunction& signal, const WaveFunction& probe, double phi,
                                   double x0, std::optional<Grid> grid = {});

/// Feedback amplitude x0 sin(phi) tan(phi).
double feedback_displacement(double x0, double phi);

/// Shift psi(y) -> psi(y - d), d = feedback_displacement(x0, phi). The
/// default target is the input grid shifted by d.
WaveFunction feedback_displace(const WaveFunction& state, double x0, double phi,
                               std::optional<Grid> target = {});

/// S(r*) with e^{r*} = cos(phi): psi(y) -> psi(y / cos(phi)) / sqrt(cos(phi)).
/// The default target is the input grid scaled by cos(phi).
WaveFunction output_squeeze(const WaveFunction& state, double phi, std::optional<Grid> target = {});

/// Closed-form conditional output psi_s(x) psi_p((x - x0) tan(phi)),
/// renormalized, on the signal grid.
WaveFunction conditional_output(const WaveFunction& signal, const WaveFunction& probe, double phi,
                                double x0);

/// The three measured stages (conditioning, displacement, squeezing) in
/// sequence, resampled onto the signal grid.
WaveFunction run_pipeline(const WaveFunction& signal, const WaveFunction& probe, double phi, double x0);

/// Inverse-transform draws from `dist`.
///
/// Generator: std::mt19937_64 seeded with `seed`; each draw takes one
/// 64-bit word w and forms u = (w >> 11) * 2^-53 in [0, 1). The draw is the
/// linear interpolation of u * cdf.back() in the trapezoidal cumulative
/// table of `dist`. Both pieces are fully specified, so streams are
/// reproducible bit for bit across platforms.
std::vector<double> sample_outcomes(const Distribution& dist, std::size_t count, std::uint64_t seed);

}  // namespace qnd
