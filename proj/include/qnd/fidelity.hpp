#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "qnd/chain.hpp"
#include "qnd/wavefunction.hpp"

namespace qnd {

/// Average state fidelity F and average distribution fidelity G, optionally
/// tagged with the trade-off parameter x = sigma_p / (sigma_s tan(phi)).
struct FidelityPair {
  double F = 0.0;
  double G = 0.0;
  std::optional<double> x;

  double sum() const { return F + G; }
};

/// Discretization of the integral over homodyne outcomes.
struct OutcomeQuadrature {
  std::size_t nodes = 1024;
  double span_sigmas = 8.0;
};

/// x = sigma_p / (sigma_s tan(phi)), with sigma_s, sigma_p quadrature standard deviations.
double trade_off_parameter(double sigma_s, double sigma_p, double phi);

/// Numerical F = integral dx0 p(x0) |<psi_s|psi_x0>|^2, with psi_x0 from
/// conditional_output. Clamped to [0, 1].
double state_fidelity(const WaveFunction& signal, const WaveFunction& probe, double phi,
                      const OutcomeQuadrature& quad = {});

/// G = (integral sqrt(p(x)) |psi_s(x)| dx)^2, clamped to [0, 1].
double distribution_fidelity(const WaveFunction& signal, const WaveFunction& probe, double phi);

/// Gaussian closed forms.
double gaussian_state_fidelity(double x);
double gaussian_distribution_fidelity(double x);

/// Gaussian-probe kernel exp(-tan^2(phi) (y1 - y2)^2 / (8 sigma_p^2)).
double transfer_function(double y1, double y2, double phi, double sigma_p);

/// F for a Gaussian probe of standard deviation sigma_p as the double integral
/// of |psi_s(y')|^2 |psi_s(y'')|^2 T(y', y'').
double state_fidelity_via_transfer(const WaveFunction& signal, double phi, double sigma_p);

/// Kernel rho(x, x') sampled on a grid.
struct DensityMatrixGrid {
  Grid grid;
  Eigen::MatrixXcd matrix;

  double trace() const;
  /// max |rho(x,x') - conj(rho(x',x))|.
  double hermiticity_error() const;
  /// <psi| rho |psi> by two-dimensional trapezoidal quadrature.
  double expectation(const WaveFunction& psi) const;
  /// Smallest eigenvalue of the quadrature-weighted operator W^1/2 rho W^1/2.
  double min_eigenvalue() const;
};

inline constexpr std::size_t kMaxEnsemblePoints = 4096;

/// rho_out(x, x') = integral dx0 p(x0) psi_x0(x) conj(psi_x0(x')), on the signal grid.
DensityMatrixGrid output_ensemble(const WaveFunction& signal, const WaveFunction& probe, double phi,
                                  const OutcomeQuadrature& quad = {});

}  // namespace qnd
