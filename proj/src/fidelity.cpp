#include "qnd/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "qnd/error.hpp"

namespace qnd {

namespace {

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

void require_positive_x(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream msg;
    msg << "trade-off parameter x must be positive and finite (got " << x << ")";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
}

Distribution outcome_table(const WaveFunction& signal, const WaveFunction& probe, double phi,
                           const OutcomeQuadrature& quad) {
  const Grid grid = default_outcome_grid(signal, probe, phi, quad.nodes, quad.span_sigmas);
  return homodyne_distribution(signal, probe, phi, grid);
}

// Normalized psi_s(x) psi_p((x - x0) tan(phi)) on the signal grid. Far-tail
// outcomes may sit against the grid edge; their weight p(x0) is negligible,
// so no edge check is applied here. Empty when the product vanishes.
std::vector<cplx> conditional_amplitudes(const WaveFunction& signal, const WaveFunction& probe, double t,
                                         double x0) {
  const Grid& g = signal.grid();
  std::vector<cplx> amps(g.size());
  for (std::size_t k = 0; k < amps.size(); ++k) amps[k] = signal[k] * probe.at((g[k] - x0) * t);
  std::vector<double> mod(amps.size());
  for (std::size_t k = 0; k < amps.size(); ++k) mod[k] = std::norm(amps[k]);
  const double norm2 = trapezoid(g, mod);
  if (!(norm2 > 0.0)) return {};
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& a : amps) a *= scale;
  return amps;
}

}  // namespace

double trade_off_parameter(double sigma_s, double sigma_p, double phi) {
  validate_phase(phi);
  if (!(sigma_s > 0.0) || !(sigma_p > 0.0)) {
    throw Error(ErrorKind::NonpositiveWidth, "standard deviations must be positive");
  }
  return sigma_p / (sigma_s * std::tan(phi));
}

double state_fidelity(const WaveFunction& signal, const WaveFunction& probe, double phi,
                      const OutcomeQuadrature& quad) {
  validate_phase(phi);
  const auto p = outcome_table(signal, probe, phi, quad);
  const Grid& g = p.grid();
  const double t = std::tan(phi);
  double total = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!(p[j] > kNullOutcomeThreshold)) continue;
    const auto out = conditional_amplitudes(signal, probe, t, g[j]);
    if (out.empty()) continue;
    std::vector<cplx> prod(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) prod[k] = std::conj(signal[k]) * out[k];
    total += trapezoid_weight(g, j) * p[j] * std::norm(trapezoid(signal.grid(), prod));
  }
  return clamp_unit(total);
}

double distribution_fidelity(const WaveFunction& signal, const WaveFunction& probe, double phi) {
  validate_phase(phi);
  const Grid& g = signal.grid();
  std::vector<double> f(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double amp = std::abs(signal[k]);
    f[k] = amp == 0.0 ? 0.0 : std::sqrt(outcome_density(signal, probe, phi, g[k])) * amp;
  }
  const double bc = trapezoid(g, f);
  return clamp_unit(bc * bc);
}

double gaussian_state_fidelity(double x) {
  require_positive_x(x);
  return std::sqrt(2.0) * x / std::sqrt(1.0 + 2.0 * x * x);
}

double gaussian_distribution_fidelity(double x) {
  require_positive_x(x);
  return 2.0 * std::sqrt(1.0 + x * x) / (2.0 + x * x);
}

double transfer_function(double y1, double y2, double phi, double sigma_p) {
  if (!(sigma_p > 0.0)) throw Error(ErrorKind::NonpositiveWidth, "probe width sigma_p must be positive");
  const double t = std::tan(phi);
  const double d = y1 - y2;
  return std::exp(-t * t * d * d / (8.0 * sigma_p * sigma_p));
}

double state_fidelity_via_transfer(const WaveFunction& signal, double phi, double sigma_p) {
  if (!(sigma_p > 0.0)) throw Error(ErrorKind::NonpositiveWidth, "probe width sigma_p must be positive");
  validate_phase(phi);
  const Grid& g = signal.grid();
  const std::size_t n = g.size();
  std::vector<double> weighted(n);
  for (std::size_t k = 0; k < n; ++k) weighted[k] = trapezoid_weight(g, k) * std::norm(signal[k]);
  const double t = std::tan(phi);
  const double rate = t * t / (8.0 * sigma_p * sigma_p);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (weighted[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = g[i] - g[j];
      row += weighted[j] * std::exp(-rate * d * d);
    }
    total += weighted[i] * row;
  }
  return clamp_unit(total);
}

double DensityMatrixGrid::trace() const {
  double tr = 0.0;
  for (Eigen::Index k = 0; k < matrix.rows(); ++k) {
    tr += trapezoid_weight(grid, static_cast<std::size_t>(k)) * matrix(k, k).real();
  }
  return tr;
}

double DensityMatrixGrid::hermiticity_error() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrixGrid::expectation(const WaveFunction& psi) const {
  if (!psi.grid().matches(grid)) throw Error(ErrorKind::GridMismatch, "expectation requires the kernel grid");
  Eigen::VectorXcd v(matrix.rows());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    v(k) = trapezoid_weight(grid, static_cast<std::size_t>(k)) * psi[static_cast<std::size_t>(k)];
  }
  return v.dot(matrix * v).real();
}

double DensityMatrixGrid::min_eigenvalue() const {
  Eigen::VectorXd root(matrix.rows());
  for (Eigen::Index k = 0; k < root.size(); ++k) {
    root(k) = std::sqrt(trapezoid_weight(grid, static_cast<std::size_t>(k)));
  }
  const Eigen::MatrixXcd weighted = root.asDiagonal() * matrix * root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(weighted, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityMatrixGrid output_ensemble(const WaveFunction& signal, const WaveFunction& probe, double phi,
                                  const OutcomeQuadrature& quad) {
  validate_phase(phi);
  const Grid& g = signal.grid();
  if (g.size() > kMaxEnsemblePoints) {
    throw Error(ErrorKind::ResourceLimit, "output_ensemble supports at most " +
                                              std::to_string(kMaxEnsemblePoints) + " grid points (got " +
                                              std::to_string(g.size()) + ")");
  }
  const auto p = outcome_table(signal, probe, phi, quad);
  const Grid& og = p.grid();
  const double t = std::tan(phi);
  std::vector<Eigen::Index> kept;
  for (std::size_t j = 0; j < og.size(); ++j) {
    if (p[j] > kNullOutcomeThreshold) kept.push_back(static_cast<Eigen::Index>(j));
  }
  // rho = A A^dag with column j holding sqrt(w_j p_j) psi_{x0_j}.
  Eigen::MatrixXcd columns =
      Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const auto j = static_cast<std::size_t>(kept[c]);
    const auto out = conditional_amplitudes(signal, probe, t, og[j]);
    if (out.empty()) continue;
    const double scale = std::sqrt(trapezoid_weight(og, j) * p[j]);
    for (std::size_t k = 0; k < g.size(); ++k) {
      columns(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = scale * out[k];
    }
  }
  DensityMatrixGrid rho{g, Eigen::MatrixXcd(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()))};
  rho.matrix.noalias() = columns * columns.adjoint();
  return rho;
}

}  // namespace qnd
