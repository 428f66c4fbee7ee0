#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qnd/fidelity.hpp"
#include "qnd/wavefunction.hpp"

namespace qnd {

/// Default search bracket for the trade-off parameter x.
inline constexpr double kTradeOffLo = 0.05;
inline constexpr double kTradeOffHi = 20.0;

/// Points in the coarse scan that precedes golden-section refinement.
inline constexpr std::size_t kCoarseScanPoints = 64;

using ScalarObjective = std::function<double(double)>;
using PairObjective = std::function<FidelityPair(double)>;

struct ScalarOptimum {
  double x_star = 0.0;
  double value = 0.0;
  std::size_t evaluations = 0;
  /// The coarse scan saw more than one strict local maximum.
  bool multimodal = false;
};

struct Crossing {
  double x = 0.0;
  FidelityPair at{};
  std::size_t evaluations = 0;
};

struct TradeOffReport {
  double x_m = 0.0;
  double F_at_xm = 0.0;
  double G_at_xm = 0.0;
  double x_e = 0.0;
  double F_at_xe = 0.0;
  double G_at_xe = 0.0;
  std::size_t evaluations = 0;
  double tolerance = 0.0;
  bool multimodal = false;
};

/// Closed-form (F, G) at trade-off parameter x.
FidelityPair trade_off(double x);

/// Maximizes `objective` on [lo, hi]: a kCoarseScanPoints uniform scan
/// locates the best sample, then golden-section search refines the bracket
/// formed by its neighbours until it is shorter than `tol`. The scan may be
/// spread over `threads` workers; `objective` must then be thread-safe.
ScalarOptimum maximize_trade_off(const ScalarObjective& objective, double lo, double hi, double tol,
                                 unsigned threads = 1);

/// Bisection on F - G until |F - G| < tol.
Crossing find_equal_fidelity(const PairObjective& pair, double lo, double hi, double tol);

/// Closed-form equal-fidelity point.
double equal_fidelity_point(double lo, double hi, double tol);

/// Interferometer phase realizing x_target for the given widths:
/// phi = atan(sigma_p / (sigma_s x_target)).
double tune_phase(double sigma_s, double sigma_p, double x_target);

/// Numerical F and G for each probe variance, in input order. Failures are
/// rethrown with the offending index in the message.
std::vector<FidelityPair> numeric_trade_off_curve(const WaveFunction& signal,
                                                  std::span<const double> probe_variances, double phi,
                                                  unsigned threads = 1);

/// Numerical (F, G) at trade-off parameter x for an arbitrary signal: the
/// probe is a centered Gaussian of standard deviation x * sigma_s * tan(phi),
/// sigma_s being the quadrature spread of the signal.
FidelityPair numeric_trade_off(const WaveFunction& signal, double phi, double x);

TradeOffReport optimize_closed(double tol, double lo = kTradeOffLo, double hi = kTradeOffHi);

TradeOffReport optimize_numeric(const WaveFunction& signal, double phi, double tol, double lo = kTradeOffLo,
                                double hi = kTradeOffHi, unsigned threads = 1);

}  // namespace qnd
