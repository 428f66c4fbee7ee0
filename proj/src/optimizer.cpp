#include "qnd/optimizer.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "qnd/chain.hpp"
#include "qnd/error.hpp"
#include "qnd/parallel.hpp"

namespace qnd {

namespace {

void require_bracket(double lo, double hi, bool positive) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi) || (positive && !(lo > 0.0))) {
    std::ostringstream msg;
    msg << "invalid bracket [" << lo << ", " << hi << "]" << (positive ? " (need 0 < lo < hi)" : "");
    throw Error(ErrorKind::InvalidBracket, msg.str());
  }
}

double checked(double v, double x) {
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "objective is not finite at x=" << x;
    throw Error(ErrorKind::NonFiniteObjective, msg.str());
  }
  return v;
}

double scan_point(double lo, double hi, std::size_t k) {
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(kCoarseScanPoints - 1);
}

// Memoizes pair evaluations so the optimum and crossing searches can share
// the coarse scan.
class PairCache {
 public:
  explicit PairCache(PairObjective fn) : fn_(std::move(fn)) {}

  FidelityPair operator()(double x) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(x); it != cache_.end()) return it->second;
    }
    auto value = fn_(x);
    std::lock_guard lock(mutex_);
    ++evaluations_;
    cache_.emplace(x, value);
    return value;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  PairObjective fn_;
  std::mutex mutex_;
  std::map<double, FidelityPair> cache_;
  std::size_t evaluations_ = 0;
};

TradeOffReport build_report(PairCache& cache, double tol, double lo, double hi, unsigned threads) {
  require_bracket(lo, hi, true);
  const auto best = maximize_trade_off([&](double x) { return cache(x).sum(); }, lo, hi, tol, threads);

  // Equal-fidelity crossing: first sign change of F - G on the coarse scan.
  std::size_t k = 1;
  double prev = cache(scan_point(lo, hi, 0)).F - cache(scan_point(lo, hi, 0)).G;
  for (; k < kCoarseScanPoints; ++k) {
    const auto at = cache(scan_point(lo, hi, k));
    const double diff = at.F - at.G;
    if ((prev < 0.0) != (diff < 0.0)) break;
    prev = diff;
  }
  if (k == kCoarseScanPoints) {
    throw Error(ErrorKind::NoSignChange, "F - G does not change sign on the search bracket");
  }
  const auto crossing = find_equal_fidelity([&](double x) { return cache(x); }, scan_point(lo, hi, k - 1),
                                            scan_point(lo, hi, k), tol);
  const auto at_m = cache(best.x_star);
  TradeOffReport report;
  report.x_m = best.x_star;
  report.F_at_xm = at_m.F;
  report.G_at_xm = at_m.G;
  report.x_e = crossing.x;
  report.F_at_xe = crossing.at.F;
  report.G_at_xe = crossing.at.G;
  report.evaluations = cache.evaluations();
  report.tolerance = tol;
  report.multimodal = best.multimodal;
  return report;
}

}  // namespace

FidelityPair trade_off(double x) {
  return FidelityPair{gaussian_state_fidelity(x), gaussian_distribution_fidelity(x), x};
}

ScalarOptimum maximize_trade_off(const ScalarObjective& objective, double lo, double hi, double tol,
                                 unsigned threads) {
  require_bracket(lo, hi, false);
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");

  const auto scan = parallel_map(kCoarseScanPoints, threads, [&](std::size_t k) {
    const double x = scan_point(lo, hi, k);
    return checked(objective(x), x);
  });
  ScalarOptimum result;
  result.evaluations = kCoarseScanPoints;

  std::size_t best = 0;
  std::size_t peaks = 0;
  for (std::size_t k = 0; k < scan.size(); ++k) {
    if (scan[k] > scan[best]) best = k;
    const bool above_left = k == 0 || scan[k] > scan[k - 1];
    const bool above_right = k + 1 == scan.size() || scan[k] > scan[k + 1];
    if (above_left && above_right) ++peaks;
  }
  result.multimodal = peaks > 1;

  double a = scan_point(lo, hi, best == 0 ? 0 : best - 1);
  double b = scan_point(lo, hi, std::min(best + 1, kCoarseScanPoints - 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = checked(objective(c), c);
  double fd = checked(objective(d), d);
  result.evaluations += 2;
  while (b - a >= tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = checked(objective(c), c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = checked(objective(d), d);
    }
    ++result.evaluations;
  }
  result.x_star = 0.5 * (a + b);
  result.value = checked(objective(result.x_star), result.x_star);
  ++result.evaluations;
  return result;
}

Crossing find_equal_fidelity(const PairObjective& pair, double lo, double hi, double tol) {
  require_bracket(lo, hi, false);
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  Crossing result;
  auto eval = [&](double x) {
    ++result.evaluations;
    const auto p = pair(x);
    checked(p.F - p.G, x);
    return p;
  };
  auto left = eval(lo);
  const auto right = eval(hi);
  const double dl = left.F - left.G;
  const double dr = right.F - right.G;
  if (std::abs(dl) < tol) return Crossing{lo, left, result.evaluations};
  if (std::abs(dr) < tol) return Crossing{hi, right, result.evaluations};
  if ((dl < 0.0) == (dr < 0.0)) {
    std::ostringstream msg;
    msg << "F - G has the same sign at both ends of [" << lo << ", " << hi << "]";
    throw Error(ErrorKind::NoSignChange, msg.str());
  }
  double a = lo;
  double b = hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (a + b);
    const auto at = eval(mid);
    const double diff = at.F - at.G;
    if (std::abs(diff) < tol || mid == a || mid == b) {
      result.x = mid;
      result.at = at;
      return result;
    }
    if ((diff < 0.0) == (dl < 0.0)) {
      a = mid;
    } else {
      b = mid;
    }
  }
  throw Error(ErrorKind::NoSignChange, "bisection did not reach the requested tolerance");
}

double equal_fidelity_point(double lo, double hi, double tol) {
  if (!(lo > 0.0)) require_bracket(lo, hi, true);
  return find_equal_fidelity(trade_off, lo, hi, tol).x;
}

double tune_phase(double sigma_s, double sigma_p, double x_target) {
  if (!(sigma_s > 0.0) || !(sigma_p > 0.0) || !(x_target > 0.0)) {
    throw Error(ErrorKind::OutOfRangePhase, "tune_phase needs positive widths and target");
  }
  const double phi = std::atan(sigma_p / (sigma_s * x_target));
  try {
    validate_phase(phi);
  } catch (const Error& e) {
    throw Error(ErrorKind::OutOfRangePhase, std::string("tuned phase out of range: ") + e.what());
  }
  return phi;
}

std::vector<FidelityPair> numeric_trade_off_curve(const WaveFunction& signal,
                                                  std::span<const double> probe_variances, double phi,
                                                  unsigned threads) {
  validate_phase(phi);
  const double sigma_s = std::sqrt(density(signal).variance());
  return parallel_map(probe_variances.size(), threads, [&](std::size_t i) {
    try {
      const GaussianSpec probe_spec{0.0, probe_variances[i]};
      const auto probe = build_gaussian(probe_spec, default_grid(probe_spec, signal.size()));
      return FidelityPair{state_fidelity(signal, probe, phi), distribution_fidelity(signal, probe, phi),
                          trade_off_parameter(sigma_s, probe_spec.stddev(), phi)};
    } catch (const Error& e) {
      throw Error(e.kind(), "probe variance #" + std::to_string(i) + ": " + e.what());
    }
  });
}

FidelityPair numeric_trade_off(const WaveFunction& signal, double phi, double x) {
  if (!(x > 0.0)) throw Error(ErrorKind::InvalidArgument, "trade-off parameter x must be positive");
  validate_phase(phi);
  const double sigma_s = std::sqrt(density(signal).variance());
  const double sigma_p = x * sigma_s * std::tan(phi);
  const GaussianSpec probe_spec{0.0, sigma_p * sigma_p};
  const auto probe = build_gaussian(probe_spec, default_grid(probe_spec, signal.size()));
  return FidelityPair{state_fidelity(signal, probe, phi), distribution_fidelity(signal, probe, phi), x};
}

TradeOffReport optimize_closed(double tol, double lo, double hi) {
  PairCache cache(trade_off);
  return build_report(cache, tol, lo, hi, 1);
}

TradeOffReport optimize_numeric(const WaveFunction& signal, double phi, double tol, double lo, double hi,
                                unsigned threads) {
  validate_phase(phi);
  PairCache cache([&](double x) { return numeric_trade_off(signal, phi, x); });
  return build_report(cache, tol, lo, hi, threads);
}

}  // namespace qnd
