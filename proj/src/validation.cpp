#include "qnd/validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qnd/chain.hpp"
#include "qnd/wavefunction.hpp"

namespace qnd {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4;

CheckResult below(std::string suite, std::string name, double measured, double threshold, std::string detail = {}) {
  return CheckResult{std::move(suite), std::move(name), measured < threshold, measured, threshold, std::move(detail)};
}

double normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

// Probe variance giving filter width sigma_p^2 / tan^2(phi) = width.
double probe_variance_for_width(double width, double phi) {
  const double t = std::tan(phi);
  return width * t * t;
}

}  // namespace

std::vector<CheckResult> validate_limits() {
  std::vector<CheckResult> out;
  const GaussianSpec signal_spec{0.0, 0.25};
  const double sigma_s = signal_spec.stddev();
  const auto signal = build_gaussian(signal_spec, default_grid(signal_spec, 8192));
  const double phi = kQuarterPi;

  {
    // Projective limit: filter width 1e-4 sigma_s^2.
    const GaussianSpec probe_spec{0.0, probe_variance_for_width(1e-4 * signal_spec.variance, phi)};
    const auto probe = build_gaussian(probe_spec, default_grid(probe_spec));
    const auto p = homodyne_distribution(signal, probe, phi, signal.grid());
    const auto intrinsic = density(signal);
    std::vector<double> diff(p.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = std::abs(p[k] - intrinsic[k]);
    out.push_back(below("limits", "squeezed_homodyne_l1", trapezoid(p.grid(), diff), 0.02,
                        "L1(p(x0), |psi_s|^2) at filter width 1e-4 sigma_s^2"));

    double worst_sd = 0.0;
    double worst_offset = 0.0;
    for (double x0 : {-sigma_s, 0.0, 0.5 * sigma_s, sigma_s}) {
      const auto cond = density(conditional_output(signal, probe, phi, x0));
      worst_sd = std::max(worst_sd, std::sqrt(cond.variance()));
      worst_offset = std::max(worst_offset, std::abs(cond.mean() - x0));
    }
    out.push_back(below("limits", "squeezed_conditional_stddev", worst_sd / sigma_s, 0.02,
                        "max conditional stddev / sigma_s"));
    out.push_back(below("limits", "squeezed_conditional_center", worst_offset / sigma_s, 0.02,
                        "max |mean - x0| / sigma_s"));
  }

  {
    // Non-destructive limit: filter width 1e4 sigma_s^2.
    const double width = 1e4 * signal_spec.variance;
    const GaussianSpec probe_spec{0.0, probe_variance_for_width(width, phi)};
    const auto probe = build_gaussian(probe_spec, default_grid(probe_spec));
    double worst_loss = 0.0;
    for (int i = -4; i <= 4; ++i) {
      const double x0 = 0.5 * i * sigma_s;
      const auto cond = conditional_output(signal, probe, phi, x0);
      worst_loss = std::max(worst_loss, 1.0 - std::norm(overlap(cond, signal)));
    }
    out.push_back(below("limits", "antisqueezed_overlap_loss", worst_loss, 0.01,
                        "max 1 - |<psi_x0|psi_s>|^2 over x0 in [-2 sigma_s, 2 sigma_s]"));
    const auto p = homodyne_distribution(signal, probe, phi);
    const double rel = std::abs(p.variance() - width) / width;
    out.push_back(below("limits", "antisqueezed_outcome_variance", rel, 0.01,
                        "relative error of var p(x0) against the filter width sigma_p^2 / tan^2 phi"));
    out.push_back(below("limits", "antisqueezed_outcome_mean", std::abs(p.mean()) / std::sqrt(width), 0.01,
                        "|mean p(x0)| in units of its width"));
  }

  {
    // Vacuum probe: p(x0) is |psi_s|^2 convolved with a Gaussian of variance
    // 1/(4 tan^2 phi). The cat signal makes the convolution non-trivial.
    const auto cat = build_cat(1.5, 0.25, default_cat_grid(1.5, 0.25));
    for (double vphi : {0.5, kQuarterPi, 1.2}) {
      const GaussianSpec vac{0.0, kVacuumVariance};
      const auto probe = build_gaussian(vac, default_grid(vac));
      const auto p = homodyne_distribution(cat, probe, vphi);
      const double t = std::tan(vphi);
      const double kernel_var = 1.0 / (4.0 * t * t);
      const auto rho = density(cat);
      std::vector<double> diff(p.size());
      std::vector<double> conv(rho.size());
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double x0 = p.grid()[j];
        for (std::size_t k = 0; k < rho.size(); ++k) conv[k] = rho[k] * normal_pdf(rho.grid()[k], x0, kernel_var);
        diff[j] = std::abs(p[j] - trapezoid(rho.grid(), conv));
      }
      std::ostringstream name;
      name << "vacuum_convolution_l1_phi_" << vphi;
      out.push_back(below("limits", name.str(), trapezoid(p.grid(), diff), 1e-6,
                          "L1 against direct convolution with the vacuum kernel"));
    }
    const GaussianSpec vac{0.0, kVacuumVariance};
    const auto probe = build_gaussian(vac, default_grid(vac));
    const auto p = homodyne_distribution(signal, probe, kQuarterPi);
    out.push_back(below("limits", "vacuum_outcome_variance", std::abs(p.variance() - 0.5), 1e-4,
                        "|var p(x0) - 0.5| for a vacuum signal at phi = pi/4"));
  }
  return out;
}

std::vector<CheckResult> validate_pipeline() {
  const GaussianSpec signal_spec{0.0, 0.25};
  const auto signal = build_gaussian(signal_spec, default_grid(signal_spec));
  double worst = 0.0;
  std::ostringstream where;
  for (double phi : {0.35, kQuarterPi, 1.1}) {
    for (double var : {0.05, 0.25, 1.0}) {
      const GaussianSpec probe_spec{0.0, var};
      const auto probe = build_gaussian(probe_spec, default_grid(probe_spec));
      for (double x0 : {-0.6, 0.0, 0.45}) {
        const double d = l2_distance(run_pipeline(signal, probe, phi, x0), conditional_output(signal, probe, phi, x0));
        if (d >= worst) {
          worst = d;
          where.str({});
          where << "worst at phi=" << phi << " var=" << var << " x0=" << x0;
        }
      }
    }
  }
  return {below("pipeline", "pipeline_vs_closed_form_l2", worst, 1e-6, where.str())};
}

}  // namespace qnd
