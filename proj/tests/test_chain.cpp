#include <cmath>
#include <numbers>

#include "gtest/gtest.h"

#include "oracles.hpp"
#include "qnd/chain.hpp"
#include "qnd/error.hpp"

using namespace qnd;

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4;

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected qnd::Error";
  return ErrorKind::InvalidArgument;
}

WaveFunction gaussian(double mean, double var, std::size_t n = kDefaultGridPoints) {
  return build_gaussian({mean, var}, default_grid({mean, var}, n));
}

WaveFunction gaussian_on(double mean, double var, const Grid& g) { return build_gaussian({mean, var}, g); }

double l1(const Distribution& a, const std::function<double(double)>& b) {
  std::vector<double> d(a.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = std::abs(a[k] - b(a.grid()[k]));
  return trapezoid(a.grid(), d);
}

// L2 distance between a joint state and a separable reference.
double joint_l2(const JointWaveFunction& psi, const std::function<cplx(double, double)>& ref) {
  double total = 0.0;
  for (std::size_t i = 0; i < psi.grid1().size(); ++i) {
    for (std::size_t j = 0; j < psi.grid2().size(); ++j) {
      total += trapezoid_weight(psi.grid1(), i) * trapezoid_weight(psi.grid2(), j) *
               std::norm(psi(i, j) - ref(psi.grid1()[i], psi.grid2()[j]));
    }
  }
  return std::sqrt(total);
}

}  // namespace

TEST(chain_config, derived_quantities) {
  ChainConfig cfg;
  cfg.phi = 0.6;
  EXPECT_NEAR(cfg.transmittivity(), std::cos(0.6) * std::cos(0.6), 1e-15);
  EXPECT_NEAR(std::exp(cfg.squeeze_parameter()), std::cos(0.6), 1e-15);
  EXPECT_NO_THROW(cfg.validate());
  for (double bad : {0.0, -0.1, std::numbers::pi / 2, 1.6, 1e-7, std::nan("")}) {
    EXPECT_EQ(kind_of([&] { validate_phase(bad); }), ErrorKind::DegeneratePhase) << bad;
  }
}

TEST(outcome, raw_reading) {
  const auto o = make_outcome(0.37, 0.9, 0.1);
  EXPECT_EQ(o.raw_X, -0.37 * std::sin(0.9));
}

TEST(beam_splitter, small_phase_matches_rotated_product) {
  const Grid g(-6.0, 6.0, 512);
  const auto s = gaussian_on(0.4, 0.3, g);
  const auto p = gaussian_on(0.0, 0.15, g);
  const auto product = [](double y1, double y2) {
    return cplx(oracle::gaussian_amplitude(y1, 0.4, 0.3) * oracle::gaussian_amplitude(y2, 0.0, 0.15));
  };
  std::vector<double> drift;
  for (double phi : {1e-4, 2e-4}) {
    const auto out = beam_splitter_transform(s, p, phi, g);
    const double c = std::cos(phi), sn = std::sin(phi);
    EXPECT_LT(joint_l2(out, [&](double y1, double y2) { return product(y1 * c - y2 * sn, y1 * sn + y2 * c); }),
              1e-6);
    drift.push_back(joint_l2(out, product));
  }
  // Departure from the unrotated product is first order in phi.
  EXPECT_LT(drift[0], 1e-3);
  EXPECT_NEAR(drift[1] / drift[0], 2.0, 1e-3);
}

TEST(beam_splitter, vacuum_pair_is_rotation_invariant) {
  const Grid g(-6.0, 6.0, 512);
  const auto v = gaussian_on(0.0, 0.25, g);
  const auto out = beam_splitter_transform(v, v, kQuarterPi, g);
  const double d = joint_l2(out, [](double y1, double y2) {
    return cplx(oracle::gaussian_amplitude(y1, 0.0, 0.25) * oracle::gaussian_amplitude(y2, 0.0, 0.25));
  });
  EXPECT_LT(d, 1e-6);
}

TEST(beam_splitter, near_swap_moves_probe_into_mode_one) {
  const Grid g(-6.0, 6.0, 384);
  const auto s = gaussian_on(0.0, 0.25, g);
  const auto p = gaussian_on(0.0, 0.1, g);
  const auto out = beam_splitter_transform(s, p, std::numbers::pi / 2 - 1e-4, g);
  const auto m1 = out.marginal_mode1();
  EXPECT_LT(l1(m1, [](double x) { return oracle::normal_pdf(x, 0.0, 0.1); }), 1e-5);
}

TEST(beam_splitter, preserves_norm) {
  const auto s = gaussian(0.3, 0.25, 512);
  const auto p = gaussian(0.0, 0.1, 512);
  for (double phi : {0.2, 0.6, kQuarterPi, 1.1, 1.4}) {
    const auto out = beam_splitter_transform(s, p, phi);
    EXPECT_NEAR(out.norm(), 1.0, 1e-6) << phi;
  }
}

TEST(beam_splitter, leaking_support_is_reported) {
  const Grid g(-1.5, 1.5, 128);
  const auto s = gaussian(0.0, 0.25);
  EXPECT_EQ(kind_of([&] { beam_splitter_transform(s, s, 0.5, g); }), ErrorKind::GridTooNarrow);
}

TEST(homodyne, matches_two_mode_marginal) {
  const auto s = build_cat(1.0, 0.2, default_cat_grid(1.0, 0.2, 512));
  const auto p = gaussian(0.0, 0.15, 512);
  for (double phi : {0.5, kQuarterPi, 1.0}) {
    const auto joint = beam_splitter_transform(s, p, phi, Grid::centered(0.0, 7.0, 700));
    const auto m2 = joint.marginal_mode2();
    const auto px = homodyne_distribution(s, p, phi);
    const double sn = std::sin(phi);
    // x0 = -X / sin(phi) with Jacobian sin(phi).
    EXPECT_LT(l1(px, [&](double x0) { return sn * m2.at(-x0 * sn); }), 1e-4) << phi;
  }
}

TEST(homodyne, vacuum_probe_convolution) {
  const auto s = gaussian(0.0, 0.25);
  const auto p = gaussian(0.0, 0.25);
  const auto px = homodyne_distribution(s, p, kQuarterPi);
  EXPECT_NEAR(px.integral(), 1.0, 1e-8);
  EXPECT_NEAR(px.variance(), 0.5, 1e-4);
  EXPECT_LT(l1(px, [](double x) { return oracle::normal_pdf(x, 0.0, 0.5); }), 1e-6);
}

TEST(homodyne, squeezed_probe_reproduces_intrinsic_density) {
  const auto s = build_cat(1.2, 0.25, default_cat_grid(1.2, 0.25, 4096));
  const double w2 = 1e-4 * density(s).variance();
  const auto p = gaussian(0.0, w2 * std::tan(0.7) * std::tan(0.7));
  const auto px = homodyne_distribution(s, p, 0.7, s.grid());
  const auto rho = density(s);
  EXPECT_LT(l1(px, [&](double x) { return rho.at(x); }), 0.02);
}

TEST(homodyne, antisqueezed_probe_flattens_outcomes) {
  const auto s = gaussian(0.0, 0.25);
  const double width = 1e4 * 0.25;
  const auto p = gaussian(0.0, width * std::tan(0.9) * std::tan(0.9));
  const auto px = homodyne_distribution(s, p, 0.9);
  EXPECT_LT(std::abs(px.variance() - width) / width, 0.01);
  EXPECT_NEAR(px.mean(), 0.0, 1e-6 * std::sqrt(width));
}

TEST(homodyne, degenerate_phase) {
  const auto s = gaussian(0.0, 0.25);
  EXPECT_EQ(kind_of([&] { homodyne_distribution(s, s, 0.0); }), ErrorKind::DegeneratePhase);
  EXPECT_EQ(kind_of([&] { homodyne_distribution(s, s, 1.6); }), ErrorKind::DegeneratePhase);
}

TEST(conditional_state_raw, matches_two_mode_projection) {
  const Grid g(-6.0, 6.0, 600);
  const auto s = gaussian_on(0.2, 0.3, g);
  const auto p = gaussian(0.0, 0.2);
  for (double phi : {0.5, 0.9}) {
    const auto joint = beam_splitter_transform(s, p, phi, g);
    for (double x0 : {-0.4, 0.0, 0.5}) {
      const auto slice = joint.project_mode2(-x0 * std::sin(phi));
      const auto raw = conditional_state_raw(s, p, phi, x0, g);
      EXPECT_NEAR(raw.norm(), 1.0, 1e-12);
      EXPECT_LT(l2_distance(slice, raw), 1e-5) << phi << " " << x0;
    }
  }
}

TEST(conditional_state_raw, vacuum_inputs_give_centered_gaussian) {
  const auto v = gaussian(0.0, 0.25);
  const auto raw = conditional_state_raw(v, v, kQuarterPi, 0.0);
  const auto rho = density(raw);
  EXPECT_NEAR(rho.mean(), 0.0, 1e-10);
  EXPECT_NEAR(rho.variance(), 0.25, 1e-8);
}

TEST(conditional_state_raw, null_outcome) {
  const auto s = gaussian(0.0, 0.25);
  const auto p = gaussian(0.0, 0.01);
  EXPECT_EQ(kind_of([&] { conditional_state_raw(s, p, kQuarterPi, 40.0); }), ErrorKind::NullOutcome);
}

TEST(feedback_displace, zero_is_identity) {
  const auto s = gaussian(0.3, 0.2);
  EXPECT_LT(l2_distance(feedback_displace(s, 0.0, 0.8), s), 1e-14);
}

TEST(feedback_displace, shifts_mean_by_gain) {
  const Grid g(-8.0, 8.0, 2048);
  const auto s = gaussian_on(-0.5, 0.2, g);
  for (double phi : {0.4, 1.0}) {
    const double x0 = 0.8;
    const auto shifted = feedback_displace(s, x0, phi, g);
    EXPECT_NEAR(shifted.norm(), 1.0, 1e-12);
    EXPECT_NEAR(density(shifted).mean(), -0.5 + x0 * std::sin(phi) * std::tan(phi), 1e-6);
  }
  EXPECT_EQ(kind_of([&] { feedback_displace(s, 200.0, 1.0, g); }), ErrorKind::GridTooNarrow);
}

TEST(feedback_displace, reproduces_displaced_integrand) {
  const double ms = 0.1, vs = 0.3, vp = 0.2;
  const auto s = gaussian(ms, vs);
  const auto p = gaussian(0.0, vp);
  for (double phi : {0.5, 1.0}) {
    for (double x0 : {-0.7, 0.6}) {
      const auto displaced = feedback_displace(conditional_state_raw(s, p, phi, x0), x0, phi);
      const double c = std::cos(phi), sn = std::sin(phi), t = std::tan(phi);
      std::vector<cplx> ref(displaced.size());
      for (std::size_t k = 0; k < ref.size(); ++k) {
        const double y = displaced.grid()[k];
        ref[k] = oracle::gaussian_amplitude(y * c, ms, vs) * oracle::gaussian_amplitude(y * sn - x0 * t, 0.0, vp);
      }
      const auto expected = WaveFunction::from_amplitudes(displaced.grid(), ref);
      EXPECT_LT(l2_distance(displaced, expected), 1e-6) << phi << " " << x0;
    }
  }
}

TEST(output_squeeze, small_phase_is_identity) {
  const auto s = gaussian(0.2, 0.3);
  EXPECT_LT(l2_distance(output_squeeze(s, 1e-4, s.grid()), s), 1e-6);
}

TEST(output_squeeze, scales_variance) {
  const Grid g(-6.0, 6.0, 2048);
  const auto s = gaussian_on(0.0, 0.4, g);
  for (double phi : {0.3, 0.8, 1.2}) {
    const auto sq = output_squeeze(s, phi, g);
    const double c = std::cos(phi);
    EXPECT_NEAR(density(sq).variance(), 0.4 * c * c, 1e-6) << phi;
  }
}

TEST(conditional_output, gaussian_product_moments) {
  const double vs = 0.25;
  const auto s = gaussian(0.0, vs, 4096);
  for (double phi : {0.5, kQuarterPi, 1.1}) {
    for (double vp : {0.05, 0.3}) {
      const auto p = gaussian(0.0, vp);
      const double t = std::tan(phi);
      const double w2 = vp / (t * t);
      for (double x0 : {-0.5, 0.2}) {
        const auto out = conditional_output(s, p, phi, x0);
        EXPECT_NEAR(out.norm(), 1.0, 1e-9);
        const auto expect = oracle::gaussian_product(vs, x0, w2);
        const auto rho = density(out);
        EXPECT_NEAR(rho.mean(), expect.mean, 1e-6);
        EXPECT_NEAR(rho.variance(), expect.variance, 1e-6);
      }
    }
  }
}

TEST(conditional_output, projective_and_nondestructive_limits) {
  const double vs = 0.25, ss = 0.5;
  const auto s = gaussian(0.0, vs, 8192);
  const auto sq = gaussian(0.0, 1e-4 * vs);  // phi = pi/4
  for (double x0 : {-0.4, 0.0, 0.3}) {
    const auto rho = density(conditional_output(s, sq, kQuarterPi, x0));
    EXPECT_LT(std::sqrt(rho.variance()), 0.02 * ss);
    EXPECT_NEAR(rho.mean(), x0, 0.02 * ss);
  }
  const auto asq = gaussian(0.0, 1e4 * vs);
  for (double x0 = -2 * ss; x0 <= 2 * ss + 1e-12; x0 += 0.25 * ss) {
    EXPECT_GT(std::norm(overlap(conditional_output(s, asq, kQuarterPi, x0), s)), 0.99) << x0;
  }
}

TEST(conditional_output, projective_rescaling_invariance) {
  const auto s = build_cat(1.0, 0.2, default_cat_grid(1.0, 0.2));
  const auto p = gaussian(0.0, 0.3);
  const auto ref = conditional_output(s, p, 0.7, 0.4);
  for (cplx c : {cplx(-3.7, 0.0), cplx(0.02, 0.0), cplx(0.6, -1.9)}) {
    std::vector<cplx> scaled(s.amplitudes().begin(), s.amplitudes().end());
    for (auto& a : scaled) a *= c;
    const auto out = conditional_output(WaveFunction::from_amplitudes(s.grid(), scaled), p, 0.7, 0.4);
    EXPECT_NEAR(std::abs(overlap(ref, out)), 1.0, 1e-9);
    const auto d1 = density(ref);
    const auto d2 = density(out);
    for (std::size_t k = 0; k < d1.size(); ++k) ASSERT_NEAR(d1[k], d2[k], 1e-9);
  }
}

TEST(pipeline, equals_closed_form_on_sweep) {
  const auto s = gaussian(0.0, 0.25);
  for (double phi : {0.35, kQuarterPi, 1.1}) {
    for (double vp : {0.05, 0.25, 1.0}) {
      const auto p = gaussian(0.0, vp);
      for (double x0 : {-0.6, 0.0, 0.45}) {
        EXPECT_LT(l2_distance(run_pipeline(s, p, phi, x0), conditional_output(s, p, phi, x0)), 1e-6)
            << phi << " " << vp << " " << x0;
      }
    }
  }
}

TEST(pipeline, interpolating_stages_on_a_fixed_grid) {
  // Every stage resampled on one common lattice, so each step interpolates.
  const Grid g(-7.0, 7.0, 4096);
  const auto s = build_cat(0.8, 0.2, g);
  const auto p = gaussian(0.0, 0.3);
  for (double phi : {0.5, 0.9}) {
    for (double x0 : {-0.5, 0.7}) {
      const auto raw = conditional_state_raw(s, p, phi, x0, g);
      const auto out = output_squeeze(feedback_displace(raw, x0, phi, g), phi, g);
      EXPECT_LT(l2_distance(out, conditional_output(s, p, phi, x0)), 1e-6) << phi << " " << x0;
    }
  }
}

TEST(sampling, ks_and_moments) {
  const auto s = gaussian(0.0, 0.25);
  const auto px = homodyne_distribution(s, s, kQuarterPi);
  const std::size_t n = 100000;
  const auto draws = sample_outcomes(px, n, 7);
  ASSERT_EQ(draws.size(), n);
  const double ks = oracle::ks_statistic(draws, [](double x) { return oracle::normal_cdf(x, 0.0, 0.5); });
  EXPECT_LT(ks, 1.63 / std::sqrt(static_cast<double>(n)));
  double mean = 0.0;
  for (double x : draws) mean += x;
  mean /= static_cast<double>(n);
  EXPECT_LT(std::abs(mean), 4.0 * std::sqrt(0.5) / std::sqrt(static_cast<double>(n)));
}

TEST(sampling, deterministic_streams) {
  const auto px = density(gaussian(0.3, 0.4));
  EXPECT_EQ(sample_outcomes(px, 1000, 42), sample_outcomes(px, 1000, 42));
  EXPECT_NE(sample_outcomes(px, 1000, 42), sample_outcomes(px, 1000, 43));
  EXPECT_EQ(kind_of([&] { sample_outcomes(px, 0, 1); }), ErrorKind::ZeroCount);
}

TEST(sampling, generator_is_pinned) {
  // First draws of the documented generator (mt19937_64, 53-bit uniform,
  // linear inverse of the trapezoidal CDF) on a uniform density over [0, 1].
  std::vector<double> flat(101, 1.0);
  const auto uniform = Distribution::from_density(Grid(0.0, 1.0, 101), flat);
  const auto draws = sample_outcomes(uniform, 3, 5489);
  // mt19937_64 default-seed first output is 14514284786278117030.
  EXPECT_NEAR(draws[0], static_cast<double>(14514284786278117030ull >> 11) * 0x1.0p-53, 1e-12);
}
