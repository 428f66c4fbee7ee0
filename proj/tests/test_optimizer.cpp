#include <cmath>
#include <numbers>
#include <thread>

#include "gtest/gtest.h"

#include "oracles.hpp"
#include "qnd/error.hpp"
#include "qnd/optimizer.hpp"
#include "qnd/parallel.hpp"

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

double closed_sum(double x) { return oracle::closed_F(x) + oracle::closed_G(x); }

}  // namespace

TEST(trade_off, values) {
  const auto at = trade_off(1.2);
  EXPECT_NEAR(at.F, 0.8615, 1e-4);
  EXPECT_NEAR(at.G, 0.9081, 1e-4);
  EXPECT_NEAR(at.sum(), 1.7696, 2e-4);
  EXPECT_NEAR(trade_off(1.0).sum(), 1.75930562250979, 1e-12);
  EXPECT_NEAR(trade_off(1e-8).sum(), 1.0, 1e-7);
  EXPECT_EQ(kind_of([] { trade_off(0.0); }), ErrorKind::InvalidArgument);
}

TEST(maximize_trade_off, quadratic) {
  const auto r = maximize_trade_off([](double x) { return -(x - 2.0) * (x - 2.0); }, 0.0, 5.0, 1e-6);
  EXPECT_NEAR(r.x_star, 2.0, 1e-6);
  EXPECT_FALSE(r.multimodal);
}

TEST(maximize_trade_off, gaussian_sum) {
  const auto r = maximize_trade_off(closed_sum, 0.1, 5.0, 1e-4);
  EXPECT_NEAR(r.x_star, 1.2, 0.05);
  EXPECT_NEAR(r.x_star, oracle::kXm, 1e-4);
  EXPECT_NEAR(r.value, oracle::kFAtXm + oracle::kGAtXm, 1e-8);
}

TEST(maximize_trade_off, stable_under_tolerance_halving) {
  double tol = 1e-2;
  double prev = maximize_trade_off(closed_sum, 0.05, 20.0, tol).x_star;
  for (int k = 0; k < 12; ++k) {
    const double next = maximize_trade_off(closed_sum, 0.05, 20.0, tol / 2).x_star;
    EXPECT_LT(std::abs(next - prev), tol) << tol;
    prev = next;
    tol /= 2;
  }
}

TEST(maximize_trade_off, parallel_scan_matches_serial) {
  const auto serial = maximize_trade_off(closed_sum, 0.05, 20.0, 1e-8, 1);
  const auto threaded = maximize_trade_off(closed_sum, 0.05, 20.0, 1e-8, 4);
  EXPECT_EQ(serial.x_star, threaded.x_star);
  EXPECT_EQ(serial.value, threaded.value);
}

TEST(maximize_trade_off, flags_multimodal_objective) {
  const auto r = maximize_trade_off([](double x) { return std::cos(4.0 * x); }, 0.0, 10.0, 1e-6);
  EXPECT_TRUE(r.multimodal);
}

TEST(maximize_trade_off, errors) {
  EXPECT_EQ(kind_of([] { maximize_trade_off(closed_sum, 2.0, 1.0, 1e-4); }), ErrorKind::InvalidBracket);
  EXPECT_EQ(kind_of([] { maximize_trade_off(closed_sum, 1.0, 2.0, 0.0); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { maximize_trade_off([](double) { return std::nan(""); }, 1.0, 2.0, 1e-4); }),
            ErrorKind::NonFiniteObjective);
  EXPECT_EQ(kind_of([] { optimize_closed(1e-4, 0.0, 5.0); }), ErrorKind::InvalidBracket);
}

TEST(equal_fidelity_point, values) {
  const double xe = equal_fidelity_point(1.0, 2.0, 1e-6);
  EXPECT_NEAR(xe, 1.3, 0.1);
  EXPECT_NEAR(xe, oracle::kXe, 1e-5);
  const auto at = trade_off(xe);
  EXPECT_LT(std::abs(at.F - at.G), 1e-6);
  EXPECT_NEAR(at.F, 0.88, 0.01);
  EXPECT_NEAR(at.F, oracle::kFAtXe, 1e-6);
  EXPECT_EQ(kind_of([] { equal_fidelity_point(2.0, 1.0, 1e-6); }), ErrorKind::InvalidBracket);
  EXPECT_EQ(kind_of([] { equal_fidelity_point(2.0, 3.0, 1e-6); }), ErrorKind::NoSignChange);
}

TEST(equal_fidelity_point, residual_holds_at_every_tolerance) {
  for (double tol : {1e-2, 1e-4, 1e-8, 1e-12}) {
    const auto c = find_equal_fidelity(trade_off, 1.0, 2.0, tol);
    EXPECT_LT(std::abs(c.at.F - c.at.G), tol);
    EXPECT_EQ(c.at.F, trade_off(c.x).F);
  }
}

TEST(tune_phase, values) {
  EXPECT_NEAR(tune_phase(0.5, 0.5, 1.0), kQuarterPi, 1e-15);
  EXPECT_NEAR(tune_phase(0.5, 0.6, 1.2), kQuarterPi, 1e-15);
  EXPECT_EQ(kind_of([] { tune_phase(0.5, 0.5, 1e9); }), ErrorKind::OutOfRangePhase);
  EXPECT_EQ(kind_of([] { tune_phase(0.5, -0.5, 1.0); }), ErrorKind::OutOfRangePhase);
}

TEST(tune_phase, round_trip) {
  for (double ss : {0.1, 0.5, 2.0}) {
    for (double sp : {0.05, 0.5, 3.0}) {
      for (double x : {0.05, 0.7, 1.2, 5.0, 20.0}) {
        const double phi = tune_phase(ss, sp, x);
        EXPECT_NEAR(trade_off_parameter(ss, sp, phi), x, 1e-12 * x) << ss << " " << sp << " " << x;
      }
    }
  }
}

TEST(optimize_closed, report) {
  const auto r = optimize_closed(1e-4);
  EXPECT_NEAR(r.x_m, 1.2, 0.05);
  EXPECT_NEAR(r.F_at_xm, 0.86, 0.01);
  EXPECT_NEAR(r.G_at_xm, 0.91, 0.01);
  EXPECT_NEAR(r.x_e, 1.3, 0.1);
  EXPECT_NEAR(r.F_at_xe, 0.88, 0.01);
  EXPECT_LE(std::abs(r.F_at_xe - r.G_at_xe), r.tolerance);
  EXPECT_FALSE(r.multimodal);
  const auto pinned = optimize_closed(1e-9);
  EXPECT_NEAR(pinned.x_m, oracle::kXm, 1e-6);
  EXPECT_NEAR(pinned.x_e, oracle::kXe, 1e-6);
}

TEST(numeric_trade_off_curve, gaussian_matches_closed_form) {
  const auto s = gaussian(0.0, 0.25);
  const std::vector<double> vars{0.01, 0.1, 0.25, 1.0, 4.0};
  const auto curve = numeric_trade_off_curve(s, vars, 0.6, threads_from_env());
  ASSERT_EQ(curve.size(), vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const double x = std::sqrt(vars[k]) / (0.5 * std::tan(0.6));
    ASSERT_TRUE(curve[k].x.has_value());
    EXPECT_NEAR(*curve[k].x, x, 1e-12);
    EXPECT_NEAR(curve[k].F, oracle::closed_F(x), 1e-3) << x;
    EXPECT_NEAR(curve[k].G, oracle::closed_G(x), 1e-3) << x;
  }
}

TEST(numeric_trade_off_curve, cat_monotone_with_interior_maximum) {
  const auto s = build_cat(1.5, 0.25, default_cat_grid(1.5, 0.25, 1024));
  const double phi = 0.8;
  std::vector<double> vars;
  for (int k = 0; k <= 16; ++k) {
    const double width = 0.05 * std::pow(10.0, 2.0 * k / 16.0);  // two decades of filter width
    const double sp = width * std::tan(phi);
    vars.push_back(sp * sp);
  }
  const auto curve = numeric_trade_off_curve(s, vars, phi, threads_from_env());
  double best = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    if (k > 0) {
      EXPECT_GE(curve[k].F, curve[k - 1].F - 1e-9) << k;
      EXPECT_LE(curve[k].G, curve[k - 1].G + 1e-9) << k;
    }
    best = std::max(best, curve[k].sum());
  }
  EXPECT_LT(curve.front().sum(), best);
  EXPECT_LT(curve.back().sum(), best);
}

TEST(numeric_trade_off_curve, errors_carry_index) {
  const auto s = gaussian(0.0, 0.25);
  const std::vector<double> vars{0.25, -1.0};
  try {
    numeric_trade_off_curve(s, vars, 0.6);
    FAIL() << "expected qnd::Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("#1"), std::string::npos) << e.what();
  }
}

TEST(optimize_numeric, agrees_with_closed_form) {
  const auto s = gaussian(0.0, 0.25, 1024);
  const auto r = optimize_numeric(s, kQuarterPi, 1e-3, kTradeOffLo, kTradeOffHi, threads_from_env());
  EXPECT_LT(std::abs(r.x_m - oracle::kXm), 0.02);
  EXPECT_NEAR(r.F_at_xm, oracle::kFAtXm, 1e-3);
  EXPECT_NEAR(r.G_at_xm, oracle::kGAtXm, 1e-3);
  EXPECT_LE(std::abs(r.F_at_xe - r.G_at_xe), r.tolerance);
}

TEST(parallel_map, order_and_exceptions) {
  std::vector<int> in(100);
  for (int k = 0; k < 100; ++k) in[static_cast<std::size_t>(k)] = k;
  const auto out = parallel_map(in.size(), 7, [&](std::size_t i) { return in[i] * in[i]; });
  for (int k = 0; k < 100; ++k) EXPECT_EQ(out[static_cast<std::size_t>(k)], k * k);
  try {
    parallel_map(in.size(), 5, [&](std::size_t i) {
      if (in[i] == 13 || in[i] == 71) throw std::runtime_error("bad " + std::to_string(in[i]));
      return in[i];
    });
    FAIL() << "expected exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "bad 13");
  }
}
