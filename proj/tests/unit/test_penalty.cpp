#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "binomial.hpp"
#include "instances.hpp"
#include "l1qr/penalty.hpp"
#include "l1qr/rng.hpp"

namespace l1qr {
namespace {

using testing::gaussian_instance;

TEST(BinomialOracle, SmallCases) {
  // n = 2: |2 - 2B| is 0 w.p. 1/2 and 2 w.p. 1/2.
  EXPECT_EQ(testing::abs_centered_binomial_quantile(2, 0.5), 0);
  EXPECT_EQ(testing::abs_centered_binomial_quantile(2, 0.6), 2);
  EXPECT_EQ(testing::abs_centered_binomial_quantile(100, 0.9), 16);
}

TEST(SimulatePivotalLambda, InterceptOnlyIsCenteredBinomial) {
  const Dataset d = build_dataset(Matrix::Ones(100, 1), Vector::Zero(100));
  const auto draws = simulate_pivotal_lambda(d, QuantileGrid::single(0.5), 50'000, 2024, 1);
  for (double v : draws) {
    ASSERT_NEAR(v, std::round(v), 1e-9);
    ASSERT_EQ(static_cast<long>(std::round(v)) % 2, 0);
  }
  const double q = penalty_level(draws, 0.1, 1.0);
  EXPECT_NEAR(q, testing::abs_centered_binomial_quantile(100, 0.9), 2.0);
}

TEST(SimulatePivotalLambda, ColumnScaleInvariance) {
  const Dataset d = gaussian_instance(40, 5, 3);
  Philox4x32 rng(3, 9);
  Matrix X = d.X();
  for (Index j = 0; j < 5; ++j) X.col(j) *= 0.01 + 100.0 * rng.uniform();
  const Dataset scaled = build_dataset(X, d.y());
  for (const QuantileGrid& g : {QuantileGrid::single(0.5), QuantileGrid({0.2, 0.8})}) {
    const auto a = simulate_pivotal_lambda(d, g, 200, 77, 1);
    const auto b = simulate_pivotal_lambda(scaled, g, 200, 77, 1);
    for (std::size_t r = 0; r < a.size(); ++r) EXPECT_NEAR(a[r], b[r], 1e-10 * (1 + a[r]));
  }
}

TEST(SimulatePivotalLambda, SupersetGridDominates) {
  const Dataset d = gaussian_instance(60, 8, 4);
  const auto small = simulate_pivotal_lambda(d, QuantileGrid::single(0.5), 300, 5, 1);
  const auto large = simulate_pivotal_lambda(d, QuantileGrid({0.25, 0.5, 0.75}), 300, 5, 1);
  for (std::size_t r = 0; r < small.size(); ++r) EXPECT_GE(large[r], small[r] - 1e-12 * (1 + small[r]));
}

TEST(SimulatePivotalLambda, NeverReadsResponse) {
  const Dataset d = gaussian_instance(30, 4, 6);
  const Dataset other = build_dataset(d.X(), Vector::Constant(30, 123.0));
  EXPECT_EQ(simulate_pivotal_lambda(d, QuantileGrid({0.1, 0.9}), 50, 1, 1),
            simulate_pivotal_lambda(other, QuantileGrid({0.1, 0.9}), 50, 1, 1));
}

TEST(SimulatePivotalLambda, ThreadCountDoesNotMatter) {
  const Dataset d = gaussian_instance(50, 20, 7);
  for (const QuantileGrid& g : {QuantileGrid::single(0.3), QuantileGrid({0.1, 0.5, 0.9})}) {
    EXPECT_EQ(simulate_pivotal_lambda(d, g, 130, 8, 1), simulate_pivotal_lambda(d, g, 130, 8, 4));
  }
}

// Direct evaluation of the statistic at the same candidate points, without
// the sorted sweep.
double brute_force_draw(const Dataset& d, const std::vector<double>& u, double lo, double hi,
                        const std::vector<double>& grid_pts) {
  std::vector<std::pair<double, bool>> cands;
  for (double t : grid_pts) cands.emplace_back(t, true);
  for (int k = 1; k <= 99; ++k) {
    if (k / 100.0 >= lo && k / 100.0 <= hi) cands.emplace_back(k / 100.0, true);
  }
  for (double ui : u) {
    if (ui >= lo && ui <= hi) {
      cands.emplace_back(ui, true);
      cands.emplace_back(ui, false);
    }
  }
  double best = 0.0;
  for (const auto& [t, inclusive] : cands) {
    for (Index j = 0; j < d.p(); ++j) {
      double s = 0.0;
      for (Index i = 0; i < d.n(); ++i) {
        const bool below = inclusive ? u[static_cast<std::size_t>(i)] <= t : u[static_cast<std::size_t>(i)] < t;
        s += d.X()(i, j) * (t - (below ? 1.0 : 0.0));
      }
      best = std::max(best, std::abs(s) / (d.col_scales()[j] * std::sqrt(t * (1 - t))));
    }
  }
  return best;
}

TEST(SimulatePivotalLambda, SweepMatchesDirectEvaluation) {
  const Dataset d = gaussian_instance(25, 3, 10, true);
  const QuantileGrid g({0.15, 0.4, 0.77}, 0.12, 0.81);
  const auto draws = simulate_pivotal_lambda(d, g, 20, 11, 1);
  for (std::size_t r = 0; r < draws.size(); ++r) {
    Philox4x32 rng(11, r);
    std::vector<double> u(25);
    for (auto& v : u) v = rng.uniform();
    EXPECT_NEAR(draws[r], brute_force_draw(d, u, 0.12, 0.81, {0.15, 0.4, 0.77}), 1e-10);
  }
}

TEST(SimulatePivotalLambda, RejectsZeroDraws) {
  const Dataset d = gaussian_instance(10, 2, 1);
  EXPECT_THROW(simulate_pivotal_lambda(d, QuantileGrid::single(0.5), 0, 1), InvalidArgument);
}

TEST(SimulatePivotalLambda, ScalingLawBand) {
  std::vector<double> ratios;
  for (Index n : {50, 100, 200}) {
    for (Index p : {50, 200, 800}) {
      const Dataset d = gaussian_instance(n, p, static_cast<std::uint64_t>(n * 10'000 + p));
      const QuantileGrid g = QuantileGrid::single(0.5);
      const auto draws = simulate_pivotal_lambda(d, g, 200, 12, 1);
      ratios.push_back(penalty_level(draws, 0.1, 1.0) / theoretical_scale(n, p, g));
    }
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LE(*hi / *lo, 3.0);
}

TEST(PenaltyLevel, Examples) {
  const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_DOUBLE_EQ(penalty_level(s, 0.1, 1.0), 9.0);
  EXPECT_DOUBLE_EQ(penalty_level(s, 0.1, 2.0), 18.0);
  EXPECT_GE(penalty_level(s, 0.1, 1.0), penalty_level(s, 0.5, 1.0));
  EXPECT_DOUBLE_EQ(penalty_level(s, 0.5, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(penalty_level(std::vector<double>{3.5}, 0.9, 1.0), 3.5);
}

TEST(PenaltyLevel, OrderInsensitiveAndValidated) {
  const std::vector<double> s{10, 1, 9, 2, 8, 3, 7, 4, 6, 5};
  EXPECT_DOUBLE_EQ(penalty_level(s, 0.1, 1.0), 9.0);
  EXPECT_THROW(penalty_level(std::vector<double>{}, 0.1, 1.0), InvalidArgument);
  EXPECT_THROW(penalty_level(s, 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(penalty_level(s, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(penalty_level(s, 0.1, 0.0), InvalidArgument);
}

TEST(TheoreticalScale, Examples) {
  EXPECT_NEAR(theoretical_scale(100, 100, QuantileGrid::single(0.5)), 42.919, 1e-3);
  const QuantileGrid wide({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  EXPECT_NEAR(theoretical_scale(100, 100, wide) / std::sqrt(100 * std::log(100.0)), 1.0 / 0.3, 1e-12);
  EXPECT_DOUBLE_EQ(theoretical_scale(400, 50, wide) / theoretical_scale(100, 50, wide), 2.0);
  EXPECT_THROW(theoretical_scale(1, 10, wide), InvalidArgument);
}

TEST(CalibratePenalty, RecordsSamplesAndLevel) {
  const Dataset d = gaussian_instance(100, 50, 13);
  const auto cal = calibrate_penalty(d, QuantileGrid({0.1, 0.9}, 0.1, 0.9), 0.1, 2.0, 1000, 42, 1);
  EXPECT_EQ(cal.lambda_samples.size(), 1000u);
  EXPECT_GT(cal.lambda0, 0.0);
  EXPECT_DOUBLE_EQ(cal.lambda0, penalty_level(cal.lambda_samples, 0.1, 2.0));
  const auto again = calibrate_penalty(d, QuantileGrid({0.1, 0.9}, 0.1, 0.9), 0.1, 2.0, 1000, 42, 3);
  EXPECT_EQ(cal.lambda_samples, again.lambda_samples);
}

}  // namespace
}  // namespace l1qr
