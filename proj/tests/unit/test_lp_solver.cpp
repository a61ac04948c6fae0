#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "instances.hpp"
#include "l1qr/lp_solver.hpp"
#include "vertex_oracle.hpp"

namespace l1qr {
namespace {

using testing::gaussian_instance;
using testing::solve_by_vertex_enumeration;

Dataset ones_data(std::vector<double> ys) {
  Vector y = Eigen::Map<Vector>(ys.data(), static_cast<Index>(ys.size()));
  return build_dataset(Matrix::Ones(y.size(), 1), y);
}

TEST(SolveQrLp, MedianOfThree) {
  const Dataset d = ones_data({1, 2, 3});
  const QuantileFit fit = solve_qr_lp(d, QuantileIndex(0.5), 0.0);
  EXPECT_NEAR(fit.beta[0], 2.0, 1e-12);
  EXPECT_NEAR(fit.primal_objective, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(fit.support, IndexSet{0});
}

TEST(SolveQrLp, LargePenaltyGivesZero) {
  const Dataset d = ones_data({1, 2, 3});
  const QuantileFit fit = solve_qr_lp(d, QuantileIndex(0.5), 6.0);
  EXPECT_EQ(fit.beta[0], 0.0);
  EXPECT_NEAR(fit.primal_objective, 1.0, 1e-12);
  EXPECT_TRUE(fit.support.empty());
}

TEST(SolveQrLp, SixByTwoMatchesOracle) {
  const Dataset d = gaussian_instance(6, 2, 6002);
  const QuantileIndex u(0.5);
  const QuantileFit fit = solve_qr_lp(d, u, 1.0);
  const auto oracle = solve_by_vertex_enumeration(d.X(), d.y(), 0.5, penalty_weights(d, u, 1.0));
  EXPECT_NEAR(fit.primal_objective, oracle.optimum, 1e-9);
  EXPECT_NEAR(penalized_objective(d, u, 1.0, fit.beta), oracle.optimum, 1e-9);
}

TEST(SolveQrLp, RejectsBadInput) {
  const Dataset d = ones_data({1, 2, 3});
  EXPECT_THROW(solve_qr_lp(d, QuantileIndex(0.5), -1.0), InvalidArgument);
  EXPECT_THROW(solve_qr_lp(d, QuantileIndex(0.5), 0.0, IndexSet{3}), InvalidArgument);
}

TEST(SolveQrLp, EmptyRestrictFitsEmptyModel) {
  const Dataset d = gaussian_instance(8, 3, 11);
  const QuantileFit fit = solve_qr_lp(d, QuantileIndex(0.3), 0.0, IndexSet{});
  EXPECT_TRUE(fit.support.empty());
  EXPECT_NEAR(fit.primal_objective, qr_objective(d, QuantileIndex(0.3), Vector::Zero(3)), 1e-12);
}

TEST(SolveQrLp, RestrictKeepsOtherColumnsAtZero) {
  const Dataset d = gaussian_instance(30, 6, 12);
  const QuantileFit fit = solve_qr_lp(d, QuantileIndex(0.5), 0.0, IndexSet{1, 4});
  for (Index j : {0, 2, 3, 5}) EXPECT_EQ(fit.beta[j], 0.0);
  EXPECT_LE(fit.duality_gap(), gap_tolerance(fit.primal_objective));
}

TEST(SolveQrLp, ExemptInterceptIsNotShrunk) {
  Vector y(5);
  y << 10, 11, 12, 13, 14;
  const Dataset d = build_dataset(Matrix::Ones(5, 1), y, Index{0});
  SolverOptions opts;
  opts.penalty.exempt_intercept = true;
  const QuantileFit fit = solve_qr_lp(d, QuantileIndex(0.5), 100.0, std::nullopt, opts);
  EXPECT_NEAR(fit.beta[0], 12.0, 1e-10);
}

TEST(SolveQrLp, MatchesSortedQuantileForIntercept) {
  const Dataset d = gaussian_instance(41, 1, 99, true);
  for (double uu : {0.1, 0.25, 0.5, 0.9}) {
    const QuantileFit fit = solve_qr_lp(d, QuantileIndex(uu), 0.0);
    std::vector<double> ys(d.y().data(), d.y().data() + d.n());
    std::sort(ys.begin(), ys.end());
    const auto k = static_cast<std::size_t>(std::ceil(uu * 41.0)) - 1;
    EXPECT_NEAR(fit.beta[0], ys[k], 1e-12) << "u=" << uu;
  }
}

TEST(VerifyOptimality, MedianExampleIsClean) {
  const Dataset d = ones_data({1, 2, 3});
  const QuantileFit fit = solve_qr_lp(d, QuantileIndex(0.5), 0.0);
  const OptimalityReport r = verify_optimality(fit, d);
  EXPECT_LE(std::abs(r.duality_gap), 1e-9);
  EXPECT_LE(r.max_dual_box_violation, 1e-9);
  EXPECT_LE(r.max_dual_constraint_violation, 1e-9);
  EXPECT_TRUE(r.complementary_slackness_ok);
}

TEST(VerifyOptimality, HandBuiltViolation) {
  const Dataset d = ones_data({1, 2, 3});
  QuantileFit fit = solve_qr_lp(d, QuantileIndex(0.5), 0.0);
  fit.dual_scores = Vector::Constant(3, 0.5);  // residual at y=1 is negative
  const OptimalityReport r = verify_optimality(fit, d);
  EXPECT_EQ(r.max_dual_box_violation, 0.0);
  EXPECT_FALSE(r.complementary_slackness_ok);
  EXPECT_FALSE(r.residual_violations.empty());
}

TEST(VerifyOptimality, SignsMatchOracleCertificate) {
  const Dataset d = gaussian_instance(10, 3, 1007);
  const QuantileIndex u(0.5);
  const QuantileFit fit = solve_qr_lp(d, u, 0.7);
  const Vector w = penalty_weights(d, u, 0.7);
  const auto oracle = solve_by_vertex_enumeration(d.X(), d.y(), 0.5, w);
  ASSERT_TRUE(oracle.certificate.has_value());
  const OptimalityReport r = verify_optimality(fit, d);
  EXPECT_TRUE(r.complementary_slackness_ok);
  for (const auto& c : r.details) {
    const double corr = d.X().col(c.column).dot(oracle.certificate->dual);
    if (fit.beta[c.column] > 0) {
      EXPECT_NEAR(corr, w[c.column], 1e-8);
    } else if (fit.beta[c.column] < 0) {
      EXPECT_NEAR(corr, -w[c.column], 1e-8);
    }
    if (c.active_sign != 0 && fit.beta[c.column] != 0) {
      EXPECT_EQ(c.active_sign, fit.beta[c.column] > 0 ? 1 : -1);
    }
  }
  EXPECT_LE((fit.dual_scores - oracle.certificate->dual).lpNorm<Eigen::Infinity>(), 1e-8);
}

class OracleProperty : public ::testing::TestWithParam<int> {};

TEST_P(OracleProperty, ObjectiveAndCertificate) {
  const int seed = GetParam();
  const Index n = 3 + seed % 10;
  const Index p = 1 + (seed / 10) % 4;
  const double lambdas[] = {0.0, 0.3, 1.0, 5.0};
  const double lambda = lambdas[seed % 4];
  const double uu = 0.2 + 0.15 * (seed % 5);
  const Dataset d = gaussian_instance(n, p, 50'000 + static_cast<std::uint64_t>(seed));
  const QuantileIndex u(uu);
  const Vector w = penalty_weights(d, u, lambda);
  const QuantileFit fit = solve_qr_lp(d, u, lambda);
  const auto oracle = solve_by_vertex_enumeration(d.X(), d.y(), uu, w);

  EXPECT_NEAR(fit.primal_objective, oracle.optimum, 1e-8);
  EXPECT_NEAR(penalized_objective(d, u, lambda, fit.beta), oracle.optimum, 1e-8);
  EXPECT_LE(static_cast<Index>(fit.support.size()), std::min(n, p));
  EXPECT_EQ(fit.n_interpolated, static_cast<Index>(fit.support.size()));

  const OptimalityReport r = verify_optimality(fit, d);
  EXPECT_TRUE(r.complementary_slackness_ok);
  EXPECT_LE(r.max_dual_box_violation, 1e-9);
  EXPECT_LE(r.max_dual_constraint_violation, 1e-9);

  ASSERT_TRUE(oracle.certificate.has_value());
  const Vector& a = oracle.certificate->dual;
  for (Index j = 0; j < p; ++j) {
    const double corr = d.X().col(j).dot(a);
    if (fit.beta[j] > 0) EXPECT_NEAR(corr, w[j], 1e-8) << "j=" << j;
    if (fit.beta[j] < 0) EXPECT_NEAR(corr, -w[j], 1e-8) << "j=" << j;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, OracleProperty, ::testing::Range(0, 60));

class InvariantProperty : public ::testing::TestWithParam<int> {};

TEST_P(InvariantProperty, GapBoxSparsityInterpolation) {
  const int seed = GetParam();
  const Index n = 20 + 7 * (seed % 9);
  const Index p = 5 + 37 * (seed % 7);
  const double uu = 0.1 + 0.1 * (seed % 9);
  const Dataset d = testing::sparse_signal_instance(n, p, 3, 70'000 + static_cast<std::uint64_t>(seed));
  const double lambda = (seed % 3 == 0) ? 0.0 : 0.5 * std::sqrt(static_cast<double>(n));
  const QuantileIndex u(uu);
  const QuantileFit fit = solve_qr_lp(d, u, lambda);
  EXPECT_LE(std::abs(fit.duality_gap()), gap_tolerance(fit.primal_objective));
  EXPECT_GE(fit.dual_scores.minCoeff(), uu - 1.0);
  EXPECT_LE(fit.dual_scores.maxCoeff(), uu);
  EXPECT_LE(static_cast<Index>(fit.support.size()), std::min(n, p));
  EXPECT_EQ(fit.n_interpolated, static_cast<Index>(fit.support.size()));
  EXPECT_TRUE(verify_optimality(fit, d).complementary_slackness_ok);
}

INSTANTIATE_TEST_SUITE_P(Seeds, InvariantProperty, ::testing::Range(0, 40));

TEST(SolveQrLp, TiedResponsesStillOptimal) {
  Matrix X(8, 2);
  X.col(0).setOnes();
  X.col(1) << 0, 1, 2, 3, 4, 5, 6, 7;
  Vector y(8);
  y << 1, 1, 1, 1, 2, 2, 2, 2;
  const Dataset d = build_dataset(X, y, Index{0});
  const QuantileIndex u(0.5);
  const QuantileFit fit = solve_qr_lp(d, u, 0.0);
  const auto oracle = solve_by_vertex_enumeration(d.X(), d.y(), 0.5, penalty_weights(d, u, 0.0));
  EXPECT_NEAR(fit.primal_objective, oracle.optimum, 1e-10);
}

TEST(SolveQrLp, TinyPivotCapFallsBackOrThrows) {
  const Dataset d = gaussian_instance(40, 10, 5);
  SolverOptions opts;
  opts.max_pivots = 1;
  EXPECT_THROW(solve_qr_lp(d, QuantileIndex(0.5), 0.0, std::nullopt, opts), NumericalError);
}

TEST(SolveQrLp, BasisStatusLengthAndScoresAtBounds) {
  const Dataset d = gaussian_instance(25, 8, 21);
  const QuantileFit fit = solve_qr_lp(d, QuantileIndex(0.4), 0.5);
  ASSERT_EQ(fit.basis_status.size(), static_cast<std::size_t>(25 + 8));
  for (Index i = 0; i < 25; ++i) {
    const auto s = fit.basis_status[static_cast<std::size_t>(i)];
    if (s == BasisStatus::nonbasic_upper) EXPECT_EQ(fit.dual_scores[i], 0.4);
    if (s == BasisStatus::nonbasic_lower) EXPECT_EQ(fit.dual_scores[i], 0.4 - 1.0);
  }
}

TEST(SolveQrLp, DeterministicAcrossCalls) {
  const Dataset d = gaussian_instance(50, 80, 8);
  const QuantileFit a = solve_qr_lp(d, QuantileIndex(0.5), 2.0);
  const QuantileFit b = solve_qr_lp(d, QuantileIndex(0.5), 2.0);
  EXPECT_EQ(a.beta.beta, b.beta.beta);
  EXPECT_EQ(a.dual_scores, b.dual_scores);
}

}  // namespace
}  // namespace l1qr
