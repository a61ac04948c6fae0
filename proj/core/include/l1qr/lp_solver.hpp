#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "l1qr/core.hpp"

namespace l1qr {

// Status of a variable of the bounded dual program
//   max (1/n) y'a  s.t.  |sum_i x_ij a_i| <= w_j,  u-1 <= a_i <= u.
// The first n entries describe the rank scores a_i, the next p entries the
// row activities r_j = sum_i x_ij a_i. A primal basic residual xi+_i (xi-_i)
// pins a_i at its upper (lower) bound; a basic beta+_j (beta-_j) pins r_j at
// +w_j (-w_j).
enum class BasisStatus { basic, nonbasic_lower, nonbasic_upper };

struct SolverOptions {
  PenaltyOptions penalty;
  // 0 selects 50 * (n + p).
  std::size_t max_pivots = 0;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int bland_after_degenerate = 50;
  // Pivots between refactorizations of the basis inverse.
  int refactor_interval = 100;
  // Retry once on a perturbed response after hitting the pivot cap.
  bool allow_perturbation = true;
  std::uint64_t perturbation_seed = 0x9d2c5680u;
};

struct QuantileFit {
  QuantileIndex u{0.5};
  double lambda = 0.0;
  Coefficients beta;
  // Optimal dual rank scores a_i in [u-1, u].
  Vector dual_scores;
  IndexSet support;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  Index n_interpolated = 0;
  std::vector<BasisStatus> basis_status;

  // Columns allowed to be nonzero; nullopt means all p columns.
  std::optional<IndexSet> restrict;
  PenaltyOptions penalty;
  // lambda sqrt(u(1-u)) sigma_j per column, in the units of sum_i x_ij a_i.
  Vector weights;
  std::size_t pivots = 0;
  bool perturbed = false;

  double duality_gap() const { return primal_objective - dual_objective; }
};

// Scale-relative tolerances shared by the solver and its checks.
double gap_tolerance(double primal_objective);
double support_tolerance(const Vector& beta);
double residual_tolerance(double y_i);
inline constexpr double kSlackTolerance = 1e-7;

// Solves the l1-penalized quantile regression LP at (u, lambda) and returns
// an optimal basic feasible solution together with the dual rank scores.
// With `restrict`, coefficients outside the set are fixed at zero (an empty
// set fits the empty model). Throws NumericalError if the pivot cap is hit
// twice (original and perturbed response).
QuantileFit solve_qr_lp(const Dataset& d, QuantileIndex u, double lambda,
                        const std::optional<IndexSet>& restrict = std::nullopt,
                        const SolverOptions& opts = {});

struct CoefficientCheck {
  Index column = 0;
  double beta = 0.0;
  // sum_i x_ij a_i and its bound w_j.
  double correlation = 0.0;
  double bound = 0.0;
  // +1 / -1 if the dual row sits at +w_j / -w_j within slack, else 0.
  int active_sign = 0;
  bool consistent = true;
};

struct OptimalityReport {
  double duality_gap = 0.0;
  double max_dual_box_violation = 0.0;
  // In E_n units: max_j (|E_n[x_ij a_i]| - w_j / n)_+.
  double max_dual_constraint_violation = 0.0;
  bool complementary_slackness_ok = true;
  // Residual sign vs. rank score mismatches (r_i > 0 needs a_i = u, r_i < 0
  // needs a_i = u - 1).
  std::vector<Index> residual_violations;
  // Active dual rows whose coefficient is zero; allowed (degenerate).
  std::vector<Index> degenerate_active;
  std::vector<CoefficientCheck> details;
};

// Recomputes every primal/dual optimality quantity of `fit` from scratch.
OptimalityReport verify_optimality(const QuantileFit& fit, const Dataset& d);

}  // namespace l1qr
