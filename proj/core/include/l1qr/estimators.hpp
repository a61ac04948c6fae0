#pragma once

#include <optional>
#include <vector>

#include "l1qr/lp_solver.hpp"

namespace l1qr {

struct ProcessFit {
  QuantileGrid grid = QuantileGrid::single(0.5);
  // One fit per grid point, in grid order.
  std::vector<QuantileFit> fits;
  double lambda = 0.0;
  IndexSet union_support;
  // sup_u |T_u|
  Index max_support_size = 0;

  const QuantileFit& at(QuantileIndex u) const;
};

// l1-QR at every grid point with the common lambda (the per-u level is
// lambda sqrt(u(1-u)) inside the solver). Solver errors are rethrown with
// the offending u in the message.
ProcessFit fit_l1_qr_process(const Dataset& d, const QuantileGrid& grid, double lambda,
                             const SolverOptions& opts = {}, std::size_t threads = 1);

struct PostOptions {
  // Add the dataset's intercept column to the refit model, even when the
  // first stage selected nothing.
  bool always_keep_intercept = false;
  SolverOptions solver;
};

struct PostFit {
  QuantileIndex u{0.5};
  IndexSet selected;
  Coefficients beta_post;
  // First-stage fit the selection came from.
  QuantileFit first_stage;
  // The first stage selected no column.
  bool empty_model = false;
};

// Unpenalized QR refit restricted to the support of `first`.
PostFit post_l1_qr(const Dataset& d, QuantileIndex u, const QuantileFit& first, const PostOptions& opts = {});

// beta_j 1{|beta_j| > gamma}
Coefficients hard_threshold(const Coefficients& beta, double gamma);
inline Coefficients hard_threshold(const QuantileFit& fit, double gamma) { return hard_threshold(fit.beta, gamma); }

// (lambda0 / 1, lambda0 / 2, ..., lambda0 / K)
std::vector<double> lambda_path(double lambda0, int K);

struct PathPoint {
  double lambda = 0.0;
  IndexSet support;
  Coefficients beta;
  Coefficients post_beta;
};

// Penalized fit and post-selection refit at each lambda, in input order.
// Supports along a decreasing path are not guaranteed to be nested.
std::vector<PathPoint> selection_path(const Dataset& d, QuantileIndex u, const std::vector<double>& lambdas,
                                      const PostOptions& opts = {});

}  // namespace l1qr
