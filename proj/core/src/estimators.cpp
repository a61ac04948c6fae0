#include "l1qr/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "l1qr/parallel.hpp"

namespace l1qr {

const QuantileFit& ProcessFit::at(QuantileIndex u) const {
  for (const auto& f : fits) {
    if (f.u == u) return f;
  }
  throw InvalidArgument("quantile index not on the fitted grid");
}

ProcessFit fit_l1_qr_process(const Dataset& d, const QuantileGrid& grid, double lambda, const SolverOptions& opts,
                             std::size_t threads) {
  if (!(lambda >= 0.0)) throw InvalidArgument("penalty level must be nonnegative");
  ProcessFit out;
  out.grid = grid;
  out.lambda = lambda;
  out.fits.resize(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t k) {
    const QuantileIndex u = grid.points()[k];
    try {
      out.fits[k] = solve_qr_lp(d, u, lambda, std::nullopt, opts);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "l1-QR at u=" << u.value() << ": " << e.what();
      throw NumericalError(msg.str());
    }
  });

  for (const auto& f : out.fits) {
    out.union_support.insert(out.union_support.end(), f.support.begin(), f.support.end());
    out.max_support_size = std::max(out.max_support_size, static_cast<Index>(f.support.size()));
  }
  std::sort(out.union_support.begin(), out.union_support.end());
  out.union_support.erase(std::unique(out.union_support.begin(), out.union_support.end()), out.union_support.end());
  return out;
}

PostFit post_l1_qr(const Dataset& d, QuantileIndex u, const QuantileFit& first, const PostOptions& opts) {
  if (first.beta.size() != d.p()) throw InvalidArgument("first-stage fit does not match the dataset");
  PostFit post;
  post.u = u;
  post.first_stage = first;
  post.empty_model = first.support.empty();

  IndexSet model = first.support;
  if (opts.always_keep_intercept && d.intercept_col()) {
    model.push_back(*d.intercept_col());
    std::sort(model.begin(), model.end());
    model.erase(std::unique(model.begin(), model.end()), model.end());
  }
  post.selected = model;

  if (model.empty()) {
    post.beta_post.beta = Vector::Zero(d.p());
    return post;
  }
  post.beta_post = solve_qr_lp(d, u, 0.0, model, opts.solver).beta;
  return post;
}

Coefficients hard_threshold(const Coefficients& beta, double gamma) {
  if (!(gamma >= 0.0)) throw InvalidArgument("threshold must be nonnegative");
  Coefficients out = beta;
  for (Index j = 0; j < out.beta.size(); ++j) {
    if (!(std::abs(out.beta[j]) > gamma)) out.beta[j] = 0.0;
  }
  return out;
}

std::vector<double> lambda_path(double lambda0, int K) {
  if (!(lambda0 > 0.0)) throw InvalidArgument("lambda_path: lambda0 must be positive");
  if (K < 1) throw InvalidArgument("lambda_path: K must be >= 1");
  std::vector<double> path;
  path.reserve(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) path.push_back(lambda0 / k);
  return path;
}

std::vector<PathPoint> selection_path(const Dataset& d, QuantileIndex u, const std::vector<double>& lambdas,
                                      const PostOptions& opts) {
  std::vector<PathPoint> rows;
  rows.reserve(lambdas.size());
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw InvalidArgument("selection_path: lambdas must be positive");
    try {
      const QuantileFit fit = solve_qr_lp(d, u, lambda, std::nullopt, opts.solver);
      const PostFit post = post_l1_qr(d, u, fit, opts);
      rows.push_back(PathPoint{lambda, fit.support, fit.beta, post.beta_post});
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "selection path at lambda=" << lambda << ": " << e.what();
      throw NumericalError(msg.str());
    }
  }
  return rows;
}

}  // namespace l1qr
