#include "l1qr/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "l1qr/rng.hpp"

namespace l1qr {

double gap_tolerance(double primal_objective) { return 1e-8 * (1.0 + std::abs(primal_objective)); }

double support_tolerance(const Vector& beta) {
  const double inf_norm = beta.size() > 0 ? beta.cwiseAbs().maxCoeff() : 0.0;
  return 1e-8 * std::max(1.0, inf_norm);
}

double residual_tolerance(double y_i) { return 1e-9 * (1.0 + std::abs(y_i)); }

namespace {

constexpr double kOptimalityTol = 1e-10;
constexpr double kPivotTol = 1e-9;

// Primal simplex on
//   min  u 1'xi+ + (1-u) 1'xi- + w'(beta+ + beta-)
//   s.t. xi+ - xi- + X_S (beta+ - beta-) = y,  all variables >= 0,
// i.e. n times the penalized objective, over the columns S. Variables are
// numbered xi+ [0,n), xi- [n,2n), beta+ [2n,2n+m), beta- [2n+m,2n+2m).
// The simplex multipliers are the rank scores a_i directly.
class QrSimplex {
 public:
  enum class Status { optimal, pivot_limit };

  QrSimplex(Matrix X_cols, const Vector& y, Vector w, double u, const SolverOptions& opts)
      : X_(std::move(X_cols)),
        y_(y),
        w_(std::move(w)),
        u_(u),
        n_(y.size()),
        m_(X_.cols()),
        opts_(opts),
        col_norm2_(X_.colwise().squaredNorm().transpose()),
        position_(2 * (n_ + m_), -1),
        basis_(n_) {
    // All-residual starting basis: beta = 0 is feasible.
    for (Index i = 0; i < n_; ++i) basis_[i] = y_[i] >= 0.0 ? i : n_ + i;
    for (Index r = 0; r < n_; ++r) position_[basis_[r]] = r;
    refactor();
  }

  Status run(std::size_t max_pivots) {
    int degenerate_run = 0;
    bool bland = false;
    int since_refactor = 0;
    Vector alpha(n_);

    while (true) {
      const Vector pi = multipliers();
      const Vector g = X_.transpose() * pi;
      const Index entering = choose_entering(pi, g, bland);
      if (entering < 0) {
        if (since_refactor == 0) return Status::optimal;
        refactor();
        since_refactor = 0;
        continue;
      }
      if (pivots_ >= max_pivots) return Status::pivot_limit;

      column_image(entering, alpha);
      const Index leave = choose_leaving(alpha, bland);
      if (leave < 0) throw NumericalError("simplex: unbounded direction in a bounded program");

      const double theta = std::max(x_b_[leave], 0.0) / alpha[leave];
      pivot(entering, leave, alpha, theta);
      ++pivots_;

      if (theta <= 1e-12 * (1.0 + std::abs(x_b_[leave]))) {
        if (++degenerate_run >= opts_.bland_after_degenerate) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      if (++since_refactor >= opts_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  std::size_t pivots() const { return pivots_; }

  // beta over the m columns.
  Vector beta() const {
    Vector b = Vector::Zero(m_);
    for (Index r = 0; r < n_; ++r) {
      const Index v = basis_[r];
      const double x = std::max(x_b_[r], 0.0);
      if (v >= 2 * n_ && v < 2 * n_ + m_) b[v - 2 * n_] += x;
      if (v >= 2 * n_ + m_) b[v - 2 * n_ - m_] -= x;
    }
    return b;
  }

  // Rank scores, snapped to the bound pinned by a basic residual and clipped
  // to the box.
  Vector rank_scores() const {
    Vector a = multipliers();
    for (Index i = 0; i < n_; ++i) {
      if (position_[i] >= 0) a[i] = u_;
      if (position_[n_ + i] >= 0) a[i] = u_ - 1.0;
      a[i] = std::clamp(a[i], u_ - 1.0, u_);
    }
    return a;
  }

  bool is_basic(Index v) const { return position_[v] >= 0; }
  Index n() const { return n_; }
  Index m() const { return m_; }

 private:
  double cost(Index v) const {
    if (v < n_) return u_;
    if (v < 2 * n_) return 1.0 - u_;
    if (v < 2 * n_ + m_) return w_[v - 2 * n_];
    return w_[v - 2 * n_ - m_];
  }

  double squared_norm(Index v) const {
    if (v < 2 * n_) return 1.0;
    return col_norm2_[(v - 2 * n_) % m_];
  }

  Vector multipliers() const {
    Vector c_b(n_);
    for (Index r = 0; r < n_; ++r) c_b[r] = cost(basis_[r]);
    return binv_.transpose() * c_b;
  }

  double reduced_cost(Index v, const Vector& pi, const Vector& g) const {
    if (v < n_) return u_ - pi[v];
    if (v < 2 * n_) return 1.0 - u_ + pi[v - n_];
    if (v < 2 * n_ + m_) return w_[v - 2 * n_] - g[v - 2 * n_];
    return w_[v - 2 * n_ - m_] + g[v - 2 * n_ - m_];
  }

  // Normalized Dantzig pricing (d_v^2 / |A_v|^2, a cheap steepest-edge
  // proxy) or, in Bland mode, the lowest eligible index.
  Index choose_entering(const Vector& pi, const Vector& g, bool bland) const {
    Index best = -1;
    double best_score = 0.0;
    const Index total = 2 * (n_ + m_);
    for (Index v = 0; v < total; ++v) {
      if (position_[v] >= 0) continue;
      const double d = reduced_cost(v, pi, g);
      if (d >= -kOptimalityTol * (1.0 + cost(v))) continue;
      if (bland) return v;
      const double score = d * d / squared_norm(v);
      if (score > best_score) {
        best_score = score;
        best = v;
      }
    }
    return best;
  }

  void column_image(Index v, Vector& alpha) const {
    if (v < n_) {
      alpha = binv_.col(v);
    } else if (v < 2 * n_) {
      alpha = -binv_.col(v - n_);
    } else if (v < 2 * n_ + m_) {
      alpha.noalias() = binv_ * X_.col(v - 2 * n_);
    } else {
      alpha.noalias() = -(binv_ * X_.col(v - 2 * n_ - m_));
    }
  }

  // Minimum ratio; ties go to the largest pivot element (or to the lowest
  // variable index under Bland's rule), then to the lowest row.
  Index choose_leaving(const Vector& alpha, bool bland) const {
    Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    const double tol = kPivotTol * std::max(1.0, alpha.cwiseAbs().maxCoeff());
    for (Index r = 0; r < n_; ++r) {
      if (alpha[r] <= tol) continue;
      const double ratio = std::max(x_b_[r], 0.0) / alpha[r];
      if (leave < 0 || ratio < best_ratio - 1e-13 * (1.0 + best_ratio)) {
        leave = r;
        best_ratio = ratio;
        continue;
      }
      if (ratio <= best_ratio + 1e-13 * (1.0 + best_ratio)) {
        const bool better = bland ? basis_[r] < basis_[leave] : alpha[r] > alpha[leave];
        if (better) {
          leave = r;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
    }
    return leave;
  }

  void pivot(Index entering, Index leave, const Vector& alpha, double theta) {
    x_b_.noalias() -= theta * alpha;
    x_b_[leave] = theta;

    const Eigen::RowVectorXd pivot_row = binv_.row(leave) / alpha[leave];
    binv_.noalias() -= alpha * pivot_row;
    binv_.row(leave) = pivot_row;

    position_[basis_[leave]] = -1;
    basis_[leave] = entering;
    position_[entering] = leave;
  }

  void refactor() {
    Matrix B = Matrix::Zero(n_, n_);
    for (Index r = 0; r < n_; ++r) {
      const Index v = basis_[r];
      if (v < n_) {
        B(v, r) = 1.0;
      } else if (v < 2 * n_) {
        B(v - n_, r) = -1.0;
      } else if (v < 2 * n_ + m_) {
        B.col(r) = X_.col(v - 2 * n_);
      } else {
        B.col(r) = -X_.col(v - 2 * n_ - m_);
      }
    }
    Eigen::PartialPivLU<Matrix> lu(B);
    if (!(lu.rcond() > 1e-14)) throw NumericalError("simplex: basis matrix became singular");
    binv_ = lu.inverse();
    x_b_ = binv_ * y_;
  }

  Matrix X_;
  Vector y_;
  Vector w_;
  double u_;
  Index n_;
  Index m_;
  SolverOptions opts_;
  Vector col_norm2_;

  std::vector<Index> position_;  // row of a basic variable, -1 if nonbasic
  std::vector<Index> basis_;
  Matrix binv_;
  Vector x_b_;
  std::size_t pivots_ = 0;
};

IndexSet validated_restrict(const std::optional<IndexSet>& restrict, Index p) {
  if (!restrict) {
    IndexSet all(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) all[static_cast<std::size_t>(j)] = j;
    return all;
  }
  IndexSet cols = *restrict;
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  for (Index j : cols) {
    if (j < 0 || j >= p) {
      std::ostringstream msg;
      msg << "restricted column " << j << " outside [0, " << p << ")";
      throw InvalidArgument(msg.str());
    }
  }
  return cols;
}

}  // namespace

QuantileFit solve_qr_lp(const Dataset& d, QuantileIndex u, double lambda,
                        const std::optional<IndexSet>& restrict, const SolverOptions& opts) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("penalty level must be finite and >= 0");
  const Index n = d.n();
  const Index p = d.p();
  const IndexSet cols = validated_restrict(restrict, p);
  const Index m = static_cast<Index>(cols.size());

  const Vector weights = penalty_weights(d, u, lambda, opts.penalty);
  Matrix X_cols(n, m);
  Vector w_cols(m);
  for (Index k = 0; k < m; ++k) {
    X_cols.col(k) = d.X().col(cols[static_cast<std::size_t>(k)]);
    w_cols[k] = weights[cols[static_cast<std::size_t>(k)]];
  }

  const std::size_t max_pivots =
      opts.max_pivots > 0 ? opts.max_pivots : static_cast<std::size_t>(50 * (n + p));

  QrSimplex simplex(X_cols, d.y(), w_cols, u.value(), opts);
  bool perturbed = false;
  std::size_t total_pivots = 0;
  if (simplex.run(max_pivots) == QrSimplex::Status::pivot_limit) {
    total_pivots += simplex.pivots();
    if (!opts.allow_perturbation) throw NumericalError("simplex: pivot limit exceeded");
    Vector y_perturbed = d.y();
    Philox4x32 rng(opts.perturbation_seed, 0);
    for (Index i = 0; i < n; ++i) {
      const double sign = (rng() & 1u) ? 1.0 : -1.0;
      y_perturbed[i] += sign * 1e-10 * (1.0 + std::abs(y_perturbed[i]));
    }
    simplex = QrSimplex(X_cols, y_perturbed, w_cols, u.value(), opts);
    perturbed = true;
    if (simplex.run(max_pivots) == QrSimplex::Status::pivot_limit) {
      throw NumericalError("simplex: pivot limit exceeded after perturbation restart");
    }
  }
  total_pivots += simplex.pivots();

  QuantileFit fit;
  fit.u = u;
  fit.lambda = lambda;
  fit.beta.beta = Vector::Zero(p);
  const Vector beta_cols = simplex.beta();
  for (Index k = 0; k < m; ++k) fit.beta.beta[cols[static_cast<std::size_t>(k)]] = beta_cols[k];
  fit.dual_scores = simplex.rank_scores();
  fit.support = nonzero_indices(fit.beta.beta, support_tolerance(fit.beta.beta));
  fit.primal_objective = penalized_objective(d, u, lambda, fit.beta, opts.penalty);
  fit.dual_objective = d.y().dot(fit.dual_scores) / static_cast<double>(n);

  const Vector residuals = d.y() - d.X() * fit.beta.beta;
  for (Index i = 0; i < n; ++i) {
    if (std::abs(residuals[i]) <= residual_tolerance(d.y()[i])) ++fit.n_interpolated;
  }

  fit.basis_status.assign(static_cast<std::size_t>(n + p), BasisStatus::basic);
  for (Index i = 0; i < n; ++i) {
    if (simplex.is_basic(i)) fit.basis_status[static_cast<std::size_t>(i)] = BasisStatus::nonbasic_upper;
    if (simplex.is_basic(n + i)) fit.basis_status[static_cast<std::size_t>(i)] = BasisStatus::nonbasic_lower;
  }
  for (Index k = 0; k < m; ++k) {
    const auto slot = static_cast<std::size_t>(n + cols[static_cast<std::size_t>(k)]);
    if (simplex.is_basic(2 * n + k)) fit.basis_status[slot] = BasisStatus::nonbasic_upper;
    if (simplex.is_basic(2 * n + m + k)) fit.basis_status[slot] = BasisStatus::nonbasic_lower;
  }

  fit.restrict = restrict ? std::optional<IndexSet>(cols) : std::nullopt;
  fit.penalty = opts.penalty;
  fit.weights = weights;
  fit.pivots = total_pivots;
  fit.perturbed = perturbed;
  return fit;
}

OptimalityReport verify_optimality(const QuantileFit& fit, const Dataset& d) {
  OptimalityReport report;
  const double u = fit.u.value();
  const Index n = d.n();
  const Vector& a = fit.dual_scores;
  const Vector& beta = fit.beta.beta;

  const PenaltyOptions& penalty = fit.penalty;
  const double primal = penalized_objective(d, fit.u, fit.lambda, fit.beta, penalty);
  const double dual = d.y().dot(a) / static_cast<double>(n);
  report.duality_gap = primal - dual;

  for (Index i = 0; i < n; ++i) {
    report.max_dual_box_violation =
        std::max({report.max_dual_box_violation, a[i] - u, (u - 1.0) - a[i]});
  }

  const Vector weights = penalty_weights(d, fit.u, fit.lambda, penalty);
  const IndexSet cols = validated_restrict(fit.restrict, d.p());
  const double beta_tol = support_tolerance(beta);
  for (Index j : cols) {
    CoefficientCheck check;
    check.column = j;
    check.beta = beta[j];
    check.correlation = d.X().col(j).dot(a);
    check.bound = weights[j];
    const double slack = kSlackTolerance * (1.0 + check.bound);
    report.max_dual_constraint_violation =
        std::max(report.max_dual_constraint_violation,
                 (std::abs(check.correlation) - check.bound) / static_cast<double>(n));
    if (std::abs(check.correlation - check.bound) <= slack) check.active_sign = 1;
    if (std::abs(check.correlation + check.bound) <= slack) check.active_sign = check.bound > 0.0 ? -1 : 1;

    if (beta[j] > beta_tol) {
      check.consistent = std::abs(check.correlation - check.bound) <= slack;
    } else if (beta[j] < -beta_tol) {
      check.consistent = std::abs(check.correlation + check.bound) <= slack;
    } else if (check.bound > 0.0 && std::abs(std::abs(check.correlation) - check.bound) <= slack) {
      report.degenerate_active.push_back(j);
    }
    if (!check.consistent) report.complementary_slackness_ok = false;
    report.details.push_back(check);
  }

  const Vector residuals = d.y() - d.X() * beta;
  for (Index i = 0; i < n; ++i) {
    const double tol = residual_tolerance(d.y()[i]);
    const bool bad = (residuals[i] > tol && std::abs(a[i] - u) > kSlackTolerance) ||
                     (residuals[i] < -tol && std::abs(a[i] - (u - 1.0)) > kSlackTolerance);
    if (bad) {
      report.residual_violations.push_back(i);
      report.complementary_slackness_ok = false;
    }
  }
  return report;
}

}  // namespace l1qr
