#include "l1qr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace l1qr {
namespace {

void require_psd(const Matrix& M) {
  if (M.rows() != M.cols() || M.rows() == 0) throw InvalidArgument("sparse eigenvalue: matrix must be square");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidArgument("sparse eigenvalue: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw InvalidArgument("sparse eigenvalue: matrix is not positive semidefinite");
  }
}

Matrix principal(const Matrix& M, const IndexSet& idx) {
  const auto k = static_cast<Index>(idx.size());
  Matrix sub(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) sub(a, b) = M(idx[a], idx[b]);
  }
  return sub;
}

double extreme_eigenvalue(const Matrix& sub, bool largest) {
  if (sub.rows() == 1) return sub(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sub, Eigen::EigenvaluesOnly);
  return largest ? eig.eigenvalues().maxCoeff() : eig.eigenvalues().minCoeff();
}

SparseEigenResult exact_extreme(const Matrix& M, Index k, bool largest, std::size_t budget) {
  const Index p = M.rows();
  const std::size_t count = subset_count(p, k);
  if (count > budget) {
    std::ostringstream msg;
    msg << "exact sparse eigenvalue needs C(" << p << "," << k << ") = " << count
        << " submatrices, over the budget of " << budget << "; use greedy mode";
    throw BudgetExceeded(msg.str());
  }
  SparseEigenResult best;
  best.k = k;
  best.mode = EigenMode::exact;
  best.value = largest ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();

  // Lexicographic walk over k-subsets of {0..p-1}.
  IndexSet idx(static_cast<std::size_t>(k));
  for (Index a = 0; a < k; ++a) idx[a] = a;
  while (true) {
    const double v = extreme_eigenvalue(principal(M, idx), largest);
    if (largest ? v > best.value : v < best.value) {
      best.value = v;
      best.subset = idx;
    }
    Index pos = k - 1;
    while (pos >= 0 && idx[pos] == p - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (Index a = pos + 1; a < k; ++a) idx[a] = idx[a - 1] + 1;
  }
  return best;
}

SparseEigenResult greedy_extreme(const Matrix& M, Index k, bool largest) {
  const Index p = M.rows();
  SparseEigenResult res;
  res.k = k;
  res.mode = largest ? EigenMode::greedy_lower_bound : EigenMode::greedy_upper_bound;
  std::vector<bool> used(static_cast<std::size_t>(p), false);
  IndexSet chosen;
  for (Index step = 0; step < k; ++step) {
    Index pick = -1;
    double pick_value = 0.0;
    for (Index j = 0; j < p; ++j) {
      if (used[j]) continue;
      IndexSet trial = chosen;
      trial.push_back(j);
      const double v = extreme_eigenvalue(principal(M, trial), largest);
      if (pick < 0 || (largest ? v > pick_value : v < pick_value)) {
        pick = j;
        pick_value = v;
      }
    }
    used[pick] = true;
    chosen.push_back(pick);
    res.value = pick_value;
  }
  std::sort(chosen.begin(), chosen.end());
  res.subset = chosen;
  return res;
}

SparseEigenResult sparse_extreme(const Matrix& M, Index k, bool greedy, MatrixKind kind, std::size_t budget,
                                 bool largest) {
  require_psd(M);
  if (k < 1 || k > M.rows()) throw InvalidArgument("sparse eigenvalue: k must lie in [1, p]");
  SparseEigenResult res = greedy ? greedy_extreme(M, k, largest) : exact_extreme(M, k, largest, budget);
  res.matrix_kind = kind;
  // Roundoff can push a PSD extreme slightly below zero.
  res.value = std::max(res.value, 0.0);
  return res;
}

}  // namespace

Matrix empirical_gram(const Dataset& d) {
  return (d.X().transpose() * d.X()) / static_cast<double>(d.n());
}

std::size_t subset_count(Index p, Index k) {
  if (k < 0 || k > p) return 0;
  k = std::min(k, p - k);
  // C(p, j) = C(p, j-1) * (p - j + 1) / j stays integral at every step.
  __extension__ using Wide = unsigned __int128;
  Wide c = 1;
  for (Index j = 1; j <= k; ++j) {
    c = c * static_cast<Wide>(p - k + j) / static_cast<Wide>(j);
    if (c > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(c);
}

SparseEigenResult max_sparse_eigenvalue(const Matrix& M, Index k, bool greedy, MatrixKind kind,
                                        std::size_t budget) {
  return sparse_extreme(M, k, greedy, kind, budget, true);
}

SparseEigenResult min_sparse_eigenvalue(const Matrix& M, Index k, bool greedy, MatrixKind kind,
                                        std::size_t budget) {
  return sparse_extreme(M, k, greedy, kind, budget, false);
}

SupportMetrics support_metrics(const Coefficients& beta_est, const IndexSet& truth, double tol) {
  if (!(tol >= 0.0)) throw InvalidArgument("support tolerance must be nonnegative");
  SupportMetrics m;
  m.true_support = truth;
  std::sort(m.true_support.begin(), m.true_support.end());
  m.true_support.erase(std::unique(m.true_support.begin(), m.true_support.end()), m.true_support.end());
  m.est_support = nonzero_indices(beta_est.beta, tol);
  m.n_selected = static_cast<Index>(m.est_support.size());
  IndexSet common;
  std::set_intersection(m.est_support.begin(), m.est_support.end(), m.true_support.begin(), m.true_support.end(),
                        std::back_inserter(common));
  m.n_correct = static_cast<Index>(common.size());
  m.n_wrong = m.n_selected - m.n_correct;
  m.includes_truth = m.n_correct == static_cast<Index>(m.true_support.size());
  m.exact = m.includes_truth && m.n_wrong == 0;
  return m;
}

bool restricted_set_membership(const Coefficients& delta, const IndexSet& truth, double c0, std::optional<Index> n) {
  if (!(c0 > 0.0)) throw InvalidArgument("restricted set: c0 must be positive");
  std::vector<bool> on(static_cast<std::size_t>(delta.size()), false);
  for (Index j : truth) {
    if (j < 0 || j >= delta.size()) throw InvalidArgument("restricted set: truth index out of range");
    on[j] = true;
  }
  double on_l1 = 0.0;
  double off_l1 = 0.0;
  Index off_l0 = 0;
  for (Index j = 0; j < delta.size(); ++j) {
    const double a = std::abs(delta[j]);
    if (on[j]) {
      on_l1 += a;
    } else {
      off_l1 += a;
      if (a > 0.0) ++off_l0;
    }
  }
  if (n && off_l0 > *n) return false;
  return off_l1 <= c0 * on_l1;
}

}  // namespace l1qr
