#pragma once

#include <cstddef>
#include <optional>

#include "l1qr/core.hpp"

namespace l1qr {

// Exact sparse-eigenvalue enumeration refused: C(p, k) over budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

enum class EigenMode {
  exact,
  // Forward selection; a lower bound on the maximal sparse eigenvalue.
  greedy_lower_bound,
  // Forward selection; an upper bound on the minimal sparse eigenvalue.
  greedy_upper_bound,
};

enum class MatrixKind { empirical, supplied };

inline constexpr std::size_t kExactSubsetBudget = 2'000'000;

struct SparseEigenResult {
  Index k = 0;
  double value = 0.0;
  EigenMode mode = EigenMode::exact;
  MatrixKind matrix_kind = MatrixKind::supplied;
  // Principal subset attaining the value.
  IndexSet subset;
};

// E_n[x_i x_i'] = X'X / n
Matrix empirical_gram(const Dataset& d);

// phi_max(k) = sup { d'Md / d'd : ||d||_0 <= k }. `greedy` selects forward
// selection; otherwise exact enumeration of all C(p, k) principal submatrices,
// throwing BudgetExceeded past `budget`. Throws InvalidArgument unless M is
// symmetric PSD within 1e-10.
SparseEigenResult max_sparse_eigenvalue(const Matrix& M, Index k, bool greedy = false,
                                        MatrixKind kind = MatrixKind::supplied,
                                        std::size_t budget = kExactSubsetBudget);

// Minimal counterpart: inf over k-sparse unit vectors.
SparseEigenResult min_sparse_eigenvalue(const Matrix& M, Index k, bool greedy = false,
                                        MatrixKind kind = MatrixKind::supplied,
                                        std::size_t budget = kExactSubsetBudget);

// Number of k-subsets of p items, saturating at SIZE_MAX.
std::size_t subset_count(Index p, Index k);

struct SupportMetrics {
  IndexSet true_support;
  IndexSet est_support;
  Index n_selected = 0;
  Index n_correct = 0;
  // Selected columns outside the true support.
  Index n_wrong = 0;
  bool includes_truth = false;
  bool exact = false;
};

SupportMetrics support_metrics(const Coefficients& beta_est, const IndexSet& truth, double tol);

// delta in A = { ||delta_{T^c}||_1 <= c0 ||delta_T||_1 } and, when n is given,
// ||delta_{T^c}||_0 <= n.
bool restricted_set_membership(const Coefficients& delta, const IndexSet& truth, double c0,
                               std::optional<Index> n = std::nullopt);

}  // namespace l1qr
