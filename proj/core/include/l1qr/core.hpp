#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace l1qr {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Sorted, duplicate-free list of column (or row) indices, 0-based.
using IndexSet = std::vector<Index>;

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: mismatched dimensions, out-of-range parameters, malformed data.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The numerics broke down (iteration cap, singular basis, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A quantile index u, strictly inside (0, 1).
class QuantileIndex {
 public:
  explicit QuantileIndex(double u);

  double value() const { return u_; }
  // u(1-u), the variance of the rank-score u - 1{U <= u}.
  double spread() const { return u_ * (1.0 - u_); }

  friend bool operator==(QuantileIndex a, QuantileIndex b) { return a.u_ == b.u_; }
  friend auto operator<=>(QuantileIndex a, QuantileIndex b) { return a.u_ <=> b.u_; }

 private:
  double u_;
};

// Strictly increasing quantile indices inside the compact set [lo, hi].
class QuantileGrid {
 public:
  // lo/hi default to the smallest and largest point.
  explicit QuantileGrid(std::vector<double> points);
  QuantileGrid(std::vector<double> points, double lo, double hi);

  static QuantileGrid single(double u) { return QuantileGrid({u}); }

  const std::vector<QuantileIndex>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  std::vector<QuantileIndex> points_;
  double lo_;
  double hi_;
};

struct Coefficients {
  Vector beta;

  Index size() const { return beta.size(); }
  double operator[](Index j) const { return beta[j]; }
};

// The sample consumed by every estimator. X is kept unscaled; the column
// scales sigma_j = sqrt(E_n[x_ij^2]) enter only through penalty weights.
class Dataset {
 public:
  const Vector& y() const { return y_; }
  const Matrix& X() const { return X_; }
  const Vector& col_scales() const { return col_scales_; }
  std::optional<Index> intercept_col() const { return intercept_col_; }

  Index n() const { return X_.rows(); }
  Index p() const { return X_.cols(); }

 private:
  friend Dataset build_dataset(Matrix raw, Vector y, std::optional<Index> intercept_col);

  Matrix X_;
  Vector y_;
  Vector col_scales_;
  std::optional<Index> intercept_col_;
};

// Throws InvalidArgument on dimension mismatch, non-finite entries, or an
// identically zero column.
Dataset build_dataset(Matrix raw, Vector y, std::optional<Index> intercept_col = std::nullopt);

struct PenaltyOptions {
  // Drop the flagged intercept column from the l1 penalty.
  bool exempt_intercept = false;
};

// rho_u(t) = (u - 1{t <= 0}) t
double check_loss(QuantileIndex u, double t);

// Per-column penalty weights lambda * sqrt(u(1-u)) * sigma_j (zero for an
// exempt intercept). These are the bounds on |sum_i x_ij a_i| in the dual.
Vector penalty_weights(const Dataset& d, QuantileIndex u, double lambda,
                       const PenaltyOptions& opts = {});

// E_n[rho_u(y_i - x_i'b)]
double qr_objective(const Dataset& d, QuantileIndex u, const Vector& b);

// E_n[rho_u(y_i - x_i'b)] + (lambda sqrt(u(1-u)) / n) sum_j sigma_j |b_j|
double penalized_objective(const Dataset& d, QuantileIndex u, double lambda,
                           const Coefficients& b, const PenaltyOptions& opts = {});

// Indices j with |v_j| > tol.
IndexSet nonzero_indices(const Vector& v, double tol);

}  // namespace l1qr
