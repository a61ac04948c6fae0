#include "l1qr/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace l1qr {

QuantileIndex::QuantileIndex(double u) : u_(u) {
  if (!(u > 0.0 && u < 1.0)) {
    std::ostringstream msg;
    msg << "quantile index must lie in (0,1), got " << u;
    throw InvalidArgument(msg.str());
  }
}

QuantileGrid::QuantileGrid(std::vector<double> points)
    : QuantileGrid(points, points.empty() ? 0.5 : points.front(),
                   points.empty() ? 0.5 : points.back()) {}

QuantileGrid::QuantileGrid(std::vector<double> points, double lo, double hi) : lo_(lo), hi_(hi) {
  if (points.empty()) throw InvalidArgument("quantile grid must be nonempty");
  QuantileIndex lo_check(lo), hi_check(hi);
  (void)lo_check;
  (void)hi_check;
  if (lo > hi) throw InvalidArgument("quantile grid: lo > hi");
  points_.reserve(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (k > 0 && !(points[k] > points[k - 1])) {
      throw InvalidArgument("quantile grid points must be strictly increasing");
    }
    if (points[k] < lo || points[k] > hi) {
      throw InvalidArgument("quantile grid point outside [lo, hi]");
    }
    points_.emplace_back(points[k]);
  }
}

Dataset build_dataset(Matrix raw, Vector y, std::optional<Index> intercept_col) {
  if (raw.rows() < 1 || raw.cols() < 1) throw InvalidArgument("dataset needs n >= 1 and p >= 1");
  if (raw.rows() != y.size()) {
    std::ostringstream msg;
    msg << "dimension mismatch: X has " << raw.rows() << " rows but y has " << y.size();
    throw InvalidArgument(msg.str());
  }
  if (!raw.allFinite() || !y.allFinite()) throw InvalidArgument("non-finite entry in dataset");
  if (intercept_col && (*intercept_col < 0 || *intercept_col >= raw.cols())) {
    throw InvalidArgument("intercept column index out of range");
  }

  Dataset d;
  d.col_scales_ = (raw.colwise().squaredNorm() / static_cast<double>(raw.rows())).cwiseSqrt().transpose();
  for (Index j = 0; j < raw.cols(); ++j) {
    if (!(d.col_scales_[j] > 0.0)) {
      std::ostringstream msg;
      msg << "column " << j << " is identically zero";
      throw InvalidArgument(msg.str());
    }
  }
  d.X_ = std::move(raw);
  d.y_ = std::move(y);
  d.intercept_col_ = intercept_col;
  return d;
}

double check_loss(QuantileIndex u, double t) {
  return t > 0.0 ? u.value() * t : (u.value() - 1.0) * t;
}

Vector penalty_weights(const Dataset& d, QuantileIndex u, double lambda, const PenaltyOptions& opts) {
  if (!(lambda >= 0.0)) throw InvalidArgument("penalty level must be nonnegative");
  Vector w = (lambda * std::sqrt(u.spread())) * d.col_scales();
  if (opts.exempt_intercept && d.intercept_col()) w[*d.intercept_col()] = 0.0;
  return w;
}

double qr_objective(const Dataset& d, QuantileIndex u, const Vector& b) {
  if (b.size() != d.p()) throw InvalidArgument("coefficient length does not match dataset p");
  const Vector r = d.y() - d.X() * b;
  double sum = 0.0;
  for (Index i = 0; i < r.size(); ++i) sum += check_loss(u, r[i]);
  return sum / static_cast<double>(d.n());
}

double penalized_objective(const Dataset& d, QuantileIndex u, double lambda, const Coefficients& b,
                           const PenaltyOptions& opts) {
  const Vector w = penalty_weights(d, u, lambda, opts);
  const double penalty = w.dot(b.beta.cwiseAbs()) / static_cast<double>(d.n());
  return qr_objective(d, u, b.beta) + penalty;
}

IndexSet nonzero_indices(const Vector& v, double tol) {
  IndexSet out;
  for (Index j = 0; j < v.size(); ++j) {
    if (std::abs(v[j]) > tol) out.push_back(j);
  }
  return out;
}

}  // namespace l1qr
