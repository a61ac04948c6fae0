#include "l1qr/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "l1qr/parallel.hpp"
#include "l1qr/rng.hpp"

namespace l1qr {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::size_t kBlockDraws = 64;

Vector draw_uniforms(std::uint64_t seed, std::size_t draw, Index n) {
  Philox4x32 rng(seed, draw);
  Vector u(n);
  for (Index i = 0; i < n; ++i) u[i] = rng.uniform();
  return u;
}

std::vector<double> fixed_evaluation_points(const QuantileGrid& grid) {
  std::vector<double> pts;
  for (const auto& q : grid.points()) pts.push_back(q.value());
  for (int k = 1; k <= 99; ++k) {
    const double t = k / 100.0;
    if (t >= grid.lo() && t <= grid.hi()) pts.push_back(t);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Single evaluation point: Lambda_r = max_j |(Xs' S)_jr| / sqrt(t(1-t)).
void simulate_single_point(const Matrix& Xs, double t, std::uint64_t seed, std::vector<double>& out,
                           std::size_t threads) {
  const Index n = Xs.rows();
  const std::size_t R = out.size();
  const std::size_t blocks = (R + kBlockDraws - 1) / kBlockDraws;
  const double scale = 1.0 / std::sqrt(t * (1.0 - t));
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t first = b * kBlockDraws;
    const std::size_t count = std::min(kBlockDraws, R - first);
    Matrix scores(n, static_cast<Index>(count));
    for (std::size_t k = 0; k < count; ++k) {
      const Vector u = draw_uniforms(seed, first + k, n);
      for (Index i = 0; i < n; ++i) scores(i, static_cast<Index>(k)) = t - (u[i] <= t ? 1.0 : 0.0);
    }
    const Matrix g = Xs.transpose() * scores;
    for (std::size_t k = 0; k < count; ++k) {
      out[first + k] = g.col(static_cast<Index>(k)).cwiseAbs().maxCoeff() * scale;
    }
  });
}

// General U = [lo, hi]: sweep the sorted draws, maintaining the partial
// column sums of rows with U_i <= t.
double simulate_sweep_draw(const RowMatrix& Xs, const Eigen::RowVectorXd& col_sums,
                           const std::vector<double>& fixed_pts, double lo, double hi, const Vector& u) {
  const Index n = Xs.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return u[a] < u[b]; });

  // (t, inclusive): inclusive events see every row with U_i <= t, exclusive
  // ones (left limits at drawn points) only U_i < t.
  std::vector<std::pair<double, bool>> events;
  events.reserve(fixed_pts.size() + 2 * static_cast<std::size_t>(n));
  for (double t : fixed_pts) events.emplace_back(t, true);
  for (Index i = 0; i < n; ++i) {
    if (u[i] >= lo && u[i] <= hi && u[i] > 0.0) {
      events.emplace_back(u[i], false);
      events.emplace_back(u[i], true);
    }
  }
  std::sort(events.begin(), events.end());

  Eigen::RowVectorXd partial = Eigen::RowVectorXd::Zero(Xs.cols());
  std::size_t next = 0;
  double best = 0.0;
  for (const auto& [t, inclusive] : events) {
    while (next < order.size()) {
      const double ui = u[order[next]];
      if (inclusive ? ui > t : ui >= t) break;
      partial += Xs.row(order[next]);
      ++next;
    }
    const double value = (t * col_sums - partial).cwiseAbs().maxCoeff() / std::sqrt(t * (1.0 - t));
    best = std::max(best, value);
  }
  return best;
}

}  // namespace

std::vector<double> simulate_pivotal_lambda(const Dataset& d, const QuantileGrid& grid, std::size_t R,
                                            std::uint64_t seed, std::size_t threads) {
  if (R < 1) throw InvalidArgument("number of simulations R must be >= 1");
  std::vector<double> out(R, 0.0);
  const Vector inv_scale = d.col_scales().cwiseInverse();

  if (grid.lo() == grid.hi()) {
    const Matrix Xs = d.X() * inv_scale.asDiagonal();
    simulate_single_point(Xs, grid.lo(), seed, out, threads);
    return out;
  }

  const RowMatrix Xs = d.X() * inv_scale.asDiagonal();
  const Eigen::RowVectorXd col_sums = Xs.colwise().sum();
  const std::vector<double> fixed_pts = fixed_evaluation_points(grid);
  parallel_for(R, threads, [&](std::size_t r) {
    out[r] = simulate_sweep_draw(Xs, col_sums, fixed_pts, grid.lo(), grid.hi(), draw_uniforms(seed, r, d.n()));
  });
  return out;
}

double penalty_level(std::span<const double> samples, double alpha, double c) {
  if (samples.empty()) throw InvalidArgument("penalty_level: empty sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("penalty_level: alpha must lie in (0,1)");
  if (!(c > 0.0)) throw InvalidArgument("penalty_level: multiplier c must be positive");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double R = static_cast<double>(sorted.size());
  const double position = (1.0 - alpha) * R;
  // (1 - 0.1) * 10 is 9.000000000000002 in binary; do not round that up.
  auto k = static_cast<std::size_t>(std::ceil(position - 1e-9 * std::max(1.0, position)));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return c * sorted[k - 1];
}

double theoretical_scale(Index n, Index p, const QuantileGrid& grid) {
  if (n < 2 || p < 2) throw InvalidArgument("theoretical_scale needs n, p >= 2");
  auto w = [](double u) { return 1.0 / std::sqrt(u * (1.0 - u)); };
  double w_max = std::max(w(grid.lo()), w(grid.hi()));
  for (const auto& q : grid.points()) w_max = std::max(w_max, w(q.value()));
  return w_max * std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(p)));
}

PenaltyCalibration calibrate_penalty(const Dataset& d, const QuantileGrid& grid, double alpha, double c,
                                     std::size_t R, std::uint64_t seed, std::size_t threads) {
  PenaltyCalibration cal{.alpha = alpha, .c = c, .n_sims = R, .u_grid = grid, .lambda_samples = {},
                         .lambda0 = 0.0, .seed = seed};
  cal.lambda_samples = simulate_pivotal_lambda(d, grid, R, seed, threads);
  cal.lambda0 = penalty_level(cal.lambda_samples, alpha, c);
  return cal;
}

}  // namespace l1qr
