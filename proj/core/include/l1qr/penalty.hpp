#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "l1qr/core.hpp"

namespace l1qr {

// Defaults of the pivotal penalty rule lambda = c * Lambda(1 - alpha | X).
inline constexpr double kDefaultAlpha = 0.1;
inline constexpr double kDefaultMultiplier = 2.0;
inline constexpr std::size_t kDefaultSimulations = 1000;

struct PenaltyCalibration {
  double alpha = kDefaultAlpha;
  double c = kDefaultMultiplier;
  std::size_t n_sims = kDefaultSimulations;
  QuantileGrid u_grid = QuantileGrid::single(0.5);
  std::vector<double> lambda_samples;
  double lambda0 = 0.0;
  std::uint64_t seed = 0;
};

// Draws of
//   Lambda = sup_{u in U} max_j |sum_i x_ij (u - 1{U_i <= u})| / (sigma_j sqrt(u(1-u)))
// with U_1..U_n iid uniform, conditional on X. Never reads y.
//
// The supremum over [lo, hi] is taken over the grid points, the equispaced
// points k/100 inside [lo, hi], and both one-sided limits at every drawn U_i
// inside [lo, hi]. When lo == hi the statistic is evaluated at that single
// point, batched through a matrix product.
//
// Draw r uses the stream (seed, r), so the samples do not depend on
// `threads` (0 = default worker count).
std::vector<double> simulate_pivotal_lambda(const Dataset& d, const QuantileGrid& grid, std::size_t R,
                                            std::uint64_t seed, std::size_t threads = 0);

// c times the ceil((1 - alpha) R)-th order statistic of `samples`.
double penalty_level(std::span<const double> samples, double alpha, double c);

// W_U sqrt(n log p), W_U = max_{u in U} 1/sqrt(u(1-u)): the growth factor of
// the analytic bound on Lambda, without its universal constant. Diagnostic
// only.
double theoretical_scale(Index n, Index p, const QuantileGrid& grid);

PenaltyCalibration calibrate_penalty(const Dataset& d, const QuantileGrid& grid, double alpha = kDefaultAlpha,
                                     double c = kDefaultMultiplier, std::size_t R = kDefaultSimulations,
                                     std::uint64_t seed = 0, std::size_t threads = 0);

}  // namespace l1qr
