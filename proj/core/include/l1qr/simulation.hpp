#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "l1qr/core.hpp"

namespace l1qr {

// Location design: intercept plus x_{-1} ~ N(0, Sigma), Sigma_ij = rho^|i-j|,
// y = x'beta + sigma_noise * eps with eps ~ N(0, 1).
struct DesignSpec {
  Index n = 200;
  // Columns of X including the intercept.
  Index p = 1000;
  Index s = 5;
  double rho = 0.0;
  double sigma_noise = 1.0;
  // Defaults to s ones on columns 1..s (intercept coefficient 0).
  std::optional<Vector> beta_pattern;
  std::uint64_t seed = 0;

  void validate() const;
  Vector beta() const;
};

struct GroundTruth {
  Coefficients beta_true;
  IndexSet support;
};

struct GeneratedDesign {
  Dataset data;
  GroundTruth truth;
};

// Deterministic in (spec.seed, rep_index). Column 0 is the intercept.
GeneratedDesign generate_design(const DesignSpec& spec, std::size_t rep_index);

enum class EstimatorKind { canonical, penalized, post, oracle };

std::string to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(const std::string& name);

struct ExperimentConfig {
  DesignSpec design;
  double u = 0.5;
  std::size_t n_reps = 100;
  double alpha = 0.1;
  // The Monte Carlo study uses the 0.9-quantile of Lambda itself, c = 1.
  double c = 1.0;
  std::size_t R = 1000;
  // Skips calibration when set.
  std::optional<double> fixed_lambda;
  // Calibrate once on the first replication's X and reuse it. Faster, but
  // Lambda is meant to be conditional on each replication's own design.
  bool shared_lambda = false;
  // Reported in the fixed order canonical, penalized, post, oracle.
  std::vector<EstimatorKind> estimators{EstimatorKind::penalized, EstimatorKind::post, EstimatorKind::oracle};
  std::uint64_t master_seed = 0;
  // Worker threads for replications (0 = default). Results do not depend
  // on it.
  std::size_t threads = 0;

  void validate() const;
};

struct MetricSummary {
  double bias = 0.0;
  double std_dev = 0.0;
  double mean_l0 = 0.0;
  double mean_l1 = 0.0;
};

// errors[r] = beta_hat_r - beta_true.
//   bias    = || mean_r errors[r] ||_2
//   std_dev = sqrt( mean_r || beta_hat_r - mean(beta_hat) ||_2^2 )
// mean_l0 counts |beta_hat_j| above support_tolerance(beta_hat_r).
MetricSummary report_metrics(const std::vector<Vector>& errors, const Vector& beta_true);

struct EstimatorSummary {
  EstimatorKind estimator = EstimatorKind::penalized;
  MetricSummary metrics;
  // Average number of columns in the estimated model: p for canonical QR
  // (the whole vector is estimated), |T| for the oracle, the selected size
  // otherwise. mean_l0 above is the l0 norm of the basic solution.
  double mean_model_size = 0.0;
  std::map<Index, std::size_t> support_histogram;
  std::map<Index, std::size_t> correct_selected_histogram;
  double inclusion_frequency = 0.0;
  std::size_t total_pivots = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<EstimatorSummary> estimators;
  std::size_t n_completed = 0;
  std::size_t n_failed = 0;
  std::vector<std::size_t> failed_reps;
  // Penalty level used in each completed replication (empty when no
  // penalized estimator ran).
  std::vector<double> lambdas;
  // Not deterministic; kept out of serialized artifacts unless requested.
  double wall_seconds = 0.0;

  const EstimatorSummary* find(EstimatorKind kind) const;
};

// Replications whose solver fails are excluded and counted; more than 5%
// failures throws NumericalError.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace l1qr
