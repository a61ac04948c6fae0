#include "l1qr/simulation.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "l1qr/estimators.hpp"
#include "l1qr/lp_solver.hpp"
#include "l1qr/parallel.hpp"
#include "l1qr/penalty.hpp"
#include "l1qr/rng.hpp"

namespace l1qr {

namespace {

constexpr std::uint64_t kLambdaTag = 0x1a4b;
constexpr EstimatorKind kReportOrder[] = {EstimatorKind::canonical, EstimatorKind::penalized, EstimatorKind::post,
                                          EstimatorKind::oracle};

bool wants(const ExperimentConfig& cfg, EstimatorKind kind) {
  return std::find(cfg.estimators.begin(), cfg.estimators.end(), kind) != cfg.estimators.end();
}

struct RepOutcome {
  bool ok = false;
  double lambda = 0.0;
  // Indexed by EstimatorKind.
  std::array<Vector, 4> beta;
  std::array<std::size_t, 4> pivots{};
};

}  // namespace

void DesignSpec::validate() const {
  if (n < 1 || p < 1) throw InvalidArgument("design: n and p must be >= 1");
  if (s < 0 || s > p - 1) throw InvalidArgument("design: need 0 <= s <= p - 1");
  if (!(std::abs(rho) < 1.0)) throw InvalidArgument("design: |rho| must be < 1");
  if (!(sigma_noise > 0.0)) throw InvalidArgument("design: sigma_noise must be positive");
  if (beta_pattern && beta_pattern->size() != p) throw InvalidArgument("design: beta_pattern length must equal p");
}

Vector DesignSpec::beta() const {
  if (beta_pattern) return *beta_pattern;
  Vector b = Vector::Zero(p);
  b.segment(1, s).setOnes();
  return b;
}

GeneratedDesign generate_design(const DesignSpec& spec, std::size_t rep_index) {
  spec.validate();
  Philox4x32 rng(spec.seed, rep_index);
  std::normal_distribution<double> normal;
  const double innovation = std::sqrt(1.0 - spec.rho * spec.rho);

  Matrix X(spec.n, spec.p);
  for (Index i = 0; i < spec.n; ++i) {
    X(i, 0) = 1.0;
    double z = 0.0;
    for (Index j = 1; j < spec.p; ++j) {
      const double w = normal(rng);
      z = (j == 1) ? w : spec.rho * z + innovation * w;
      X(i, j) = z;
    }
  }
  const Vector beta = spec.beta();
  Vector y = X * beta;
  for (Index i = 0; i < spec.n; ++i) y[i] += spec.sigma_noise * normal(rng);

  GroundTruth truth{Coefficients{beta}, nonzero_indices(beta, 0.0)};
  return GeneratedDesign{build_dataset(std::move(X), std::move(y), Index{0}), std::move(truth)};
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::canonical: return "canonical";
    case EstimatorKind::penalized: return "penalized";
    case EstimatorKind::post: return "post";
    case EstimatorKind::oracle: return "oracle";
  }
  return "unknown";
}

EstimatorKind estimator_from_string(const std::string& name) {
  for (EstimatorKind k : kReportOrder) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown estimator '" + name + "' (expected canonical, penalized, post or oracle)");
}

void ExperimentConfig::validate() const {
  design.validate();
  QuantileIndex check(u);
  (void)check;
  if (n_reps < 1) throw InvalidArgument("experiment: n_reps must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("experiment: alpha must lie in (0,1)");
  if (!(c > 0.0)) throw InvalidArgument("experiment: c must be positive");
  if (R < 1) throw InvalidArgument("experiment: R must be >= 1");
  if (fixed_lambda && !(*fixed_lambda >= 0.0)) throw InvalidArgument("experiment: lambda must be >= 0");
  if (estimators.empty()) throw InvalidArgument("experiment: no estimators requested");
}

MetricSummary report_metrics(const std::vector<Vector>& errors, const Vector& beta_true) {
  if (errors.empty()) throw InvalidArgument("report_metrics: no replications");
  const Index p = beta_true.size();
  for (const auto& e : errors) {
    if (e.size() != p) throw InvalidArgument("report_metrics: error vectors of unequal length");
  }
  const auto reps = static_cast<double>(errors.size());
  Vector mean_error = Vector::Zero(p);
  for (const auto& e : errors) mean_error += e;
  mean_error /= reps;

  MetricSummary m;
  m.bias = mean_error.norm();
  double spread = 0.0;
  for (const auto& e : errors) {
    // beta_hat - mean(beta_hat) = e - mean(e)
    spread += (e - mean_error).squaredNorm();
    const Vector beta_hat = e + beta_true;
    m.mean_l0 += static_cast<double>(nonzero_indices(beta_hat, support_tolerance(beta_hat)).size());
    m.mean_l1 += beta_hat.lpNorm<1>();
  }
  m.std_dev = std::sqrt(spread / reps);
  m.mean_l0 /= reps;
  m.mean_l1 /= reps;
  return m;
}

const EstimatorSummary* ExperimentReport::find(EstimatorKind kind) const {
  for (const auto& e : estimators) {
    if (e.estimator == kind) return &e;
  }
  return nullptr;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  DesignSpec design = cfg.design;
  design.seed = cfg.master_seed;
  const QuantileIndex u(cfg.u);
  const QuantileGrid grid = QuantileGrid::single(cfg.u);
  const std::uint64_t lambda_seed = derive_seed(cfg.master_seed, kLambdaTag);

  auto calibrate = [&](const Dataset& data, std::size_t rep) {
    const auto draws = simulate_pivotal_lambda(data, grid, cfg.R, derive_seed(lambda_seed, rep), 1);
    return penalty_level(draws, cfg.alpha, cfg.c);
  };

  const bool need_penalized = wants(cfg, EstimatorKind::penalized) || wants(cfg, EstimatorKind::post);
  std::optional<double> shared;
  if (cfg.fixed_lambda) {
    shared = cfg.fixed_lambda;
  } else if (!need_penalized) {
    shared = 0.0;
  } else if (cfg.shared_lambda) {
    shared = calibrate(generate_design(design, 0).data, 0);
  }

  std::vector<RepOutcome> outcomes(cfg.n_reps);
  parallel_for(cfg.n_reps, cfg.threads, [&](std::size_t rep) {
    RepOutcome& out = outcomes[rep];
    try {
      const GeneratedDesign g = generate_design(design, rep);
      out.lambda = shared ? *shared : calibrate(g.data, rep);
      auto slot = [](EstimatorKind k) { return static_cast<std::size_t>(k); };
      if (need_penalized) {
        const QuantileFit fit = solve_qr_lp(g.data, u, out.lambda);
        out.beta[slot(EstimatorKind::penalized)] = fit.beta.beta;
        out.pivots[slot(EstimatorKind::penalized)] = fit.pivots;
        if (wants(cfg, EstimatorKind::post)) {
          const PostFit post = post_l1_qr(g.data, u, fit);
          out.beta[slot(EstimatorKind::post)] = post.beta_post.beta;
        }
      }
      if (wants(cfg, EstimatorKind::oracle)) {
        const QuantileFit fit = solve_qr_lp(g.data, u, 0.0, g.truth.support);
        out.beta[slot(EstimatorKind::oracle)] = fit.beta.beta;
        out.pivots[slot(EstimatorKind::oracle)] = fit.pivots;
      }
      if (wants(cfg, EstimatorKind::canonical)) {
        const QuantileFit fit = solve_qr_lp(g.data, u, 0.0);
        out.beta[slot(EstimatorKind::canonical)] = fit.beta.beta;
        out.pivots[slot(EstimatorKind::canonical)] = fit.pivots;
      }
      out.ok = true;
    } catch (const NumericalError&) {
      out.ok = false;
    }
  });

  ExperimentReport report;
  report.config = cfg;
  for (std::size_t rep = 0; rep < outcomes.size(); ++rep) {
    if (outcomes[rep].ok) {
      ++report.n_completed;
      if (need_penalized) report.lambdas.push_back(outcomes[rep].lambda);
    } else {
      ++report.n_failed;
      report.failed_reps.push_back(rep);
    }
  }
  if (static_cast<double>(report.n_failed) > 0.05 * static_cast<double>(cfg.n_reps)) {
    std::ostringstream msg;
    msg << "experiment aborted: " << report.n_failed << " of " << cfg.n_reps << " replications failed";
    throw NumericalError(msg.str());
  }
  if (report.n_completed == 0) throw NumericalError("experiment: no replication completed");

  const Vector beta_true = design.beta();
  const IndexSet truth = nonzero_indices(beta_true, 0.0);
  for (EstimatorKind kind : kReportOrder) {
    if (!wants(cfg, kind)) continue;
    const auto k = static_cast<std::size_t>(kind);
    EstimatorSummary summary;
    summary.estimator = kind;
    std::vector<Vector> errors;
    std::size_t included = 0;
    double model_size = 0.0;
    for (const auto& out : outcomes) {
      if (!out.ok) continue;
      const Vector& b = out.beta[k];
      errors.push_back(b - beta_true);
      const IndexSet est = nonzero_indices(b, support_tolerance(b));
      IndexSet common;
      std::set_intersection(est.begin(), est.end(), truth.begin(), truth.end(), std::back_inserter(common));
      ++summary.support_histogram[static_cast<Index>(est.size())];
      ++summary.correct_selected_histogram[static_cast<Index>(common.size())];
      if (common.size() == truth.size()) ++included;
      switch (kind) {
        case EstimatorKind::canonical: model_size += static_cast<double>(design.p); break;
        case EstimatorKind::oracle: model_size += static_cast<double>(truth.size()); break;
        case EstimatorKind::post: {
          const Vector& first = out.beta[static_cast<std::size_t>(EstimatorKind::penalized)];
          model_size += static_cast<double>(nonzero_indices(first, support_tolerance(first)).size());
          break;
        }
        default: model_size += static_cast<double>(est.size()); break;
      }
      summary.total_pivots += out.pivots[k];
    }
    const auto completed = static_cast<double>(report.n_completed);
    summary.metrics = report_metrics(errors, beta_true);
    summary.mean_model_size = model_size / completed;
    summary.inclusion_frequency = static_cast<double>(included) / completed;
    report.estimators.push_back(std::move(summary));
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace l1qr
