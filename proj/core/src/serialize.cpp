#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "l1qr/io.hpp"

namespace l1qr {
namespace {

const char* to_string(BasisStatus s) {
  switch (s) {
    case BasisStatus::basic: return "basic";
    case BasisStatus::nonbasic_lower: return "nonbasic_lower";
    case BasisStatus::nonbasic_upper: return "nonbasic_upper";
  }
  return "basic";
}

const char* to_string(EigenMode m) {
  switch (m) {
    case EigenMode::exact: return "exact";
    case EigenMode::greedy_lower_bound: return "greedy_lower_bound";
    case EigenMode::greedy_upper_bound: return "greedy_upper_bound";
  }
  return "exact";
}

std::string column_name(const std::vector<std::string>& names, Index j) {
  if (j >= 0 && static_cast<std::size_t>(j) < names.size()) return names[static_cast<std::size_t>(j)];
  return "x" + std::to_string(j);
}

Json index_list(const IndexSet& s) {
  Json out = Json::array();
  for (Index j : s) out.push_back(j);
  return out;
}

Json name_list(const IndexSet& s, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (Index j : s) out.push_back(column_name(names, j));
  return out;
}

Json histogram(const std::map<Index, std::size_t>& h) {
  Json out = Json::array();
  for (const auto& [bin, count] : h) out.push_back(Json::array({bin, count}));
  return out;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

Json sparse_coefficients(const Vector& beta, const std::vector<std::string>& names) {
  Json out = Json::object();
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) out[column_name(names, j)] = beta[j];
  }
  return out;
}

Json to_json(const QuantileFit& fit, const std::vector<std::string>& names, bool dense) {
  Json j;
  j["u"] = fit.u.value();
  j["lambda"] = fit.lambda;
  j["penalty_level"] = fit.lambda * std::sqrt(fit.u.spread());
  j["support"] = index_list(fit.support);
  j["support_names"] = name_list(fit.support, names);
  j["coefficients"] = sparse_coefficients(fit.beta.beta, names);
  if (dense) {
    j["beta"] = vector_json(fit.beta.beta);
    j["dual_scores"] = vector_json(fit.dual_scores);
    Json status = Json::array();
    for (auto s : fit.basis_status) status.push_back(to_string(s));
    j["basis_status"] = status;
  }
  j["primal_objective"] = fit.primal_objective;
  j["dual_objective"] = fit.dual_objective;
  j["duality_gap"] = fit.duality_gap();
  j["n_interpolated"] = fit.n_interpolated;
  j["pivots"] = fit.pivots;
  j["perturbed"] = fit.perturbed;
  return j;
}

Json to_json(const PostFit& post, const std::vector<std::string>& names, bool dense) {
  Json j;
  j["u"] = post.u.value();
  j["selected"] = index_list(post.selected);
  j["selected_names"] = name_list(post.selected, names);
  j["empty_model"] = post.empty_model;
  j["coefficients"] = sparse_coefficients(post.beta_post.beta, names);
  if (dense) j["beta"] = vector_json(post.beta_post.beta);
  return j;
}

Json to_json(const PenaltyCalibration& cal, bool include_samples) {
  Json j;
  j["alpha"] = cal.alpha;
  j["c"] = cal.c;
  j["n_sims"] = cal.n_sims;
  j["seed"] = cal.seed;
  Json grid;
  grid["lo"] = cal.u_grid.lo();
  grid["hi"] = cal.u_grid.hi();
  Json pts = Json::array();
  for (const auto& q : cal.u_grid.points()) pts.push_back(q.value());
  grid["points"] = pts;
  j["u_grid"] = grid;
  j["quantile"] = cal.lambda0 / cal.c;
  j["lambda0"] = cal.lambda0;
  if (include_samples) j["lambda_samples"] = cal.lambda_samples;
  return j;
}

Json to_json(const std::vector<PathPoint>& path, const std::vector<std::string>& names) {
  Json rows = Json::array();
  for (const auto& pt : path) {
    Json r;
    r["lambda"] = pt.lambda;
    r["support"] = index_list(pt.support);
    r["support_names"] = name_list(pt.support, names);
    r["coefficients"] = sparse_coefficients(pt.beta.beta, names);
    r["post_coefficients"] = sparse_coefficients(pt.post_beta.beta, names);
    rows.push_back(r);
  }
  return rows;
}

Json to_json(const SparseEigenResult& res) {
  Json j;
  j["k"] = res.k;
  j["value"] = res.value;
  j["mode"] = to_string(res.mode);
  j["matrix_kind"] = res.matrix_kind == MatrixKind::empirical ? "empirical" : "supplied";
  j["subset"] = index_list(res.subset);
  return j;
}

Json to_json(const SupportMetrics& m) {
  Json j;
  j["true_support"] = index_list(m.true_support);
  j["est_support"] = index_list(m.est_support);
  j["n_selected"] = m.n_selected;
  j["n_correct"] = m.n_correct;
  j["n_wrong"] = m.n_wrong;
  j["includes_truth"] = m.includes_truth;
  j["exact"] = m.exact;
  return j;
}

Json to_json(const ExperimentConfig& cfg) {
  Json design;
  design["n"] = cfg.design.n;
  design["p"] = cfg.design.p;
  design["s"] = cfg.design.s;
  design["rho"] = cfg.design.rho;
  design["sigma_noise"] = cfg.design.sigma_noise;
  design["beta_pattern"] = cfg.design.beta_pattern ? "custom" : "ones_after_intercept";

  Json j;
  j["design"] = design;
  j["u"] = cfg.u;
  j["n_reps"] = cfg.n_reps;
  if (cfg.fixed_lambda) {
    j["lambda"] = *cfg.fixed_lambda;
  } else {
    j["alpha"] = cfg.alpha;
    j["c"] = cfg.c;
    j["R"] = cfg.R;
    j["lambda_mode"] = cfg.shared_lambda ? "shared" : "per_replication";
  }
  Json est = Json::array();
  for (auto k : cfg.estimators) est.push_back(to_string(k));
  j["estimators"] = est;
  j["master_seed"] = cfg.master_seed;
  return j;
}

Json to_json(const ExperimentReport& report, bool include_timing) {
  Json j;
  j["config"] = to_json(report.config);
  j["n_completed"] = report.n_completed;
  j["n_failed"] = report.n_failed;
  j["failed_reps"] = report.failed_reps;
  double mean_lambda = 0.0;
  for (double l : report.lambdas) mean_lambda += l;
  j["mean_lambda"] = report.lambdas.empty() ? 0.0 : mean_lambda / static_cast<double>(report.lambdas.size());
  Json est = Json::array();
  for (const auto& e : report.estimators) {
    Json r;
    r["estimator"] = to_string(e.estimator);
    r["mean_l0"] = e.metrics.mean_l0;
    r["mean_model_size"] = e.mean_model_size;
    r["mean_l1"] = e.metrics.mean_l1;
    r["bias"] = e.metrics.bias;
    r["std_dev"] = e.metrics.std_dev;
    r["inclusion_frequency"] = e.inclusion_frequency;
    r["support_histogram"] = histogram(e.support_histogram);
    r["correct_selected_histogram"] = histogram(e.correct_selected_histogram);
    r["total_pivots"] = e.total_pivots;
    est.push_back(r);
  }
  j["estimators"] = est;
  j["lambdas"] = report.lambdas;
  if (include_timing) j["wall_seconds"] = report.wall_seconds;
  return j;
}

std::string report_table_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "estimator,mean_l0,mean_model_size,mean_l1,bias,std_dev,inclusion_frequency\n";
  for (const auto& e : report.estimators) {
    out << to_string(e.estimator) << ',' << format_double(e.metrics.mean_l0) << ','
        << format_double(e.mean_model_size) << ',' << format_double(e.metrics.mean_l1) << ','
        << format_double(e.metrics.bias) << ',' << format_double(e.metrics.std_dev) << ','
        << format_double(e.inclusion_frequency) << '\n';
  }
  return out.str();
}

std::string report_histograms_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "estimator,histogram,bin,count\n";
  for (const auto& e : report.estimators) {
    for (const auto& [bin, count] : e.support_histogram) {
      out << to_string(e.estimator) << ",selected_size," << bin << ',' << count << '\n';
    }
    for (const auto& [bin, count] : e.correct_selected_histogram) {
      out << to_string(e.estimator) << ",correct_selected," << bin << ',' << count << '\n';
    }
  }
  return out.str();
}

std::string path_table_csv(const std::vector<PathPoint>& path, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "lambda,column,name,beta,post_beta\n";
  for (const auto& pt : path) {
    for (Index j : pt.support) {
      out << format_double(pt.lambda) << ',' << j << ',' << csv_field(column_name(names, j)) << ','
          << format_double(pt.beta[j]) << ',' << format_double(pt.post_beta[j]) << '\n';
    }
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw InvalidArgument("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw InvalidArgument("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

}  // namespace l1qr
