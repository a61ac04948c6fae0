#include "l1qr/cli.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "l1qr/diagnostics.hpp"
#include "l1qr/estimators.hpp"
#include "l1qr/io.hpp"
#include "l1qr/penalty.hpp"
#include "l1qr/simulation.hpp"

namespace l1qr::cli {
namespace {

constexpr const char* kVersion = "0.1.0";

// An error that already knows its exit code and failing stage.
class StageFailure : public std::runtime_error {
 public:
  StageFailure(int code, std::string stage, const std::string& msg)
      : std::runtime_error(msg), code_(code), stage_(std::move(stage)) {}
  int code() const { return code_; }
  const std::string& stage() const { return stage_; }

 private:
  int code_;
  std::string stage_;
};

template <class F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageFailure&) {
    throw;
  } catch (const NumericalError& e) {
    throw StageFailure(kExitNumerical, name, std::string("numerical failure: ") + e.what());
  } catch (const BudgetExceeded& e) {
    throw StageFailure(kExitUsage, name, e.what());
  } catch (const InvalidArgument& e) {
    throw StageFailure(kExitUsage, name, e.what());
  } catch (const std::exception& e) {
    throw StageFailure(kExitNumerical, name, e.what());
  }
}

Json grid_json(const QuantileGrid& g) {
  Json pts = Json::array();
  for (const auto& q : g.points()) pts.push_back(q.value());
  return Json{{"lo", g.lo()}, {"hi", g.hi()}, {"points", pts}};
}

void add_data_fields(Json& j, const RunConfig& cfg) {
  j["input_path"] = cfg.input_path;
  j["response_column"] = cfg.response_column;
  j["add_intercept"] = cfg.add_intercept;
  j["delimiter"] = std::string(1, cfg.delimiter);
}

void add_penalty_fields(Json& j, const RunConfig& cfg) {
  if (cfg.lambda) {
    j["lambda"] = *cfg.lambda;
    return;
  }
  j["alpha"] = cfg.alpha;
  j["c"] = cfg.c;
  j["R"] = cfg.R;
  j["seed"] = cfg.seed;
}

// The merged (default < config file < flag) settings the command ran with.
Json effective_config(const RunConfig& cfg) {
  Json j;
  j["command"] = to_string(cfg.command);
  switch (cfg.command) {
    case Command::fit:
      add_data_fields(j, cfg);
      j["quantiles"] = cfg.quantiles;
      add_penalty_fields(j, cfg);
      j["post"] = cfg.post;
      j["keep_intercept"] = cfg.keep_intercept;
      j["exempt_intercept"] = cfg.exempt_intercept;
      if (cfg.threshold) j["threshold"] = *cfg.threshold;
      j["dense"] = cfg.dense;
      break;
    case Command::calibrate:
      add_data_fields(j, cfg);
      j["quantiles"] = cfg.quantiles;
      add_penalty_fields(j, cfg);
      break;
    case Command::path:
      add_data_fields(j, cfg);
      j["quantiles"] = cfg.quantiles;
      add_penalty_fields(j, cfg);
      j["K"] = cfg.K;
      j["keep_intercept"] = cfg.keep_intercept;
      j["exempt_intercept"] = cfg.exempt_intercept;
      break;
    case Command::simulate: {
      j["n"] = cfg.n;
      j["p"] = cfg.p;
      j["s"] = cfg.s;
      j["rho"] = cfg.rho;
      j["sigma"] = cfg.sigma;
      j["quantiles"] = cfg.quantiles;
      j["reps"] = cfg.reps;
      add_penalty_fields(j, cfg);
      if (!cfg.lambda) j["shared_lambda"] = cfg.shared_lambda;
      j["estimators"] = cfg.estimators;
      break;
    }
    case Command::diagnose:
      add_data_fields(j, cfg);
      j["k"] = cfg.k_values;
      j["greedy"] = cfg.greedy;
      j["budget"] = cfg.budget;
      if (!cfg.truth.empty()) {
        j["truth"] = cfg.truth;
        j["quantiles"] = cfg.quantiles;
        add_penalty_fields(j, cfg);
      }
      break;
  }
  j["format"] = cfg.format == Format::json ? "json" : "csv";
  return j;
}

void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
  stage("write output", [&] {
    if (cfg.output_path.empty()) {
      out << content;
    } else {
      write_file_atomic(cfg.output_path, content);
    }
    return 0;
  });
}

LoadedData load(const RunConfig& cfg) {
  return stage("load data", [&] {
    if (cfg.input_path.empty()) throw InvalidArgument("--data is required");
    return parse_csv_dataset(cfg.input_path, cfg.response_column, cfg.add_intercept, cfg.delimiter);
  });
}

QuantileGrid grid_of(const RunConfig& cfg) {
  return stage("parse quantiles", [&] { return parse_quantile_spec(cfg.quantiles); });
}

// Fixed lambda, or lambda = c * Lambda(1 - alpha | X) over `grid`.
std::pair<double, std::optional<PenaltyCalibration>> penalty_for(const RunConfig& cfg, const Dataset& d,
                                                                 const QuantileGrid& grid) {
  if (cfg.lambda) {
    if (!(*cfg.lambda >= 0.0)) throw StageFailure(kExitUsage, "calibrate penalty", "--lambda must be >= 0");
    return {*cfg.lambda, std::nullopt};
  }
  auto cal = stage("calibrate penalty",
                   [&] { return calibrate_penalty(d, grid, cfg.alpha, cfg.c, cfg.R, cfg.seed, cfg.threads); });
  return {cal.lambda0, std::move(cal)};
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions opts;
  opts.penalty.exempt_intercept = cfg.exempt_intercept;
  opts.max_pivots = cfg.max_pivots;
  return opts;
}

Json document(const RunConfig& cfg) {
  Json doc;
  doc["tool"] = "l1qr";
  doc["version"] = kVersion;
  doc["config"] = effective_config(cfg);
  return doc;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const LoadedData data = load(cfg);
  const QuantileGrid grid = grid_of(cfg);
  const auto [lambda, cal] = penalty_for(cfg, data.data, grid);
  const SolverOptions opts = solver_options(cfg);
  const ProcessFit process = stage("fit", [&] { return fit_l1_qr_process(data.data, grid, lambda, opts, cfg.threads); });

  PostOptions post_opts;
  post_opts.always_keep_intercept = cfg.keep_intercept;
  post_opts.solver = opts;
  std::vector<PostFit> posts;
  if (cfg.post) {
    stage("post-selection refit", [&] {
      for (const auto& f : process.fits) posts.push_back(post_l1_qr(data.data, f.u, f, post_opts));
      return 0;
    });
  }
  std::vector<Coefficients> thresholded;
  if (cfg.threshold) {
    stage("threshold", [&] {
      for (const auto& f : process.fits) thresholded.push_back(hard_threshold(f, *cfg.threshold));
      return 0;
    });
  }

  if (cfg.format == Format::csv) {
    std::ostringstream csv;
    csv << "u,column,name,beta";
    if (cfg.post) csv << ",post_beta";
    if (cfg.threshold) csv << ",thresholded_beta";
    csv << '\n';
    for (std::size_t k = 0; k < process.fits.size(); ++k) {
      const QuantileFit& f = process.fits[k];
      std::set<Index> rows(f.support.begin(), f.support.end());
      if (cfg.post) rows.insert(posts[k].selected.begin(), posts[k].selected.end());
      for (Index j : rows) {
        csv << format_double(f.u.value()) << ',' << j << ',' << data.column_names[static_cast<std::size_t>(j)] << ','
            << format_double(f.beta[j]);
        if (cfg.post) csv << ',' << format_double(posts[k].beta_post[j]);
        if (cfg.threshold) csv << ',' << format_double(thresholded[k][j]);
        csv << '\n';
      }
    }
    emit(cfg, csv.str(), out);
    return kExitOk;
  }

  Json doc = document(cfg);
  doc["n"] = data.data.n();
  doc["p"] = data.data.p();
  doc["response"] = data.response_name;
  doc["columns"] = data.column_names;
  doc["u_grid"] = grid_json(grid);
  doc["lambda"] = lambda;
  if (cal) doc["calibration"] = to_json(*cal, false);
  Json fits = Json::array();
  for (std::size_t k = 0; k < process.fits.size(); ++k) {
    Json f = to_json(process.fits[k], data.column_names, cfg.dense);
    if (cfg.post) f["post"] = to_json(posts[k], data.column_names, cfg.dense);
    if (cfg.threshold) f["thresholded"] = sparse_coefficients(thresholded[k].beta, data.column_names);
    fits.push_back(f);
  }
  doc["fits"] = fits;
  Json union_names = Json::array();
  for (Index j : process.union_support) union_names.push_back(data.column_names[static_cast<std::size_t>(j)]);
  doc["union_support"] = union_names;
  doc["max_support_size"] = process.max_support_size;
  emit(cfg, dump(doc), out);
  return kExitOk;
}

int cmd_calibrate(const RunConfig& cfg, std::ostream& out) {
  const LoadedData data = load(cfg);
  const QuantileGrid grid = grid_of(cfg);
  const PenaltyCalibration cal = stage(
      "calibrate penalty", [&] { return calibrate_penalty(data.data, grid, cfg.alpha, cfg.c, cfg.R, cfg.seed, cfg.threads); });

  if (cfg.format == Format::csv) {
    std::ostringstream csv;
    csv << "draw,lambda\n";
    for (std::size_t r = 0; r < cal.lambda_samples.size(); ++r) {
      csv << r << ',' << format_double(cal.lambda_samples[r]) << '\n';
    }
    emit(cfg, csv.str(), out);
    return kExitOk;
  }
  Json doc = document(cfg);
  doc["n"] = data.data.n();
  doc["p"] = data.data.p();
  doc["calibration"] = to_json(cal, true);
  if (data.data.n() >= 2 && data.data.p() >= 2) {
    const double scale = theoretical_scale(data.data.n(), data.data.p(), grid);
    doc["theoretical_scale"] = scale;
    doc["quantile_over_scale"] = (cal.lambda0 / cal.c) / scale;
  }
  emit(cfg, dump(doc), out);
  return kExitOk;
}

int cmd_path(const RunConfig& cfg, std::ostream& out) {
  const LoadedData data = load(cfg);
  const QuantileGrid grid = grid_of(cfg);
  if (grid.size() != 1) throw StageFailure(kExitUsage, "parse quantiles", "path needs a single quantile index");
  const QuantileIndex u = grid.points().front();
  const auto [lambda0, cal] = penalty_for(cfg, data.data, grid);
  if (!(lambda0 > 0.0)) throw StageFailure(kExitUsage, "lambda path", "lambda0 must be positive");
  PostOptions post_opts;
  post_opts.always_keep_intercept = cfg.keep_intercept;
  post_opts.solver = solver_options(cfg);
  const std::vector<double> lambdas = stage("lambda path", [&] { return lambda_path(lambda0, cfg.K); });
  const auto rows = stage("selection path", [&] { return selection_path(data.data, u, lambdas, post_opts); });

  if (cfg.format == Format::csv) {
    emit(cfg, path_table_csv(rows, data.column_names), out);
    return kExitOk;
  }
  Json doc = document(cfg);
  doc["n"] = data.data.n();
  doc["p"] = data.data.p();
  doc["u"] = u.value();
  doc["lambda0"] = lambda0;
  if (cal) doc["calibration"] = to_json(*cal, false);
  doc["path"] = to_json(rows, data.column_names);
  emit(cfg, dump(doc), out);
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  ExperimentConfig exp = stage("configure experiment", [&] {
    ExperimentConfig e;
    e.design.n = cfg.n;
    e.design.p = cfg.p;
    e.design.s = cfg.s;
    e.design.rho = cfg.rho;
    e.design.sigma_noise = cfg.sigma;
    const QuantileGrid g = parse_quantile_spec(cfg.quantiles);
    if (g.size() != 1) throw InvalidArgument("simulate needs a single quantile index");
    e.u = g.points().front().value();
    e.n_reps = cfg.reps;
    e.alpha = cfg.alpha;
    e.c = cfg.c;
    e.R = cfg.R;
    e.fixed_lambda = cfg.lambda;
    e.shared_lambda = cfg.shared_lambda;
    e.estimators.clear();
    for (const auto& name : cfg.estimators) e.estimators.push_back(estimator_from_string(name));
    e.master_seed = cfg.seed;
    e.threads = cfg.threads;
    e.validate();
    return e;
  });
  const ExperimentReport report = stage("run experiment", [&] { return run_experiment(exp); });

  if (!cfg.table_path.empty()) {
    stage("write table", [&] {
      write_file_atomic(cfg.table_path, report_table_csv(report));
      return 0;
    });
  }
  if (!cfg.histogram_path.empty()) {
    stage("write histograms", [&] {
      write_file_atomic(cfg.histogram_path, report_histograms_csv(report));
      return 0;
    });
  }
  if (cfg.format == Format::csv) {
    emit(cfg, report_table_csv(report), out);
    return kExitOk;
  }
  Json doc = document(cfg);
  doc["report"] = to_json(report, cfg.timing);
  emit(cfg, dump(doc), out);
  return kExitOk;
}

Index resolve_column(const std::string& token, const LoadedData& data) {
  for (std::size_t j = 0; j < data.column_names.size(); ++j) {
    if (data.column_names[j] == token) return static_cast<Index>(j);
  }
  Index j = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), j);
  if (ec != std::errc() || ptr != token.data() + token.size() || j < 0 || j >= data.data.p()) {
    throw InvalidArgument("truth column '" + token + "' is neither a regressor name nor an index in [0, p)");
  }
  return j;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
  const LoadedData data = load(cfg);
  const Matrix gram = empirical_gram(data.data);
  std::vector<SparseEigenResult> maxima, minima;
  stage("sparse eigenvalues", [&] {
    for (Index k : cfg.k_values) {
      maxima.push_back(max_sparse_eigenvalue(gram, k, cfg.greedy, MatrixKind::empirical, cfg.budget));
      minima.push_back(min_sparse_eigenvalue(gram, k, cfg.greedy, MatrixKind::empirical, cfg.budget));
    }
    return 0;
  });

  std::optional<SupportMetrics> metrics;
  std::optional<SupportMetrics> post_metrics;
  std::optional<double> lambda_used;
  if (!cfg.truth.empty()) {
    IndexSet truth = stage("parse truth", [&] {
      IndexSet t;
      for (const auto& tok : cfg.truth) t.push_back(resolve_column(tok, data));
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      return t;
    });
    const QuantileGrid grid = grid_of(cfg);
    if (grid.size() != 1) throw StageFailure(kExitUsage, "parse quantiles", "diagnose needs a single quantile index");
    const auto [lambda, cal] = penalty_for(cfg, data.data, grid);
    lambda_used = lambda;
    const QuantileFit fit =
        stage("fit", [&] { return solve_qr_lp(data.data, grid.points().front(), lambda, std::nullopt, solver_options(cfg)); });
    metrics = support_metrics(fit.beta, truth, support_tolerance(fit.beta.beta));
    const PostFit post = stage("post-selection refit", [&] { return post_l1_qr(data.data, fit.u, fit); });
    post_metrics = support_metrics(post.beta_post, truth, support_tolerance(post.beta_post.beta));
  }

  if (cfg.format == Format::csv) {
    std::ostringstream csv;
    csv << "kind,k,value,mode,subset\n";
    auto row = [&](const char* kind, const SparseEigenResult& r) {
      const Json j = to_json(r);
      csv << kind << ',' << r.k << ',' << format_double(r.value) << ',' << j["mode"].get<std::string>() << ",\"";
      for (std::size_t a = 0; a < r.subset.size(); ++a) csv << (a ? " " : "") << r.subset[a];
      csv << "\"\n";
    };
    for (const auto& r : maxima) row("max", r);
    for (const auto& r : minima) row("min", r);
    emit(cfg, csv.str(), out);
    return kExitOk;
  }
  Json doc = document(cfg);
  doc["n"] = data.data.n();
  doc["p"] = data.data.p();
  Json mx = Json::array(), mn = Json::array();
  for (const auto& r : maxima) mx.push_back(to_json(r));
  for (const auto& r : minima) mn.push_back(to_json(r));
  doc["max_sparse_eigenvalue"] = mx;
  doc["min_sparse_eigenvalue"] = mn;
  if (metrics) {
    doc["lambda"] = *lambda_used;
    doc["support_metrics"] = to_json(*metrics);
    doc["post_support_metrics"] = to_json(*post_metrics);
  }
  emit(cfg, dump(doc), out);
  return kExitOk;
}

void add_output_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-o,--output", cfg.output_path, "Output file (written atomically); stdout if omitted");
  sub->add_option("--format", cfg.format, "Output format: json or csv")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"json", Format::json}, {"csv", Format::csv}},
                                          CLI::ignore_case)
                      .description(""))
      ->option_text("FORMAT [json]");
  sub->add_option("--threads", cfg.threads, "Worker threads (0: L1QR_NUM_THREADS or hardware)")->capture_default_str();
}

void add_data_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-d,--data", cfg.input_path, "CSV file with a header row")->required();
  sub->add_option("-y,--response", cfg.response_column, "Response column: header name or 0-based index")
      ->capture_default_str();
  sub->add_flag("!--no-intercept", cfg.add_intercept, "Do not prepend an intercept column");
  sub->add_option("--delimiter", cfg.delimiter, "Field delimiter")->capture_default_str();
}

void add_penalty_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--alpha", cfg.alpha, "Lambda = c times the (1-alpha)-quantile of the pivotal statistic")
      ->capture_default_str();
  sub->add_option("--c", cfg.c, "Penalty multiplier c")->capture_default_str();
  sub->add_option("-R,--simulations", cfg.R, "Pivotal simulation draws")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  sub->add_option("--lambda", cfg.lambda, "Fixed penalty level; skips calibration");
}

void add_solver_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_flag("--exempt-intercept", cfg.exempt_intercept, "Leave the intercept unpenalized");
  sub->add_option("--max-pivots", cfg.max_pivots, "Simplex pivot cap (0: 50(n+p))")->capture_default_str();
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::fit: return "fit";
    case Command::calibrate: return "calibrate";
    case Command::path: return "path";
    case Command::simulate: return "simulate";
    case Command::diagnose: return "diagnose";
  }
  return "fit";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"l1-penalized quantile regression: fits, penalty calibration, selection paths, Monte Carlo studies",
               "l1qr"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML/INI file of option values; [command] sections, flags take precedence");
  app.require_subcommand(1);

  CLI::App* fit = app.add_subcommand("fit", "l1-QR (and post-l1-QR) at one or more quantile indices");
  add_data_options(fit, cfg);
  fit->add_option("-u,--quantiles", cfg.quantiles, "Quantile indices: lo:hi:step or a comma list")
      ->capture_default_str();
  add_penalty_options(fit, cfg);
  fit->add_flag("!--no-post", cfg.post, "Skip the post-selection refit");
  fit->add_flag("--keep-intercept", cfg.keep_intercept, "Always include the intercept in the refit");
  fit->add_option("--threshold", cfg.threshold, "Also report hard-thresholded coefficients at this level");
  fit->add_flag("--dense", cfg.dense, "Include dense beta, dual scores and basis status");
  add_solver_options(fit, cfg);
  add_output_options(fit, cfg);

  CLI::App* calibrate = app.add_subcommand("calibrate", "Simulate the pivotal statistic and report lambda");
  add_data_options(calibrate, cfg);
  calibrate->add_option("-u,--quantiles", cfg.quantiles, "Quantile set U: lo:hi:step or a comma list")
      ->default_str("0.1:0.9:0.1");
  add_penalty_options(calibrate, cfg);
  add_output_options(calibrate, cfg);

  CLI::App* path = app.add_subcommand("path", "Penalized fits along lambda0, lambda0/2, ..., lambda0/K");
  add_data_options(path, cfg);
  path->add_option("-u,--quantiles", cfg.quantiles, "Single quantile index")->capture_default_str();
  add_penalty_options(path, cfg);
  path->add_option("-K,--steps", cfg.K, "Path length")->capture_default_str();
  path->add_flag("--keep-intercept", cfg.keep_intercept, "Always include the intercept in the refit");
  add_solver_options(path, cfg);
  add_output_options(path, cfg);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo study on the correlated Gaussian design");
  simulate->add_option("-n", cfg.n, "Sample size")->capture_default_str();
  simulate->add_option("-p", cfg.p, "Columns including the intercept")->capture_default_str();
  simulate->add_option("-s", cfg.s, "Number of unit coefficients")->capture_default_str();
  simulate->add_option("--rho", cfg.rho, "AR(1) correlation of the regressors")->capture_default_str();
  simulate->add_option("--sigma", cfg.sigma, "Noise standard deviation")->capture_default_str();
  simulate->add_option("-u,--quantiles", cfg.quantiles, "Quantile index")->capture_default_str();
  simulate->add_option("--reps", cfg.reps, "Replications")->capture_default_str();
  add_penalty_options(simulate, cfg);
  simulate->get_option("--c")->default_str("1");
  simulate->add_flag("--shared-lambda", cfg.shared_lambda,
                     "Calibrate lambda once on the first replication (faster, not conditional on each X)");
  simulate->add_option("--estimators", cfg.estimators, "Subset of canonical, penalized, post, oracle")
      ->delimiter(',')
      ->capture_default_str();
  simulate->add_option("--table", cfg.table_path, "Also write the per-estimator table CSV here");
  simulate->add_option("--histograms", cfg.histogram_path, "Also write the support histograms CSV here");
  simulate->add_flag("--timing", cfg.timing, "Include wall-clock time (makes output nondeterministic)");
  add_output_options(simulate, cfg);

  CLI::App* diagnose = app.add_subcommand("diagnose", "Sparse eigenvalues of the design and support diagnostics");
  add_data_options(diagnose, cfg);
  diagnose->add_option("-k", cfg.k_values, "Sparsity levels")->delimiter(',')->capture_default_str();
  diagnose->add_flag("--greedy", cfg.greedy, "Greedy forward selection (one-sided bounds) instead of enumeration");
  diagnose->add_option("--budget", cfg.budget, "Maximum subsets for exact enumeration")->capture_default_str();
  diagnose->add_option("--truth", cfg.truth, "True support (names or indices) to score a penalized fit against")
      ->delimiter(',');
  diagnose->add_option("-u,--quantiles", cfg.quantiles, "Quantile index for the fit")->capture_default_str();
  add_penalty_options(diagnose, cfg);
  add_solver_options(diagnose, cfg);
  add_output_options(diagnose, cfg);

  for (CLI::App* sub : {fit, calibrate, path, simulate, diagnose}) sub->configurable();

  try {
    // Command-dependent defaults, applied before parsing so that the config
    // file and flags override them.
    std::string command;
    for (int i = 1; i < argc && command.empty(); ++i) {
      for (const char* name : {"fit", "calibrate", "path", "simulate", "diagnose"}) {
        if (name == std::string_view(argv[i])) command = name;
      }
    }
    if (command == "calibrate") cfg.quantiles = "0.1:0.9:0.1";
    if (command == "simulate") cfg.c = 1.0;
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (fit->parsed()) cfg.command = Command::fit;
  if (calibrate->parsed()) cfg.command = Command::calibrate;
  if (path->parsed()) cfg.command = Command::path;
  if (simulate->parsed()) cfg.command = Command::simulate;
  if (diagnose->parsed()) cfg.command = Command::diagnose;

  try {
    switch (cfg.command) {
      case Command::fit: return cmd_fit(cfg, out);
      case Command::calibrate: return cmd_calibrate(cfg, out);
      case Command::path: return cmd_path(cfg, out);
      case Command::simulate: return cmd_simulate(cfg, out);
      case Command::diagnose: return cmd_diagnose(cfg, out);
    }
  } catch (const StageFailure& e) {
    err << "l1qr " << to_string(cfg.command) << ": " << e.stage() << " failed: " << e.what() << '\n';
    return e.code();
  }
  return kExitOk;
}

}  // namespace l1qr::cli
