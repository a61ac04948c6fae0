#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "l1qr/core.hpp"

namespace l1qr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

enum class Command { fit, calibrate, path, simulate, diagnose };
enum class Format { json, csv };

std::string to_string(Command c);

// Everything a command reads. Fields irrelevant to a command keep their
// defaults and are left out of its echoed configuration.
struct RunConfig {
  Command command = Command::fit;

  std::string input_path;
  std::string response_column = "y";
  bool add_intercept = true;
  char delimiter = ',';

  std::string quantiles = "0.5";
  double alpha = 0.1;
  double c = 2.0;
  std::size_t R = 1000;
  std::uint64_t seed = 0;
  std::optional<double> lambda;
  int K = 5;

  bool post = true;
  bool keep_intercept = false;
  bool exempt_intercept = false;
  std::optional<double> threshold;
  bool dense = false;
  std::size_t max_pivots = 0;

  // simulate
  Index n = 200;
  Index p = 1000;
  Index s = 5;
  double rho = 0.0;
  double sigma = 1.0;
  std::size_t reps = 100;
  std::vector<std::string> estimators{"penalized", "post", "oracle"};
  bool shared_lambda = false;
  bool timing = false;
  std::string table_path;
  std::string histogram_path;

  // diagnose
  std::vector<Index> k_values{1, 2};
  bool greedy = false;
  std::size_t budget = 2'000'000;
  std::vector<std::string> truth;

  std::string output_path;
  Format format = Format::json;
  std::size_t threads = 0;
};

// "lo:hi:step" (inclusive range, U = [lo, hi]) or a comma list "a,b,c".
QuantileGrid parse_quantile_spec(const std::string& spec);

// Entry point behind the `l1qr` executable. Help goes to `out`, diagnostics
// to `err`; artifacts go to --output or, without it, to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace l1qr::cli
