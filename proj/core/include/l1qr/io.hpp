#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "l1qr/core.hpp"
#include "l1qr/diagnostics.hpp"
#include "l1qr/estimators.hpp"
#include "l1qr/penalty.hpp"
#include "l1qr/simulation.hpp"

namespace l1qr {

// Insertion-ordered JSON, so artifacts have a stable key order.
using Json = nlohmann::ordered_json;

struct LoadedData {
  Dataset data;
  // Names of the columns of data.X(), "(intercept)" first when added.
  std::vector<std::string> column_names;
  std::string response_name;
};

// Reads a headed CSV. `response_column` is a header name or, failing that, a
// 0-based column index. Every non-numeric cell is reported with its line
// number. Throws InvalidArgument.
LoadedData parse_csv_dataset(const std::filesystem::path& path, const std::string& response_column,
                             bool add_intercept, char delimiter = ',');

// Shortest round-trip decimal form.
std::string format_double(double v);

Json to_json(const QuantileFit& fit, const std::vector<std::string>& names, bool dense = false);
Json to_json(const PostFit& post, const std::vector<std::string>& names, bool dense = false);
Json to_json(const PenaltyCalibration& cal, bool include_samples = true);
Json to_json(const std::vector<PathPoint>& path, const std::vector<std::string>& names);
Json to_json(const SparseEigenResult& res);
Json to_json(const SupportMetrics& m);
Json to_json(const ExperimentConfig& cfg);
Json to_json(const ExperimentReport& report, bool include_timing = false);

// Coefficients as {"name": value} over the nonzero entries.
Json sparse_coefficients(const Vector& beta, const std::vector<std::string>& names);

// One row per estimator, fixed order canonical, penalized, post, oracle.
std::string report_table_csv(const ExperimentReport& report);
// Long format: estimator,histogram,bin,count.
std::string report_histograms_csv(const ExperimentReport& report);
// One row per (lambda, column) with penalized and refit coefficients.
std::string path_table_csv(const std::vector<PathPoint>& path, const std::vector<std::string>& names);

// Writes to a temporary sibling and renames it over `path`, so readers never
// observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace l1qr
