#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "l1qr/io.hpp"

namespace l1qr {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_number(std::string_view cell, double& value) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(value);
}

}  // namespace

LoadedData parse_csv_dataset(const std::filesystem::path& path, const std::string& response_column,
                             bool add_intercept, char delimiter) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open data file '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("data file '" + path.string() + "' is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header;
  for (auto h : split(line, delimiter)) header.emplace_back(h);

  std::size_t response = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == response_column) response = c;
  }
  if (response == header.size()) {
    std::size_t idx = 0;
    const auto [ptr, ec] =
        std::from_chars(response_column.data(), response_column.data() + response_column.size(), idx);
    if (ec != std::errc() || ptr != response_column.data() + response_column.size() || idx >= header.size()) {
      std::ostringstream msg;
      msg << "response column '" << response_column << "' not found: no such header name and not a column index in [0, "
          << header.size() << ")";
      throw InvalidArgument(msg.str());
    }
    response = idx;
  }
  if (header.size() < 2) throw InvalidArgument("data file needs a response and at least one regressor column");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> problems;
  std::size_t bad_rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, delimiter);
    if (cells.size() != header.size()) {
      ++bad_rows;
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << header.size() << " fields, found " << cells.size();
      problems.push_back(msg.str());
      continue;
    }
    std::vector<double> row(cells.size());
    bool row_ok = true;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_number(cells[c], row[c])) {
        row_ok = false;
        std::ostringstream msg;
        msg << "line " << line_no << ", column '" << header[c] << "': non-numeric value \"" << cells[c] << "\"";
        problems.push_back(msg.str());
      }
    }
    if (row_ok) {
      rows.push_back(std::move(row));
    } else {
      ++bad_rows;
    }
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << bad_rows << " malformed row(s) in '" << path.string() << "':";
    const std::size_t shown = std::min<std::size_t>(problems.size(), 20);
    for (std::size_t k = 0; k < shown; ++k) msg << "\n  " << problems[k];
    if (problems.size() > shown) msg << "\n  ... and " << problems.size() - shown << " more";
    throw InvalidArgument(msg.str());
  }
  if (rows.size() < 2) throw InvalidArgument("data file needs at least 2 data rows");

  const auto n = static_cast<Index>(rows.size());
  const Index offset = add_intercept ? 1 : 0;
  const auto p = static_cast<Index>(header.size()) - 1 + offset;
  Matrix X(n, p);
  Vector y(n);
  LoadedData out{Dataset{}, {}, header[response]};
  if (add_intercept) out.column_names.emplace_back("(intercept)");
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != response) out.column_names.push_back(header[c]);
  }
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (add_intercept) X(i, 0) = 1.0;
    Index col = offset;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == response) {
        y[i] = row[c];
      } else {
        X(i, col++) = row[c];
      }
    }
  }
  out.data = build_dataset(std::move(X), std::move(y), add_intercept ? std::optional<Index>(0) : std::nullopt);
  return out;
}

}  // namespace l1qr
