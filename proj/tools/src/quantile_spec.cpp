#include <charconv>
#include <cmath>
#include <string_view>

#include "l1qr/cli.hpp"

namespace l1qr::cli {
namespace {

double parse_real(std::string_view s, const std::string& spec) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("malformed quantile spec '" + spec + "'");
  }
  return v;
}

}  // namespace

QuantileGrid parse_quantile_spec(const std::string& spec) {
  const std::string_view sv(spec);
  if (sv.find(':') != std::string_view::npos) {
    const auto first = sv.find(':');
    const auto second = sv.find(':', first + 1);
    if (second == std::string_view::npos || sv.find(':', second + 1) != std::string_view::npos) {
      throw InvalidArgument("quantile range must look like lo:hi:step, got '" + spec + "'");
    }
    const double lo = parse_real(sv.substr(0, first), spec);
    const double hi = parse_real(sv.substr(first + 1, second - first - 1), spec);
    const double step = parse_real(sv.substr(second + 1), spec);
    if (!(step > 0.0)) throw InvalidArgument("quantile range step must be positive");
    if (!(lo <= hi)) throw InvalidArgument("quantile range needs lo <= hi");
    std::vector<double> pts;
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long k = 0; k <= count; ++k) {
      // Round away accumulated binary error, so 0.1:0.9:0.1 yields 0.3, not 0.30000000000000004.
      pts.push_back(std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12);
    }
    return QuantileGrid(pts, lo, hi);
  }

  std::vector<double> pts;
  std::size_t start = 0;
  while (true) {
    const auto comma = sv.find(',', start);
    pts.push_back(parse_real(sv.substr(start, comma == std::string_view::npos ? sv.npos : comma - start), spec));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return QuantileGrid(pts);
}

}  // namespace l1qr::cli
