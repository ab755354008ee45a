#include "bailout_cli/grid.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "bailout/errors.hpp"

namespace bailout::cli {

namespace {

double parse_number(std::string_view text, std::string_view spec) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v))
    throw DomainError("bad number '" + std::string(text) + "' in grid '" + std::string(spec) + "'");
  return v;
}

void append_range(std::vector<double>& out, double start, double step, double stop,
                  std::string_view spec) {
  if (!(step > 0) || stop < start)
    throw DomainError("grid range needs step > 0 and stop >= start: '" + std::string(spec) + "'");
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  if (n > 10'000'000) throw DomainError("grid too large: '" + std::string(spec) + "'");
  for (long i = 0; i <= n; ++i) out.push_back(start + i * step);
}

}  // namespace

std::vector<double> figure_lambda_grid() {
  std::vector<double> g;
  for (int i = 10; i <= 20; ++i) g.push_back(i / 10.0);
  for (double decade = 1; decade <= 1000; decade *= 10)
    for (int m = 2; m <= 10; ++m) {
      if (decade == 1 && m == 2) continue;
      g.push_back(m * decade);
    }
  g.push_back(20000);
  return g;
}

std::vector<double> parse_grid(std::string_view spec) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = spec.find(',', pos);
    std::string_view item = spec.substr(pos, comma == std::string_view::npos ? spec.npos : comma - pos);
    if (item == "figure") {
      const auto g = figure_lambda_grid();
      out.insert(out.end(), g.begin(), g.end());
    } else if (const auto c1 = item.find(':'); c1 != std::string_view::npos) {
      const auto c2 = item.find(':', c1 + 1);
      if (c2 == std::string_view::npos || item.find(':', c2 + 1) != std::string_view::npos)
        throw DomainError("grid range must be start:step:stop: '" + std::string(item) + "'");
      append_range(out, parse_number(item.substr(0, c1), spec),
                   parse_number(item.substr(c1 + 1, c2 - c1 - 1), spec),
                   parse_number(item.substr(c2 + 1), spec), spec);
    } else {
      out.push_back(parse_number(item, spec));
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw DomainError("empty grid");
  return out;
}

}  // namespace bailout::cli
