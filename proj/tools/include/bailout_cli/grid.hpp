#pragma once

#include <string_view>
#include <vector>

namespace bailout::cli {

/// Parses a grid specification: a comma-separated list whose items are
/// numbers or inclusive ranges "start:step:stop". The keyword "figure" expands
/// to the multiplier grid 1, 1.1, ..., 2, 3, ..., 10, 20, ..., 100, 200, ...,
/// 1000, 2000, ..., 10000, 20000. Throws DomainError on malformed input.
std::vector<double> parse_grid(std::string_view spec);

std::vector<double> figure_lambda_grid();

}  // namespace bailout::cli
