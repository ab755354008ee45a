#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bailout/dividend_solver.hpp"

namespace bailout {

enum class ConstraintStatus { Infeasible, PayNothing, UnconstrainedOptimum, InteriorOptimum };

std::string to_string(ConstraintStatus status);

/// Solution of: maximize expected dividends subject to expected discounted
/// injections <= K.
struct ConstraintSolution {
  ConstraintStatus status = ConstraintStatus::Infeasible;
  /// Optimal multiplier; absent for Infeasible and PayNothing.
  std::optional<double> lambda_star;
  Policy policy = PayNothing{};
  /// Constrained value; absent (minus infinity) when infeasible.
  std::optional<double> value;
  /// Expected injections of the returned policy.
  double injections_check = 0;
  std::vector<std::string> warnings;
};

/// Injections under the barrier-a policy started at x.
double psi_x(const ScaleEngine& engine, double x, double a);
/// Injections under the pay-nothing policy: -k(x) + Z(x)/Phi(q).
double k_lower(const ScaleEngine& engine, double x);
/// Injections under the barrier at 0: (c - psi'(0+))/q for bounded
/// variation, +inf otherwise.
double k_upper(const ScaleEngine& engine);
/// Injections under the reflected (c1, c2) policy started at x.
double psi_bar(const ScaleEngine& engine, double x, double c1, double c2);

/// Boundary tolerance for classifying K against the feasibility floor.
inline constexpr double kFloorTolerance = 1e-9;

ConstraintSolution solve_no_cost(const ScaleEngine& engine, double x, double K);
ConstraintSolution solve_with_cost(const ScaleEngine& engine, double x, double K,
                                   double delta);
/// Dispatches on delta (0 selects the barrier problem).
ConstraintSolution solve_constrained(const ScaleEngine& engine, double x, double K,
                                     double delta);

/// Lambda curves lambda K + V_lambda(x) over a grid, their pointwise minimum
/// and its argmin. curves[i][j] belongs to x_grid[i], lambda_grid[j].
struct DualEnvelope {
  std::vector<double> x_grid;
  std::vector<double> lambda_grid;
  std::vector<std::vector<double>> curves;
  std::vector<double> envelope;
  std::vector<double> argmin;
};

DualEnvelope dual_envelope(const ScaleEngine& engine, const std::vector<double>& x_grid,
                           double K, const std::vector<double>& lambda_grid,
                           double delta);

}  // namespace bailout
