#pragma once

#include <string>
#include <variant>

#include "bailout/scale_functions.hpp"

namespace bailout {

struct PayNothing {};

/// Pay everything above `a` (continuous reflection, no fixed cost).
struct Barrier {
  double a;
};

/// Whenever the surplus is at or above c2, pay it down to c1 at cost delta.
struct ReflectedPair {
  double c1;
  double c2;
  double delta;
};

using Policy = std::variant<PayNothing, Barrier, ReflectedPair>;

std::string describe(const Policy& policy);

/// Expected discounted dividends (net of fixed costs) and injections for a
/// policy started at x, with combined = dividends - lambda * injections.
struct ValueReport {
  double x = 0;
  double lambda = 1;
  double dividends_npv = 0;
  double injections_npv = 0;
  double combined = 0;
};

struct Thresholds {
  double c1 = 0;
  double c2 = 0;
  double a_lambda = 0;
  /// G(c1, c2) at the optimum.
  double g_max = 0;
  /// zeta(c1) - zeta(c2); zero up to solver tolerance when c1 > 0.
  double zeta_gap = 0;
  /// G(c1, c2) - zeta(c2).
  double foc_residual = 0;
};

/// zeta(a) = (1 - lambda Z(a)) / (q W(a)), a > 0.
double zeta(const ScaleEngine& engine, double lambda, double a);
/// Limit of zeta at 0+ (may be -inf).
double zeta_at_zero(const ScaleEngine& engine, double lambda);

/// Maximizer of zeta: 0 when 1/lambda >= H(0+), else H^{-1}(1/lambda).
double optimal_barrier(const ScaleEngine& engine, double lambda);

/// Barrier policy at level a. a = 0 is accepted for bounded variation. For
/// unbounded variation at a = 0 both parts are infinite and combined is the
/// limit as a -> 0+ (x + psi'(0+)/q when lambda = 1, -inf otherwise).
ValueReport barrier_value(const ScaleEngine& engine, double lambda, double a,
                          double x);

/// G(c1, c2) = (c2 - c1 - delta - lambda (Zbar(c2) - Zbar(c1))) / (Z(c2) - Z(c1)).
double pair_objective(const ScaleEngine& engine, double lambda, double c1,
                      double c2, double delta);

/// Unique maximizer of G for delta > 0.
Thresholds optimal_thresholds(const ScaleEngine& engine, double lambda,
                              double delta);

ValueReport pair_value(const ScaleEngine& engine, double lambda, double c1,
                       double c2, double delta, double x);

/// Value of an arbitrary policy. PayNothing gives zero dividends and the
/// injections of the uncontrolled reflected process.
ValueReport policy_value(const ScaleEngine& engine, double lambda,
                         const Policy& policy, double x);

/// Optimal policy of the lambda-problem: barrier at a_lambda when delta = 0,
/// the optimal reflected pair otherwise.
Policy optimal_policy(const ScaleEngine& engine, double lambda, double delta);

/// V_lambda(x) with its decomposition under the optimal policy.
ValueReport value_function(const ScaleEngine& engine, double lambda,
                           double delta, double x);

}  // namespace bailout
