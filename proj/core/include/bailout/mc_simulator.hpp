#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bailout/dividend_solver.hpp"
#include "bailout/levy_model.hpp"

namespace bailout {

struct SimConfig {
  std::size_t n_paths = 100000;
  /// Step of the Gaussian part near the boundaries. Extremes inside a step
  /// are sampled from the exact Brownian-bridge law, so the step only
  /// affects the timing of in-step payments (discounted at the step
  /// midpoint). Far from every boundary longer steps are taken.
  double time_step = 1e-2;
  /// Truncation time; defaults to 6 ln(10) / q.
  std::optional<double> horizon;
  std::uint64_t seed = 1;
  /// Pairs paths with negated Gaussian increments and shared jumps.
  bool antithetic = true;
  /// Payments are discounted by exp(-q t) up to this time. Afterwards each
  /// path is killed at an independent Exp(q) time and later payments carry
  /// the fixed weight exp(-q kill_after). Same expectation, much shorter
  /// paths; unset means pure discounting up to the horizon.
  std::optional<double> kill_after;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct SimResult {
  double dividends_mean = 0;
  double dividends_se = 0;
  double injections_mean = 0;
  double injections_se = 0;
  double payments_count_mean = 0;
  std::size_t n_paths_used = 0;
  double horizon = 0;
  /// Heuristic bound on the discounted value left beyond the horizon.
  double truncation_bound = 0;
  /// Set when truncation_bound exceeds a tenth of the dividend standard error.
  bool horizon_warning = false;
};

/// Discounted-indicator estimates for an exit problem.
struct ExitEstimate {
  double first_mean = 0;
  double first_se = 0;
  double second_mean = 0;
  double second_se = 0;
  std::size_t n_paths_used = 0;
};

/// Dividends (net of fixed costs), injections and payment counts of the
/// controlled process started at x.
SimResult simulate_policy(const LevyModel& model, const Policy& policy, double x,
                          double q, const SimConfig& config);

/// first: E_x[e^{-q tau_a+}; tau_a+ < tau_b-], second: E_x[e^{-q tau_b-}; tau_b- < tau_a+].
ExitEstimate simulate_exit(const LevyModel& model, double x, double b, double a,
                           double q, const SimConfig& config);

/// Process reflected at 0 and stopped at the first passage above b.
/// first: E_x[e^{-q kappa_b}], second: discounted injections before kappa_b.
ExitEstimate simulate_reflected_upcross(const LevyModel& model, double x, double b,
                                        double q, const SimConfig& config);

struct TracePoint {
  double t;
  double state;
};

/// Controlled state at every step end of the first simulated path.
std::vector<TracePoint> trace_policy_path(const LevyModel& model, const Policy& policy,
                                          double x, double q, const SimConfig& config);

}  // namespace bailout
