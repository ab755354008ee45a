#include "bailout/constraint_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bailout/errors.hpp"
#include "bailout/root_finding.hpp"

namespace bailout {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLambdaCap = 1e6;
// Geometric scan ratio for the multiplier search (eight points per doubling).
const double kScanRatio = std::exp2(0.125);

void check_inputs(double x, double K) {
  if (!(x >= 0) || !std::isfinite(x)) throw DomainError("x must be >= 0");
  if (!(K >= 0) || !std::isfinite(K)) throw DomainError("K must be >= 0");
}

// Shared Infeasible / PayNothing classification; empty when K is above the floor.
std::optional<ConstraintSolution> classify_floor(const ScaleEngine& engine, double x,
                                                 double K) {
  const double floor = k_lower(engine, x);
  ConstraintSolution s;
  s.injections_check = floor;
  if (K < floor - kFloorTolerance) {
    s.status = ConstraintStatus::Infeasible;
    return s;
  }
  if (K <= floor + kFloorTolerance) {
    s.status = ConstraintStatus::PayNothing;
    s.value = 0.0;
    return s;
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(ConstraintStatus status) {
  switch (status) {
    case ConstraintStatus::Infeasible:
      return "infeasible";
    case ConstraintStatus::PayNothing:
      return "pay_nothing";
    case ConstraintStatus::UnconstrainedOptimum:
      return "unconstrained";
    case ConstraintStatus::InteriorOptimum:
      return "interior";
  }
  return "unknown";
}

double psi_x(const ScaleEngine& engine, double x, double a) {
  if (!(a > 0) && !(a == 0 && engine.model().is_bounded_variation()))
    throw DomainError("psi_x: a must be > 0");
  return barrier_value(engine, 1.0, a, x).injections_npv;
}

double k_lower(const ScaleEngine& engine, double x) {
  if (!(x >= 0)) throw DomainError("k_lower: x must be >= 0");
  return -engine.k(x) + engine.z(x) / engine.phi();
}

double k_upper(const ScaleEngine& engine) {
  const auto& m = engine.model();
  if (!m.is_bounded_variation()) return kInf;
  return (m.drift() - m.mean()) / engine.q();
}

double psi_bar(const ScaleEngine& engine, double x, double c1, double c2) {
  if (!(c1 >= 0 && c1 < c2)) throw DomainError("psi_bar: need 0 <= c1 < c2");
  if (!(x >= 0)) throw DomainError("psi_bar: x must be >= 0");
  const double z1 = engine.z(c1), z2 = engine.z(c2);
  const double zb1 = engine.z_bar(c1), zb2 = engine.z_bar(c2);
  const double dz = z2 - z1;
  if (x <= c2) return engine.z(x) * (zb2 - zb1) / dz - engine.k(x);
  return (zb2 * z1 - zb1 * z2) / dz - engine.model().mean() / engine.q();
}

ConstraintSolution solve_no_cost(const ScaleEngine& engine, double x, double K) {
  check_inputs(x, K);
  if (auto s = classify_floor(engine, x, K)) return *s;

  ConstraintSolution s;
  if (K >= k_upper(engine)) {
    // Barrier at 0 already meets the budget; the remaining slack is returned
    // at par.
    s.status = ConstraintStatus::UnconstrainedOptimum;
    s.lambda_star = 1.0;
    s.policy = Barrier{0.0};
    s.value = K + x + engine.model().mean() / engine.q();
    s.injections_check = psi_x(engine, x, 0.0);
    return s;
  }

  auto f = [&](double a) { return psi_x(engine, x, a) - K; };
  const double f0 = k_upper(engine) - K;
  const double hi = roots::expand_until([&](double a) { return f(a) < 0; }, 0.0, 1.0,
                                        engine.max_range(), "psi_x inversion");
  const double a = roots::bisect(f, 0.0, hi, f0, f(hi), "psi_x inversion",
                                 {.abs_tol = 1e-13 * std::max(1.0, hi)});
  s.status = ConstraintStatus::InteriorOptimum;
  s.lambda_star = 1.0 / engine.h(a);
  s.policy = Barrier{a};
  const auto report = barrier_value(engine, *s.lambda_star, a, x);
  s.value = report.dividends_npv;
  s.injections_check = report.injections_npv;
  return s;
}

ConstraintSolution solve_with_cost(const ScaleEngine& engine, double x, double K,
                                   double delta) {
  check_inputs(x, K);
  if (!(delta > 0)) throw DomainError("solve_with_cost: delta must be > 0");
  if (auto s = classify_floor(engine, x, K)) return *s;

  ConstraintSolution s;
  const auto t1 = optimal_thresholds(engine, 1.0, delta);
  const double ceiling = psi_bar(engine, x, t1.c1, t1.c2);
  if (K >= ceiling) {
    const auto v1 = pair_value(engine, 1.0, t1.c1, t1.c2, delta, x);
    s.status = ConstraintStatus::UnconstrainedOptimum;
    s.lambda_star = 1.0;
    s.policy = ReflectedPair{t1.c1, t1.c2, delta};
    s.value = v1.combined + K;
    s.injections_check = v1.injections_npv;
    return s;
  }

  auto gap = [&](double lambda) {
    const auto t = optimal_thresholds(engine, lambda, delta);
    return psi_bar(engine, x, t.c1, t.c2) - K;
  };

  std::ostringstream trace;
  double lambda_max = 2.0;
  for (double g = gap(lambda_max); g >= 0; g = gap(lambda_max)) {
    trace << " D(" << lambda_max << ")=" << g;
    lambda_max *= 2.0;
    if (lambda_max > kLambdaCap)
      throw NumericalError("multiplier scan found no sign change up to " +
                           std::to_string(kLambdaCap) + ":" + trace.str());
  }

  std::vector<double> grid{1.0};
  while (grid.back() * kScanRatio < lambda_max) grid.push_back(grid.back() * kScanRatio);
  grid.push_back(lambda_max);
  std::vector<double> d(grid.size());
  d[0] = ceiling - K;
  for (std::size_t i = 1; i < grid.size(); ++i) d[i] = gap(grid[i]);

  struct Candidate {
    double lambda, dual;
  };
  std::vector<Candidate> roots_found;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if ((d[i] >= 0) == (d[i + 1] >= 0)) continue;
    const double l = roots::bisect(gap, grid[i], grid[i + 1], d[i], d[i + 1],
                                   "multiplier", {.abs_tol = 1e-12 * grid[i + 1]});
    const double v = value_function(engine, l, delta, x).combined;
    roots_found.push_back({l, l * K + v});
  }
  if (roots_found.empty())
    throw NumericalError("multiplier scan: no sign change on the refined grid");

  auto best = roots_found.begin();
  for (auto it = roots_found.begin(); it != roots_found.end(); ++it)
    if (it->dual < best->dual) best = it;
  if (roots_found.size() > 1) {
    std::ostringstream w;
    w << roots_found.size() << " multiplier roots found; chose lambda=" << best->lambda
      << " (smallest dual value)";
    s.warnings.push_back(w.str());
  }

  const auto t = optimal_thresholds(engine, best->lambda, delta);
  const auto report = pair_value(engine, best->lambda, t.c1, t.c2, delta, x);
  s.status = ConstraintStatus::InteriorOptimum;
  s.lambda_star = best->lambda;
  s.policy = ReflectedPair{t.c1, t.c2, delta};
  s.value = report.dividends_npv;
  s.injections_check = psi_bar(engine, x, t.c1, t.c2);
  return s;
}

ConstraintSolution solve_constrained(const ScaleEngine& engine, double x, double K,
                                     double delta) {
  if (delta == 0.0) return solve_no_cost(engine, x, K);
  return solve_with_cost(engine, x, K, delta);
}

DualEnvelope dual_envelope(const ScaleEngine& engine, const std::vector<double>& x_grid,
                           double K, const std::vector<double>& lambda_grid,
                           double delta) {
  if (x_grid.empty() || lambda_grid.empty())
    throw DomainError("dual_envelope: grids must be nonempty");
  DualEnvelope out;
  out.x_grid = x_grid;
  out.lambda_grid = lambda_grid;
  out.curves.assign(x_grid.size(), std::vector<double>(lambda_grid.size()));
  for (std::size_t j = 0; j < lambda_grid.size(); ++j) {
    const double lambda = lambda_grid[j];
    const Policy policy = optimal_policy(engine, lambda, delta);
    for (std::size_t i = 0; i < x_grid.size(); ++i)
      out.curves[i][j] = lambda * K + policy_value(engine, lambda, policy, x_grid[i]).combined;
  }
  out.envelope.resize(x_grid.size());
  out.argmin.resize(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < lambda_grid.size(); ++j)
      if (out.curves[i][j] < out.curves[i][best]) best = j;
    out.envelope[i] = out.curves[i][best];
    out.argmin[i] = lambda_grid[best];
  }
  return out;
}

}  // namespace bailout
