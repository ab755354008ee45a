#include "bailout/dividend_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bailout/errors.hpp"
#include "bailout/root_finding.hpp"

namespace bailout {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArgTol = 1e-10;

void check_lambda(double lambda) {
  if (!(lambda >= 1.0) || !std::isfinite(lambda))
    throw DomainError("lambda must be >= 1 (the value is infinite for lambda < 1)");
}

void check_x(double x) {
  if (!(x >= 0) || !std::isfinite(x)) throw DomainError("initial capital x must be >= 0");
}

struct Overloaded {
  const ScaleEngine& engine;
  double lambda;
  double x;
  ValueReport operator()(const PayNothing&) const {
    const double inj = -engine.k(x) + engine.z(x) / engine.phi();
    return {x, lambda, 0.0, inj, -lambda * inj};
  }
  ValueReport operator()(const Barrier& b) const {
    return barrier_value(engine, lambda, b.a, x);
  }
  ValueReport operator()(const ReflectedPair& p) const {
    return pair_value(engine, lambda, p.c1, p.c2, p.delta, x);
  }
};

}  // namespace

std::string describe(const Policy& policy) {
  std::ostringstream out;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PayNothing>)
          out << "pay_nothing";
        else if constexpr (std::is_same_v<T, Barrier>)
          out << "barrier(a=" << p.a << ")";
        else
          out << "pair(c1=" << p.c1 << ", c2=" << p.c2 << ", delta=" << p.delta << ")";
      },
      policy);
  return out.str();
}

double zeta(const ScaleEngine& engine, double lambda, double a) {
  check_lambda(lambda);
  if (!(a > 0)) throw DomainError("zeta: a must be > 0");
  const auto v = engine.values(a);
  return (1.0 - lambda * (1.0 + engine.q() * v.w_bar)) / (engine.q() * v.w);
}

double zeta_at_zero(const ScaleEngine& engine, double lambda) {
  check_lambda(lambda);
  const double w0 = engine.w_at_zero();
  if (w0 > 0) return (1.0 - lambda) / (engine.q() * w0);
  return lambda == 1.0 ? 0.0 : -kInf;
}

double optimal_barrier(const ScaleEngine& engine, double lambda) {
  check_lambda(lambda);
  const double y = 1.0 / lambda;
  if (y >= engine.h_at_zero()) return 0.0;
  return engine.h_inverse(y);
}

ValueReport barrier_value(const ScaleEngine& engine, double lambda, double a,
                          double x) {
  check_lambda(lambda);
  check_x(x);
  if (!(a >= 0) || !std::isfinite(a)) throw DomainError("barrier level must be >= 0");
  const double q = engine.q();
  const double wa = engine.w(a);
  if (wa <= 0) {
    if (a > 0) throw NumericalError("barrier_value: W(a) is not positive");
    // Unbounded variation, a = 0: local-time payments on both sides.
    const double mean = engine.model().mean() / q;
    return {x, lambda, kInf, kInf, lambda == 1.0 ? x + mean : -kInf};
  }
  const double y = std::min(x, a);
  const double za = engine.z(a);
  const double zy = engine.z(y);
  double div = zy / (q * wa);
  const double inj = zy * za / (q * wa) - engine.k(y);
  if (x > a) div += x - a;
  return {x, lambda, div, inj, div - lambda * inj};
}

double pair_objective(const ScaleEngine& engine, double lambda, double c1,
                      double c2, double delta) {
  if (!(c1 >= 0 && c1 < c2)) throw DomainError("G: need 0 <= c1 < c2");
  const double dz = engine.z(c2) - engine.z(c1);
  if (!(dz > 0)) return -kInf;
  return (c2 - c1 - delta - lambda * (engine.z_bar(c2) - engine.z_bar(c1))) / dz;
}

Thresholds optimal_thresholds(const ScaleEngine& engine, double lambda,
                              double delta) {
  check_lambda(lambda);
  if (!(delta > 0) || !std::isfinite(delta))
    throw DomainError("optimal_thresholds: delta must be > 0 (use the barrier for delta = 0)");
  const double a = optimal_barrier(engine, lambda);
  const double z0 = zeta_at_zero(engine, lambda);
  const double za = a > 0 ? zeta(engine, lambda, a) : z0;

  // Lower threshold paired with c2: the point left of a with the same zeta.
  auto c1_of = [&](double c2) {
    const double target = zeta(engine, lambda, c2);
    if (a <= 0 || z0 >= target) return 0.0;
    return roots::bisect([&](double c) { return zeta(engine, lambda, c) - target; },
                         0.0, a, z0 - target, za - target, "c1(c2)", {.abs_tol = kArgTol});
  };
  auto phi = [&](double c2) {
    return pair_objective(engine, lambda, c1_of(c2), c2, delta) - zeta(engine, lambda, c2);
  };

  const double cap = engine.max_range();
  const double hi = roots::expand_until([&](double c2) { return phi(c2) > 0; }, a,
                                        a + 1.0, cap, "c2 bracketing");
  const double c2 =
      roots::bisect(phi, a, hi, -kInf, phi(hi), "c2", {.abs_tol = kArgTol});

  Thresholds t;
  t.c1 = c1_of(c2);
  t.c2 = c2;
  t.a_lambda = a;
  t.g_max = pair_objective(engine, lambda, t.c1, c2, delta);
  const double zc2 = zeta(engine, lambda, c2);
  t.zeta_gap = t.c1 > 0 ? zeta(engine, lambda, t.c1) - zc2 : 0.0;
  t.foc_residual = t.g_max - zc2;
  return t;
}

ValueReport pair_value(const ScaleEngine& engine, double lambda, double c1,
                       double c2, double delta, double x) {
  check_lambda(lambda);
  check_x(x);
  if (!(c1 >= 0 && c1 < c2) || !(delta >= 0))
    throw DomainError("pair_value: need 0 <= c1 < c2 and delta >= 0");
  const double z1 = engine.z(c1), z2 = engine.z(c2);
  const double k1 = engine.k(c1), k2 = engine.k(c2);
  const double dz = z2 - z1;
  // Renewal at the first payment: from c1 the process climbs to c2, pays and
  // restarts at c1.
  const double lump = c2 - c1 - delta;
  const double div_c1 = lump * z1 / dz;
  const double inj_c1 = (k2 * z1 - k1 * z2) / dz;
  ValueReport r{x, lambda, 0, 0, 0};
  if (x > c2) {
    r.dividends_npv = x - c1 - delta + div_c1;
    r.injections_npv = inj_c1;
  } else {
    const double zx = engine.z(x);
    r.dividends_npv = lump * zx / dz;
    r.injections_npv = -engine.k(x) + zx / z2 * (k2 + inj_c1);
  }
  r.combined = r.dividends_npv - lambda * r.injections_npv;
  return r;
}

ValueReport policy_value(const ScaleEngine& engine, double lambda,
                         const Policy& policy, double x) {
  check_lambda(lambda);
  check_x(x);
  return std::visit(Overloaded{engine, lambda, x}, policy);
}

Policy optimal_policy(const ScaleEngine& engine, double lambda, double delta) {
  if (delta == 0.0) return Barrier{optimal_barrier(engine, lambda)};
  const auto t = optimal_thresholds(engine, lambda, delta);
  return ReflectedPair{t.c1, t.c2, delta};
}

ValueReport value_function(const ScaleEngine& engine, double lambda,
                           double delta, double x) {
  return policy_value(engine, lambda, optimal_policy(engine, lambda, delta), x);
}

}  // namespace bailout
