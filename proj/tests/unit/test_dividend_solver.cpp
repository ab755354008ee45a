#include <catch_amalgamated.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "bailout/dividend_solver.hpp"
#include "bailout/errors.hpp"
#include "oracles.hpp"

using namespace bailout;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const LevyModel kJumpDiffusion(1.0, 0.5, CompoundPoisson{0.4, GammaJumps{1.0, 2.0}});
const LevyModel kBrownian(1.0, 0.5);
const LevyModel kCramerLundberg(1.0, 0.0, CompoundPoisson{0.4, ExponentialJumps{2.0}});
constexpr double kQ = 0.1;
constexpr double kDelta = 0.05;

const ScaleEngine& jump_diffusion_engine() {
  static const ScaleEngine e(kJumpDiffusion, kQ);
  return e;
}

double combined(const ScaleEngine& e, double lambda, const Policy& p, double x) {
  return policy_value(e, lambda, p, x).combined;
}

// Brownian reference problem built only from the residue oracle.
struct BrownianReference {
  oracle::ResidueSum r = oracle::brownian_model(1.0, 0.5, kQ);
  double w(double x) const { return r.w(x); }
  double z(double x) const { return 1 + kQ * r.w_bar(x); }
  double z_bar(double x) const { return x + kQ * r.w_bar_bar(x); }
  double zeta(double lambda, double a) const { return (1 - lambda * z(a)) / (kQ * w(a)); }
  double g(double lambda, double c1, double c2, double delta) const {
    return (c2 - c1 - delta - lambda * (z_bar(c2) - z_bar(c1))) / (z(c2) - z(c1));
  }
  double barrier(double lambda) const {
    return oracle::golden_max([&](double a) { return zeta(lambda, a); }, 1e-9, 30);
  }
  // Nested maximization of G: inner over c1 in [0, c2), outer over c2.
  std::pair<double, double> pair(double lambda, double delta) const {
    auto best_c1 = [&](double c2) {
      const double c1 = oracle::golden_max(
          [&](double c) { return g(lambda, c, c2, delta); }, 0, c2 - delta, 1e-13);
      return g(lambda, 0, c2, delta) >= g(lambda, c1, c2, delta) ? 0.0 : c1;
    };
    const double c2 = oracle::golden_max(
        [&](double c) { return g(lambda, best_c1(c), c, delta); }, delta * 1.01, 30, 1e-13);
    return {best_c1(c2), c2};
  }
};

}  // namespace

TEST_CASE("zeta limits", "[dividend_solver]") {
  const auto& e = jump_diffusion_engine();
  // The approach to -lambda/Phi is monotone; at q = 0.1 it is within 5% from a = 15.
  double prev = zeta(e, 2.0, 5.0);
  for (double a = 6; a <= 30; a += 1) {
    const double v = zeta(e, 2.0, a);
    CHECK(v < prev);
    CHECK(v > -2.0 / e.phi());
    prev = v;
  }
  CHECK_THAT(zeta(e, 2.0, 15.0), WithinRel(-2.0 / e.phi(), 0.05));
  CHECK_THAT(zeta(e, 2.0, 40.0), WithinRel(-2.0 / e.phi(), 1e-3));
  CHECK(zeta_at_zero(e, 2.0) == -std::numeric_limits<double>::infinity());
  CHECK(zeta(e, 2.0, 1e-6) < -1e5);
  CHECK_THROWS_AS(zeta(e, 2.0, 0.0), DomainError);
  CHECK_THROWS_AS(zeta(e, 0.5, 1.0), DomainError);

  const ScaleEngine cl(kCramerLundberg, kQ);
  CHECK(zeta_at_zero(cl, 1.0) == 0.0);
  CHECK_THAT(zeta(cl, 1.0, 1e-7), WithinAbs(0.0, 1e-5));
}

TEST_CASE("zeta is unimodal with its maximum at the optimal barrier", "[dividend_solver]") {
  const auto& e = jump_diffusion_engine();
  for (double lambda : {1.5, 2.0, 5.0, 9.0}) {
    const double a = optimal_barrier(e, lambda);
    REQUIRE(a > 0);
    double prev = zeta(e, lambda, 1e-3);
    for (double x = 2e-3; x < 25; x += 1e-3) {
      const double v = zeta(e, lambda, x);
      if (x < a - 1e-3) REQUIRE(v > prev);
      if (x > a + 2e-3) REQUIRE(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("optimal barrier", "[dividend_solver]") {
  const auto& e = jump_diffusion_engine();
  CHECK(optimal_barrier(e, 1.0) == 0.0);
  const double a5 = optimal_barrier(e, 5.0);
  CHECK_THAT(e.h(a5), WithinAbs(0.2, 1e-10));

  // Pure jump model: a = 0 while lambda < 1 + q / Pi(0, inf) = 1.25.
  const ScaleEngine cl(kCramerLundberg, kQ);
  CHECK(optimal_barrier(cl, 1.2) == 0.0);
  CHECK(optimal_barrier(cl, 1.3) > 0.0);

  const BrownianReference ref;
  const ScaleEngine bm(kBrownian, kQ);
  for (double lambda : {1.0, 1.5, 3.0, 9.0}) {
    CHECK_THAT(optimal_barrier(bm, lambda), WithinAbs(ref.barrier(lambda), 1e-5));
  }
  CHECK_THROWS_AS(optimal_barrier(e, 0.99), DomainError);
}

TEST_CASE("barrier value decomposition", "[dividend_solver]") {
  const auto& e = jump_diffusion_engine();
  const double a = optimal_barrier(e, 2.0);
  for (double x : {0.0, 0.5, 1.0, a, a + 1.5}) {
    const auto r = barrier_value(e, 2.0, a, x);
    CHECK(r.combined == r.dividends_npv - 2.0 * r.injections_npv);
    CHECK(r.injections_npv >= 0);
    CHECK(r.dividends_npv >= 0);
  }
  // x = 0, lambda = 1: Z(0) = 1.
  const auto r0 = barrier_value(e, 1.0, 3.0, 0.0);
  CHECK_THAT(r0.combined, WithinAbs(zeta(e, 1.0, 3.0) + e.k(0.0), 1e-10));
  // Above the barrier the excess is paid at once.
  const auto low = barrier_value(e, 2.0, a, a);
  const auto high = barrier_value(e, 2.0, a, a + 1.5);
  CHECK_THAT(high.dividends_npv, WithinAbs(low.dividends_npv + 1.5, 1e-12));
  CHECK_THAT(high.injections_npv, WithinAbs(low.injections_npv, 1e-12));
  CHECK_THROWS_AS(barrier_value(e, 2.0, -1.0, 1.0), DomainError);
}

TEST_CASE("barrier at zero", "[dividend_solver]") {
  const ScaleEngine cl(kCramerLundberg, kQ);
  const auto r = barrier_value(cl, 1.0, 0.0, 1.0);
  CHECK(std::isfinite(r.combined));
  // Lambda = 1 with every dollar paid out: x + psi'(0+)/q.
  CHECK_THAT(r.combined, WithinAbs(1.0 + kCramerLundberg.mean() / kQ, 1e-9));

  const auto& e = jump_diffusion_engine();
  const auto u = barrier_value(e, 1.0, 0.0, 1.0);
  CHECK(std::isinf(u.dividends_npv));
  CHECK(std::isinf(u.injections_npv));
  CHECK_THAT(u.combined, WithinAbs(1.0 + kJumpDiffusion.mean() / kQ, 1e-9));
  CHECK(barrier_value(e, 2.0, 0.0, 1.0).combined == -std::numeric_limits<double>::infinity());
}

TEST_CASE("Brownian barrier value solves the generator equation", "[dividend_solver]") {
  // sigma^2/2 v'' + mu v' - q v = 0 on (0, a), v'(0) = lambda, v'(a) = 1.
  const ScaleEngine bm(kBrownian, kQ, ClosedFormBrownian{});
  const double lambda = 3.0;
  const double a = optimal_barrier(bm, lambda);
  auto v = [&](double x) { return barrier_value(bm, lambda, a, x).combined; };
  const double h = 1e-4;
  for (double x = 0.05; x < a - 0.05; x += 0.05) {
    const double d1 = (v(x + h) - v(x - h)) / (2 * h);
    const double d2 = (v(x + h) - 2 * v(x) + v(x - h)) / (h * h);
    REQUIRE_THAT(0.125 * d2 + d1 - kQ * v(x), WithinAbs(0.0, 1e-5));
  }
  CHECK_THAT((-3 * v(0) + 4 * v(h) - v(2 * h)) / (2 * h), WithinAbs(lambda, 1e-6));
  CHECK_THAT((3 * v(a) - 4 * v(a - h) + v(a - 2 * h)) / (2 * h), WithinAbs(1.0, 1e-6));
}

TEST_CASE("pay-nothing injections are the infinite-barrier limit", "[dividend_solver]") {
  const auto& e = jump_diffusion_engine();
  for (double x : {0.0, 1.0, 3.0}) {
    const auto r = policy_value(e, 2.0, PayNothing{}, x);
    CHECK(r.dividends_npv == 0.0);
    CHECK_THAT(r.injections_npv, WithinRel(barrier_value(e, 2.0, 40.0, x).injections_npv, 1e-4));
  }
}

TEST_CASE("pair objective", "[dividend_solver]") {
  const auto& e = jump_diffusion_engine();
  CHECK_THROWS_AS(pair_objective(e, 2.0, 2.0, 2.0, kDelta), DomainError);
  CHECK_THROWS_AS(pair_objective(e, 2.0, 3.0, 2.0, kDelta), DomainError);
  CHECK(pair_objective(e, 2.0, 2.0, 2.0 + 1e-6, kDelta) < -1e3);
  CHECK_THAT(pair_objective(e, 2.0, 0.0, 40.0, kDelta), WithinRel(-2.0 / e.phi(), 1e-3));

  const auto t = optimal_thresholds(e, 2.0, kDelta);
  CHECK_THAT(pair_objective(e, 2.0, t.c1, t.c2, kDelta), WithinAbs(zeta(e, 2.0, t.c2), 1e-8));
  CHECK(pair_objective(e, 2.0, t.c1, t.c1 + 0.1, kDelta) < t.g_max);
  // No perturbation improves on the optimum.
  for (double d1 : {-1e-3, 0.0, 1e-3})
    for (double d2 : {-1e-3, 0.0, 1e-3})
      CHECK(pair_objective(e, 2.0, t.c1 + d1, t.c2 + d2, kDelta) <= t.g_max + 1e-12);
}

TEST_CASE("thresholds match the brute-force Brownian maximization", "[dividend_solver]") {
  const BrownianReference ref;
  const ScaleEngine bm(kBrownian, kQ);
  for (double lambda : {1.0, 2.0, 5.0}) {
    for (double delta : {0.05, 0.5}) {
      const auto t = optimal_thresholds(bm, lambda, delta);
      const auto [c1, c2] = ref.pair(lambda, delta);
      CHECK_THAT(t.c1, WithinAbs(c1, 1e-5));
      CHECK_THAT(t.c2, WithinAbs(c2, 1e-5));
      CHECK_THAT(t.g_max, WithinRel(ref.g(lambda, c1, c2, delta), 1e-9));
    }
  }
}

TEST_CASE("thresholds on the jump-diffusion model", "[dividend_solver]") {
  const auto& e = jump_diffusion_engine();
  const auto t1 = optimal_thresholds(e, 1.0, kDelta);
  CHECK(t1.c1 == 0.0);
  CHECK(t1.a_lambda == 0.0);
  CHECK(t1.c2 > 0.0);
  // c1 = 0 is a corner: zeta(0+) >= G at the optimum.
  CHECK(zeta_at_zero(e, 1.0) >= t1.g_max);

  for (double lambda = 2; lambda <= 9; lambda += 1) {
    const auto t = optimal_thresholds(e, lambda, kDelta);
    const double a = optimal_barrier(e, lambda);
    CHECK(t.a_lambda == a);
    CHECK(t.c1 > 0);
    CHECK(t.c1 < a);
    CHECK(a < t.c2);
    CHECK_THAT(zeta(e, lambda, t.c1), WithinAbs(zeta(e, lambda, t.c2), 1e-8));
    CHECK(zeta(e, lambda, t.c2) < zeta(e, lambda, a));
    CHECK(std::abs(t.zeta_gap) < 1e-8);
    CHECK(std::abs(t.foc_residual) < 1e-8);
  }
  CHECK_THROWS_AS(optimal_thresholds(e, 2.0, 0.0), DomainError);
  CHECK_THROWS_AS(optimal_thresholds(e, 0.9, kDelta), DomainError);
}

TEST_CASE("threshold ordering over a lambda grid", "[dividend_solver]") {
  const auto& e = jump_diffusion_engine();
  for (double lambda = 1.0; lambda <= 10.0; lambda += 0.5) {
    const auto t = optimal_thresholds(e, lambda, kDelta);
    CHECK(0 <= t.c1);
    CHECK(t.c1 <= t.a_lambda);
    CHECK(t.a_lambda < t.c2);
  }
}

TEST_CASE("thresholds collapse onto the barrier as delta vanishes", "[dividend_solver]") {
  const auto& e = jump_diffusion_engine();
  const double a = optimal_barrier(e, 3.0);
  double prev_width = std::numeric_limits<double>::infinity();
  for (double delta : {0.05, 0.01, 0.001, 1e-5}) {
    const auto t = optimal_thresholds(e, 3.0, delta);
    const double width = t.c2 - t.c1;
    CHECK(width < prev_width);
    CHECK(std::abs(t.c1 - a) < width);
    CHECK(std::abs(t.c2 - a) < width);
    prev_width = width;
  }
  // The width shrinks like delta^(1/3).
  CHECK(prev_width < 0.2);
}

TEST_CASE("thresholds depend continuously on lambda", "[dividend_solver]") {
  const auto& e = jump_diffusion_engine();
  for (double lambda : {1.5, 3.0, 7.0}) {
    const auto base = optimal_thresholds(e, lambda, kDelta);
    double prev = std::numeric_limits<double>::infinity();
    for (double step : {0.1, 0.05, 0.025, 0.0125}) {
      const auto t = optimal_thresholds(e, lambda + step, kDelta);
      const double d = std::max(std::abs(t.c1 - base.c1), std::abs(t.c2 - base.c2));
      CHECK(d < 0.75 * prev);
      prev = d;
    }
  }
  // Near lambda = 1 the corner c1 = 0 leaves continuously too.
  const auto t1 = optimal_thresholds(e, 1.0, kDelta);
  const auto t1b = optimal_thresholds(e, 1.0 + 1e-4, kDelta);
  CHECK(std::abs(t1b.c2 - t1.c2) < 1e-2);
  CHECK(t1b.c1 < 1e-2);
}

TEST_CASE("pair value agrees with the renewal argument", "[dividend_solver]") {
  // Start at x <= c2: wait for the first passage of c2, pay c2 - c1 - delta,
  // restart from c1. Each cycle is discounted by E_{c1}[exp(-q kappa_c2)].
  const auto& e = jump_diffusion_engine();
  const auto t = optimal_thresholds(e, 2.0, kDelta);
  const double cycle = e.reflected_upcross(t.c1, t.c2);
  const double cycle_inj = e.injection_until_upcross(t.c1, t.c2);
  for (double x : {0.0, 0.7, t.c1, 0.5 * (t.c1 + t.c2), t.c2}) {
    const double first = e.reflected_upcross(x, t.c2);
    const double div = first * (t.c2 - t.c1 - kDelta) / (1 - cycle);
    const double inj = e.injection_until_upcross(x, t.c2) + first * cycle_inj / (1 - cycle);
    const auto r = pair_value(e, 2.0, t.c1, t.c2, kDelta, x);
    CHECK_THAT(r.dividends_npv, WithinRel(div, 1e-9));
    CHECK_THAT(r.injections_npv, WithinRel(inj, 1e-9));
    CHECK(r.combined == r.dividends_npv - 2.0 * r.injections_npv);
  }
  // Above c2 a lump brings the surplus to c1.
  const auto above = pair_value(e, 2.0, t.c1, t.c2, kDelta, t.c2 + 2);
  const auto at_c1 = pair_value(e, 2.0, t.c1, t.c2, kDelta, t.c1);
  CHECK_THAT(above.combined, WithinAbs(at_c1.combined + t.c2 + 2 - t.c1 - kDelta, 1e-10));
  CHECK_THAT(pair_value(e, 2.0, t.c1, t.c2, kDelta, t.c2).combined,
             WithinAbs(at_c1.combined + t.c2 - t.c1 - kDelta, 1e-10));
}

TEST_CASE("Brownian pair value solves the generator equation", "[dividend_solver]") {
  const ScaleEngine bm(kBrownian, kQ, ClosedFormBrownian{});
  const double lambda = 2.0;
  const auto t = optimal_thresholds(bm, lambda, kDelta);
  auto v = [&](double x) { return pair_value(bm, lambda, t.c1, t.c2, kDelta, x).combined; };
  const double h = 1e-4;
  for (double x = 0.05; x < t.c2 - 0.05; x += 0.05) {
    const double d1 = (v(x + h) - v(x - h)) / (2 * h);
    const double d2 = (v(x + h) - 2 * v(x) + v(x - h)) / (h * h);
    REQUIRE_THAT(0.125 * d2 + d1 - kQ * v(x), WithinAbs(0.0, 1e-5));
  }
  CHECK_THAT((-3 * v(0) + 4 * v(h) - v(2 * h)) / (2 * h), WithinAbs(lambda, 1e-6));
}

TEST_CASE("value function structure on the jump-diffusion model", "[dividend_solver]") {
  const auto& e = jump_diffusion_engine();
  for (double lambda : {1.0, 1.5, 2.0, 3.0, 5.0, 9.0}) {
    const auto t = optimal_thresholds(e, lambda, kDelta);
    const Policy p = optimal_policy(e, lambda, kDelta);
    auto v = [&](double x) { return combined(e, lambda, p, x); };

    const double h = 1e-4;
    const double left = (3 * v(t.c2) - 4 * v(t.c2 - h) + v(t.c2 - 2 * h)) / (2 * h);
    CHECK_THAT(left, WithinAbs(1.0, 1e-4));

    const double floor = lambda * kJumpDiffusion.mean() / kQ + e.z(t.c2) * zeta(e, lambda, t.c2);
    std::vector<double> xs;
    for (double x = 1e-3; x <= t.c2 + 5; x += 1e-3) xs.push_back(x);
    std::vector<double> vs;
    for (double x : xs) vs.push_back(v(x));
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      REQUIRE((vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i]) <= lambda + 1e-6);
      REQUIRE(vs[i] >= floor - 1e-9);
    }
    for (std::size_t i = 0; i < xs.size(); i += 97)
      for (std::size_t j = 0; j <= i; j += 89)
        REQUIRE(vs[i] - vs[j] >= xs[i] - xs[j] - kDelta - 1e-9);
  }
}

TEST_CASE("optimal policy dispatch", "[dividend_solver]") {
  const auto& e = jump_diffusion_engine();
  const auto p0 = optimal_policy(e, 2.0, 0.0);
  REQUIRE(std::holds_alternative<Barrier>(p0));
  CHECK(std::get<Barrier>(p0).a == optimal_barrier(e, 2.0));
  const auto p1 = optimal_policy(e, 2.0, kDelta);
  REQUIRE(std::holds_alternative<ReflectedPair>(p1));
  CHECK(std::get<ReflectedPair>(p1).delta == kDelta);

  // The barrier beats every pair and the optimal pair beats its neighbours.
  const double v0 = value_function(e, 2.0, 0.0, 1.0).combined;
  CHECK(value_function(e, 2.0, kDelta, 1.0).combined < v0);
  CHECK_THAT(value_function(e, 2.0, 1e-6, 1.0).combined, WithinAbs(v0, 1e-3));
  const auto t = optimal_thresholds(e, 2.0, kDelta);
  const double best = pair_value(e, 2.0, t.c1, t.c2, kDelta, 1.0).combined;
  CHECK(pair_value(e, 2.0, t.c1 + 0.2, t.c2, kDelta, 1.0).combined < best);
  CHECK(pair_value(e, 2.0, t.c1, t.c2 + 0.2, kDelta, 1.0).combined < best);
  CHECK(describe(p0).find("barrier") != std::string::npos);
}
