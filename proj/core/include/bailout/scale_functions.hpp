#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "bailout/laplace_inversion.hpp"
#include "bailout/levy_model.hpp"

namespace bailout {

/// Numerical Laplace inversion of 1/(psi(theta) - q) backed by a uniform
/// sample grid.
///
/// The inversion targets exp(-Phi(q) x) W(x), whose transform
/// 1/(psi(s + Phi(q)) - q) has only a simple pole at 0 and singularities on
/// the negative real axis. W, W' and W'' are inverted at every grid node from
/// one set of transform evaluations. Between nodes W is the quintic Hermite
/// interpolant of (W, W', W''); Wbar and its antiderivative are the exact
/// integrals of that interpolant, i.e. the trapezoidal rule with its
/// endpoint-derivative corrections.
struct NumericInversion {
  int talbot_terms = 20;
  double grid_step = 1e-3;
  double initial_range = 16.0;
  /// Hard upper limit of the grid; evaluation beyond it is a NumericalError.
  double max_range = 1000.0;
};

/// Closed form for drift + Brownian motion without jumps.
struct ClosedFormBrownian {};

/// Closed form for drift minus compound Poisson with exponential jumps
/// (sigma = 0).
struct ClosedFormCramerLundbergExp {};

using ScaleMethod =
    std::variant<NumericInversion, ClosedFormBrownian, ClosedFormCramerLundbergExp>;

/// W, W', Wbar and the second antiderivative int_0^x Wbar at one point.
struct ScaleValues {
  double w = 0;
  double w_prime = 0;
  double w_bar = 0;
  double w_bar_bar = 0;
};

/// One row of a grid dump: x, W, W', Z, Wbar, Zbar.
struct ScaleSample {
  double x, w, w_prime, z, w_bar, z_bar;
};

/// W(x), W'(x), W''(x) at a single x > 0 obtained by direct inversion
/// (no grid).
struct ScaleDerivatives {
  double w, w_prime, w_second;
};
ScaleDerivatives invert_scale_function(const LevyModel& model, double q,
                                       double x, const FixedTalbot& talbot);

namespace detail {
class ScaleBackend;
}

/// Evaluator for the q-scale function W = W^{(q)} and its companions
///
///   Wbar(x) = int_0^x W,   Z(x) = 1 + q Wbar(x),   Zbar(x) = int_0^x Z,
///
/// together with the fluctuation identities built on them. All functions
/// accept any real x; W = Wbar = 0, Z = 1 and Zbar = x on x <= 0.
///
/// Copies share the underlying sample grid. Grid extension is internally
/// synchronized, so an engine may be used from several threads at once.
class ScaleEngine {
 public:
  ScaleEngine(LevyModel model, double q, ScaleMethod method = NumericInversion{});

  const LevyModel& model() const { return model_; }
  double q() const { return q_; }
  double phi() const { return phi_; }
  const ScaleMethod& method() const { return method_; }

  ScaleValues values(double x) const;
  double w(double x) const;
  double w_prime(double x) const;
  double w_bar(double x) const;
  double z(double x) const;
  double z_bar(double x) const;
  /// k(x) = Zbar(x) + psi'(0+)/q.
  double k(double x) const;

  /// W(0): 1/c for bounded variation, 0 otherwise.
  double w_at_zero() const;
  /// W'(0+): 2/sigma^2 if sigma > 0, (q + Pi(0,inf))/c^2 otherwise.
  double w_prime_at_zero() const;

  /// H(a) = Z(a) - q W(a)^2 / W'(a), a > 0.
  double h(double a) const;
  /// lim_{a -> 0+} H(a) = 1 - q W(0)^2 / W'(0+).
  double h_at_zero() const;
  /// Inverse of the strictly decreasing H on (0, h_at_zero()].
  double h_inverse(double y) const;

  /// Two-sided exit from [b, a] started at x: discounted up- and
  /// down-crossing transforms.
  double exit_up(double x, double b, double a) const;
  double exit_down(double x, double b, double a) const;
  /// E_x[exp(-q kappa_b)] for the process reflected at 0, 0 <= x <= b.
  double reflected_upcross(double x, double b) const;
  /// Discounted capital injected at 0 before kappa_b, 0 <= x <= b.
  double injection_until_upcross(double x, double b) const;

  /// Precomputes the grid up to x_max (no-op for closed forms).
  void reserve(double x_max) const;
  /// Largest x that can be evaluated (infinite for closed forms).
  double max_range() const;
  /// Current extent of the precomputed grid (infinite for closed forms).
  double cached_range() const;

  std::vector<ScaleSample> sample_grid(double x_max, double step) const;

 private:
  LevyModel model_;
  double q_;
  double phi_;
  ScaleMethod method_;
  std::shared_ptr<const detail::ScaleBackend> backend_;
};

}  // namespace bailout
