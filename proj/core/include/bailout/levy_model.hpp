#pragma once

#include <complex>
#include <optional>
#include <string>
#include <variant>

namespace bailout {

/// Exponentially distributed jump sizes with the given mean.
struct ExponentialJumps {
  double mean;
};

/// Gamma distributed jump sizes, shape/scale parameterization
/// (mean = shape * scale).
struct GammaJumps {
  double shape;
  double scale;
};

using JumpDist = std::variant<ExponentialJumps, GammaJumps>;

/// Downward compound Poisson component: jumps arrive at `rate` and have
/// sizes drawn from `dist` (positive numbers, subtracted from the surplus).
struct CompoundPoisson {
  double rate;
  JumpDist dist;
};

/// Spectrally negative Levy risk process
///
///   X_t = x + drift * t + sigma * B_t - sum_{n <= N_t} J_n
///
/// with Laplace exponent
///
///   psi(theta) = drift*theta + sigma^2 theta^2 / 2 - rate * (1 - E[exp(-theta J)]).
///
/// For the finite-activity models supported here `drift` is the observed
/// linear drift c, so no compensator term appears. The object is immutable
/// after construction.
class LevyModel {
 public:
  LevyModel(double drift, double sigma,
            std::optional<CompoundPoisson> jumps = std::nullopt);

  double drift() const { return drift_; }
  double sigma() const { return sigma_; }
  const std::optional<CompoundPoisson>& jumps() const { return jumps_; }

  /// Total jump intensity Pi(0, inf); zero without jumps.
  double jump_rate() const;
  double mean_jump() const;

  double psi(double theta) const;
  std::complex<double> psi(std::complex<double> theta) const;
  double psi_prime(double theta) const;

  /// psi'(0+) = E[X_1].
  double mean() const;

  /// Largest root of psi(lambda) = q.
  double phi(double q) const;

  bool is_bounded_variation() const;

  std::string describe() const;

 private:
  double drift_;
  double sigma_;
  std::optional<CompoundPoisson> jumps_;
};

/// E[exp(-theta J)] for the jump law.
double jump_transform(const JumpDist& dist, double theta);
std::complex<double> jump_transform(const JumpDist& dist,
                                    std::complex<double> theta);
double jump_mean(const JumpDist& dist);

}  // namespace bailout
