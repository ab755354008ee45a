#include "bailout/levy_model.hpp"

#include <cmath>
#include <sstream>

#include "bailout/errors.hpp"
#include "bailout/root_finding.hpp"

namespace bailout {

namespace {

void validate_dist(const JumpDist& dist) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ExponentialJumps>) {
          if (!(d.mean > 0) || !std::isfinite(d.mean))
            throw DomainError("exponential jump mean must be positive");
        } else {
          if (!(d.shape > 0) || !(d.scale > 0) || !std::isfinite(d.shape) ||
              !std::isfinite(d.scale))
            throw DomainError("gamma jump shape and scale must be positive");
        }
      },
      dist);
}

// E[J exp(-theta J)]
double jump_tilted_mean(const JumpDist& dist, double theta) {
  return std::visit(
      [theta](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ExponentialJumps>) {
          const double u = 1.0 + d.mean * theta;
          return d.mean / (u * u);
        } else {
          return d.shape * d.scale *
                 std::pow(1.0 + d.scale * theta, -d.shape - 1.0);
        }
      },
      dist);
}

}  // namespace

double jump_transform(const JumpDist& dist, double theta) {
  return std::visit(
      [theta](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ExponentialJumps>) {
          return 1.0 / (1.0 + d.mean * theta);
        } else {
          return std::pow(1.0 + d.scale * theta, -d.shape);
        }
      },
      dist);
}

std::complex<double> jump_transform(const JumpDist& dist,
                                    std::complex<double> theta) {
  return std::visit(
      [theta](const auto& d) -> std::complex<double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ExponentialJumps>) {
          return 1.0 / (1.0 + d.mean * theta);
        } else {
          return std::pow(1.0 + d.scale * theta, -d.shape);
        }
      },
      dist);
}

double jump_mean(const JumpDist& dist) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ExponentialJumps>) {
          return d.mean;
        } else {
          return d.shape * d.scale;
        }
      },
      dist);
}

LevyModel::LevyModel(double drift, double sigma,
                     std::optional<CompoundPoisson> jumps)
    : drift_(drift), sigma_(sigma), jumps_(std::move(jumps)) {
  if (!std::isfinite(drift_) || !std::isfinite(sigma_))
    throw DomainError("drift and sigma must be finite");
  if (sigma_ < 0) throw DomainError("sigma must be nonnegative");
  if (jumps_) {
    if (!(jumps_->rate > 0) || !std::isfinite(jumps_->rate))
      throw DomainError("jump rate must be positive");
    validate_dist(jumps_->dist);
  }
  // A process with sigma = 0 and drift <= 0 has monotone decreasing paths.
  if (sigma_ == 0 && !(drift_ > 0))
    throw DomainError(
        "model is the negative of a subordinator: need drift > 0 or sigma > 0");
}

double LevyModel::jump_rate() const { return jumps_ ? jumps_->rate : 0.0; }

double LevyModel::mean_jump() const {
  return jumps_ ? jump_mean(jumps_->dist) : 0.0;
}

double LevyModel::psi(double theta) const {
  if (!(theta >= 0)) throw DomainError("psi: theta must be >= 0");
  double value = drift_ * theta + 0.5 * sigma_ * sigma_ * theta * theta;
  if (jumps_) value -= jumps_->rate * (1.0 - jump_transform(jumps_->dist, theta));
  return value;
}

std::complex<double> LevyModel::psi(std::complex<double> theta) const {
  std::complex<double> value =
      drift_ * theta + 0.5 * sigma_ * sigma_ * theta * theta;
  if (jumps_) value -= jumps_->rate * (1.0 - jump_transform(jumps_->dist, theta));
  return value;
}

double LevyModel::psi_prime(double theta) const {
  if (!(theta >= 0)) throw DomainError("psi_prime: theta must be >= 0");
  double value = drift_ + sigma_ * sigma_ * theta;
  if (jumps_) value -= jumps_->rate * jump_tilted_mean(jumps_->dist, theta);
  return value;
}

double LevyModel::mean() const { return drift_ - jump_rate() * mean_jump(); }

double LevyModel::phi(double q) const {
  if (!(q > 0) || !std::isfinite(q)) throw DomainError("phi: q must be > 0");
  // psi(0) = 0 < q and psi is convex, so [0, hi] brackets the largest root
  // once psi(hi) > q.
  auto excess = [&](double theta) { return psi(theta) - q; };
  const double hi = roots::expand_until(
      [&](double theta) { return excess(theta) > 0; }, 0.0, 1.0, 1e12,
      "phi(q) bracketing");
  return roots::bisect(excess, 0.0, hi, -q, excess(hi), "phi(q)",
                       {.abs_tol = 1e-12 * std::max(1.0, hi)});
}

bool LevyModel::is_bounded_variation() const { return sigma_ == 0.0; }

std::string LevyModel::describe() const {
  std::ostringstream out;
  out << "drift=" << drift_ << " sigma=" << sigma_;
  if (jumps_) {
    out << " jumps=compound_poisson(rate=" << jumps_->rate << ", ";
    std::visit(
        [&out](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, ExponentialJumps>)
            out << "exponential(mean=" << d.mean << ")";
          else
            out << "gamma(shape=" << d.shape << ", scale=" << d.scale << ")";
        },
        jumps_->dist);
    out << ")";
  }
  return out.str();
}

}  // namespace bailout
