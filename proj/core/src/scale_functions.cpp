#include "bailout/scale_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "bailout/errors.hpp"
#include "bailout/root_finding.hpp"

namespace bailout {

namespace detail {

class ScaleBackend {
 public:
  virtual ~ScaleBackend() = default;
  // x >= 0.
  virtual ScaleValues eval(double x) const = 0;
  virtual void reserve(double /*x_max*/) const {}
  virtual double max_range() const = 0;
  virtual double cached_range() const = 0;
};

}  // namespace detail

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double w_zero(const LevyModel& m) {
  return m.is_bounded_variation() ? 1.0 / m.drift() : 0.0;
}

double w_prime_zero(const LevyModel& m, double q) {
  if (m.sigma() > 0) return 2.0 / (m.sigma() * m.sigma());
  return (q + m.jump_rate()) / (m.drift() * m.drift());
}

// (e^u - 1) / u
double expm1_ratio(double u) { return u == 0.0 ? 1.0 : std::expm1(u) / u; }

// (e^u - 1 - u) / u^2
double expm1_ratio2(double u) {
  if (std::abs(u) < 0.5) {
    double term = 0.5, sum = 0.0;
    for (int n = 2; n < 40 && std::abs(term) > 1e-18 * std::abs(sum); ++n) {
      sum += term;
      term *= u / (n + 1);
    }
    return sum;
  }
  return (std::expm1(u) - u) / (u * u);
}

// W(x) = sum_i amp_i exp(rate_i x): partial-fraction form of 1/(psi - q)
// whenever psi - q is rational with simple roots.
class ExponentialSumBackend final : public detail::ScaleBackend {
 public:
  struct Term {
    double amp;
    double rate;
  };
  explicit ExponentialSumBackend(std::vector<Term> terms) : terms_(std::move(terms)) {}

  ScaleValues eval(double x) const override {
    ScaleValues v;
    for (const auto& [amp, rate] : terms_) {
      const double e = std::exp(rate * x);
      v.w += amp * e;
      v.w_prime += amp * rate * e;
      v.w_bar += amp * x * expm1_ratio(rate * x);
      v.w_bar_bar += amp * x * x * expm1_ratio2(rate * x);
    }
    return v;
  }
  double max_range() const override { return kInf; }
  double cached_range() const override { return kInf; }

 private:
  std::vector<Term> terms_;
};

std::vector<ExponentialSumBackend::Term> brownian_terms(const LevyModel& m,
                                                        double q) {
  if (m.jumps() || !(m.sigma() > 0))
    throw DomainError("ClosedFormBrownian needs sigma > 0 and no jumps");
  const double s2 = m.sigma() * m.sigma();
  const double root = std::sqrt(m.drift() * m.drift() + 2.0 * q * s2);
  const double up = (-m.drift() + root) / s2;
  const double down = (-m.drift() - root) / s2;
  // residue of 1/(psi - q) at a root rho is 1/psi'(rho) = 1/(mu + s2 rho)
  return {{1.0 / root, up}, {-1.0 / root, down}};
}

std::vector<ExponentialSumBackend::Term> cramer_lundberg_terms(const LevyModel& m,
                                                               double q) {
  const auto& j = m.jumps();
  double mean = 0;
  if (m.sigma() != 0 || !j)
    throw DomainError("ClosedFormCramerLundbergExp needs sigma = 0 and jumps");
  if (auto e = std::get_if<ExponentialJumps>(&j->dist)) {
    mean = e->mean;
  } else if (auto g = std::get_if<GammaJumps>(&j->dist); g && g->shape == 1.0) {
    mean = g->scale;
  } else {
    throw DomainError("ClosedFormCramerLundbergExp needs exponential jumps");
  }
  // psi(t) - q = N(t) / (beta + t), N(t) = c t^2 + (c beta - lambda - q) t - q beta
  const double c = m.drift(), lambda = j->rate, beta = 1.0 / mean;
  const double b1 = c * beta - lambda - q;
  const double disc = std::sqrt(b1 * b1 + 4.0 * c * q * beta);
  const double r1 = (-b1 + disc) / (2.0 * c);
  // second root via the product r1 r2 = -q beta / c avoids cancellation
  const double r2 = -q * beta / (c * r1);
  return {{(beta + r1) / (c * (r1 - r2)), r1}, {(beta + r2) / (c * (r2 - r1)), r2}};
}

// Quintic Hermite interpolation on [0, h] in the unit variable t.
struct Quintic {
  double f0, d0, s0, a3, a4, a5;  // p(t) = f0 + d0 t + s0/2 t^2 + a3 t^3 + ...

  static Quintic fit(double h, double f0, double f0p, double f0pp, double f1,
                     double f1p, double f1pp) {
    const double d0 = h * f0p, d1 = h * f1p;
    const double s0 = h * h * f0pp, s1 = h * h * f1pp;
    const double df = f1 - f0;
    return {f0,
            d0,
            s0,
            10.0 * df - 6.0 * d0 - 4.0 * d1 - 0.5 * (3.0 * s0 - s1),
            -15.0 * df + 8.0 * d0 + 7.0 * d1 + 0.5 * (3.0 * s0 - 2.0 * s1),
            6.0 * df - 3.0 * d0 - 3.0 * d1 - 0.5 * (s0 - s1)};
  }
  double value(double t) const {
    return f0 + t * (d0 + t * (0.5 * s0 + t * (a3 + t * (a4 + t * a5))));
  }
  // dp/dt
  double slope(double t) const {
    return d0 + t * (s0 + t * (3.0 * a3 + t * (4.0 * a4 + t * 5.0 * a5)));
  }
  // int_0^t p
  double integral(double t) const {
    return t * (f0 + t * (d0 / 2 + t * (s0 / 6 + t * (a3 / 4 + t * (a4 / 5 + t * a5 / 6)))));
  }
  // int_0^t int_0^u p
  double double_integral(double t) const {
    return t * t *
           (f0 / 2 + t * (d0 / 6 + t * (s0 / 24 + t * (a3 / 20 + t * (a4 / 30 + t * a5 / 42)))));
  }
};

class InversionCacheBackend final : public detail::ScaleBackend {
 public:
  InversionCacheBackend(LevyModel model, double q, NumericInversion params)
      : model_(std::move(model)),
        q_(q),
        phi_(model_.phi(q)),
        params_(params),
        talbot_(params.talbot_terms) {
    if (!(params_.grid_step > 0) || !(params_.initial_range > 0))
      throw DomainError("NumericInversion: grid step and range must be positive");
    // exp(phi x) must stay representable
    cap_ = std::min(params_.max_range, 600.0 / std::max(phi_, 1e-300));
    std::unique_lock lock(mutex_);
    extend_locked(std::min(params_.initial_range, cap_));
  }

  ScaleValues eval(double x) const override {
    const double h = params_.grid_step;
    std::size_t i = static_cast<std::size_t>(x / h);
    {
      std::shared_lock lock(mutex_);
      if (i + 1 < nodes_.size()) return interpolate(i, x);
    }
    if (x > cap_) {
      std::ostringstream msg;
      msg << "scale function requested at x = " << x
          << " beyond the grid cap " << cap_;
      throw NumericalError(msg.str());
    }
    {
      std::unique_lock lock(mutex_);
      if (i + 1 >= nodes_.size())
        extend_locked(std::min(cap_, std::max(2.0 * range_locked(), 1.25 * x + h)));
    }
    std::shared_lock lock(mutex_);
    i = std::min(i, nodes_.size() - 2);
    return interpolate(i, x);
  }

  void reserve(double x_max) const override {
    if (x_max > cap_) {
      std::ostringstream msg;
      msg << "scale grid reservation " << x_max << " exceeds cap " << cap_;
      throw NumericalError(msg.str());
    }
    std::unique_lock lock(mutex_);
    if (range_locked() < x_max) extend_locked(x_max);
  }

  double max_range() const override { return cap_; }
  double cached_range() const override {
    std::shared_lock lock(mutex_);
    return range_locked();
  }

 private:
  struct Node {
    double w, w1, w2, w_bar, w_bar_bar;
  };

  double range_locked() const {
    return nodes_.empty() ? 0.0 : (nodes_.size() - 1) * params_.grid_step;
  }

  Quintic segment(std::size_t i) const {
    const Node& a = nodes_[i];
    const Node& b = nodes_[i + 1];
    return Quintic::fit(params_.grid_step, a.w, a.w1, a.w2, b.w, b.w1, b.w2);
  }

  ScaleValues interpolate(std::size_t i, double x) const {
    const double h = params_.grid_step;
    const double s = x - i * h;
    const double t = s / h;
    const Quintic p = segment(i);
    const Node& n = nodes_[i];
    return {p.value(t), p.slope(t) / h, n.w_bar + h * p.integral(t),
            n.w_bar_bar + n.w_bar * s + h * h * p.double_integral(t)};
  }

  void extend_locked(double x_max) const {
    const double h = params_.grid_step;
    const std::size_t target = static_cast<std::size_t>(std::ceil(x_max / h)) + 1;
    if (target <= nodes_.size()) return;
    nodes_.reserve(target);
    if (nodes_.empty()) {
      // W(0) and W'(0+) are known exactly. Inverting W'' very close to 0
      // loses accuracy (the contour radius grows like 1/x), so W''(0+) is
      // extrapolated linearly from h/2 and h.
      const double half = invert_scale_function(model_, q_, 0.5 * h, talbot_).w_second;
      const double one = invert_scale_function(model_, q_, h, talbot_).w_second;
      nodes_.push_back({w_zero(model_), w_prime_zero(model_, q_), 2.0 * half - one, 0.0, 0.0});
    }
    for (std::size_t i = nodes_.size(); i < target; ++i) {
      const auto d = invert_scale_function(model_, q_, i * h, talbot_);
      nodes_.push_back({d.w, d.w_prime, d.w_second, 0.0, 0.0});
      const Quintic p = segment(i - 1);
      const Node& prev = nodes_[i - 1];
      nodes_[i].w_bar = prev.w_bar + h * p.integral(1.0);
      nodes_[i].w_bar_bar = prev.w_bar_bar + prev.w_bar * h + h * h * p.double_integral(1.0);
    }
  }

  LevyModel model_;
  double q_;
  double phi_;
  NumericInversion params_;
  FixedTalbot talbot_;
  double cap_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<Node> nodes_;
};

void require(bool ok, const char* msg) {
  if (!ok) throw DomainError(msg);
}

}  // namespace

ScaleDerivatives invert_scale_function(const LevyModel& model, double q, double x,
                                       const FixedTalbot& talbot) {
  require(x > 0, "invert_scale_function: x must be > 0");
  const double phi = model.phi(q);
  const double g0 = w_zero(model);
  const double g1 = w_prime_zero(model, q) - phi * g0;
  std::vector<InversionNode> nodes;
  talbot.nodes(x, nodes);
  double g = 0, gp = 0, gpp = 0;
  for (const auto& n : nodes) {
    const std::complex<double> G = 1.0 / (model.psi(n.s + phi) - q);
    g += (n.weight * G).real();
    gp += (n.weight * (n.s * G - g0)).real();
    gpp += (n.weight * (n.s * (n.s * G - g0) - g1)).real();
  }
  const double e = std::exp(phi * x);
  return {e * g, e * (gp + phi * g), e * (gpp + 2.0 * phi * gp + phi * phi * g)};
}

ScaleEngine::ScaleEngine(LevyModel model, double q, ScaleMethod method)
    : model_(std::move(model)), q_(q), phi_(0), method_(method) {
  require(q_ > 0 && std::isfinite(q_), "ScaleEngine: q must be > 0");
  phi_ = model_.phi(q_);
  backend_ = std::visit(
      [&](const auto& m) -> std::shared_ptr<const detail::ScaleBackend> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NumericInversion>)
          return std::make_shared<InversionCacheBackend>(model_, q_, m);
        else if constexpr (std::is_same_v<T, ClosedFormBrownian>)
          return std::make_shared<ExponentialSumBackend>(brownian_terms(model_, q_));
        else
          return std::make_shared<ExponentialSumBackend>(cramer_lundberg_terms(model_, q_));
      },
      method_);
}

ScaleValues ScaleEngine::values(double x) const {
  if (!std::isfinite(x)) throw DomainError("scale function argument must be finite");
  if (x < 0) return {0.0, 0.0, 0.0, 0.0};
  return backend_->eval(x);
}

double ScaleEngine::w(double x) const { return values(x).w; }
double ScaleEngine::w_prime(double x) const { return values(x).w_prime; }
double ScaleEngine::w_bar(double x) const { return values(x).w_bar; }
double ScaleEngine::z(double x) const { return 1.0 + q_ * values(x).w_bar; }

double ScaleEngine::z_bar(double x) const {
  if (x <= 0) return x;
  return x + q_ * values(x).w_bar_bar;
}

double ScaleEngine::k(double x) const { return z_bar(x) + model_.mean() / q_; }

double ScaleEngine::w_at_zero() const { return w_zero(model_); }
double ScaleEngine::w_prime_at_zero() const { return w_prime_zero(model_, q_); }

namespace {

// The two terms of H grow like exp(Phi a) while H decays, so H is only
// resolved while it stays well above the rounding level of Z(a).
constexpr double kHResolution = 1e-11;

struct HEstimate {
  double value;
  double resolution;
};

HEstimate h_estimate(const ScaleEngine& e, double a) {
  const auto v = e.values(a);
  const double z = 1.0 + e.q() * v.w_bar;
  return {z - e.q() * v.w * v.w / v.w_prime, kHResolution * z};
}

}  // namespace

double ScaleEngine::h(double a) const {
  require(a > 0, "H(a): a must be > 0");
  const auto est = h_estimate(*this, a);
  if (!(est.value > est.resolution)) {
    std::ostringstream msg;
    msg << "H(" << a << ") is below the attainable resolution " << est.resolution;
    throw NumericalError(msg.str());
  }
  return est.value;
}

double ScaleEngine::h_at_zero() const {
  const double w0 = w_at_zero();
  return 1.0 - q_ * w0 * w0 / w_prime_at_zero();
}

double ScaleEngine::h_inverse(double y) const {
  const double top = h_at_zero();
  if (!(y > 0) || y > top * (1.0 + 1e-14)) {
    std::ostringstream msg;
    msg << "H^{-1}(y): y = " << y << " outside (0, " << top << "]";
    throw DomainError(msg.str());
  }
  if (y >= top) return 0.0;
  // An unresolved point is still usable when its error band sits below y.
  auto f = [&](double a) {
    const auto est = h_estimate(*this, a);
    if (est.value > est.resolution) return est.value - y;
    if (est.value + est.resolution < y) return -y;
    std::ostringstream msg;
    msg << "H^{-1}(" << y << "): level below the resolution of H near a = " << a;
    throw NumericalError(msg.str());
  };
  const double hi = roots::expand_until([&](double a) { return f(a) < 0; }, 0.0, 1.0,
                                        max_range(), "H^{-1} bracketing");
  return roots::bisect(f, 0.0, hi, top - y, f(hi), "H^{-1}",
                       {.abs_tol = 1e-13 * std::max(1.0, hi)});
}

double ScaleEngine::exit_up(double x, double b, double a) const {
  require(b < a && b <= x && x <= a, "exit_up: need b < a and b <= x <= a");
  return w(x - b) / w(a - b);
}

double ScaleEngine::exit_down(double x, double b, double a) const {
  require(b < a && b <= x && x <= a, "exit_down: need b < a and b <= x <= a");
  return z(x - b) - z(a - b) * w(x - b) / w(a - b);
}

double ScaleEngine::reflected_upcross(double x, double b) const {
  require(0 <= x && x <= b, "reflected_upcross: need 0 <= x <= b");
  return z(x) / z(b);
}

double ScaleEngine::injection_until_upcross(double x, double b) const {
  require(0 <= x && x <= b, "injection_until_upcross: need 0 <= x <= b");
  return -k(x) + k(b) * z(x) / z(b);
}

void ScaleEngine::reserve(double x_max) const { backend_->reserve(x_max); }
double ScaleEngine::max_range() const { return backend_->max_range(); }
double ScaleEngine::cached_range() const { return backend_->cached_range(); }

std::vector<ScaleSample> ScaleEngine::sample_grid(double x_max, double step) const {
  require(step > 0 && x_max >= 0, "sample_grid: need step > 0 and x_max >= 0");
  std::vector<ScaleSample> out;
  const auto n = static_cast<std::size_t>(std::floor(x_max / step + 1e-9));
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = i * step;
    const auto v = values(x);
    out.push_back({x, v.w, v.w_prime, 1.0 + q_ * v.w_bar, v.w_bar, x + q_ * v.w_bar_bar});
  }
  return out;
}

}  // namespace bailout
