#include "bailout/mc_simulator.hpp"

#include <algorithm>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "bailout/errors.hpp"

namespace bailout {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Bridge extremes are only sampled when a level is within this many
// standard deviations of the step's endpoints.
constexpr double kReach = 8.0;
// Longest step taken far from every boundary.
constexpr double kMaxStep = 1.0;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(3 * index + stream));
}

enum class Mode { Policy, Exit, Upcross };

struct Task {
  Mode mode = Mode::Policy;
  Policy policy = PayNothing{};
  double x = 0;
  // Exit band [lo, hi] (Exit) or upper level hi (Upcross).
  double lo = 0;
  double hi = 0;
};

struct PathOut {
  double first = 0;   // dividends, or the first discounted indicator
  double second = 0;  // injections, or the second estimate
  double count = 0;
  double end_state = 0;
  bool reached_horizon = false;
};

struct Streams {
  std::mt19937_64 jumps;   // arrival times, sizes and kill time
  std::mt19937_64 gauss;   // Gaussian increments
  std::mt19937_64 bridge;  // bridge-extreme uniforms
};

class Simulator {
 public:
  Simulator(const LevyModel& model, double q, const SimConfig& config)
      : c_(model.drift()),
        sigma_(model.sigma()),
        rate_(model.jump_rate()),
        jumps_(model.jumps()),
        q_(q),
        config_(config),
        horizon_(config.horizon.value_or(6.0 * std::log(10.0) / q)),
        switch_(config.kill_after.value_or(kInf)),
        full_step_(std::exp(-q * config.time_step)),
        half_step_(std::exp(-0.5 * q * config.time_step)) {
    if (!(q > 0) || !std::isfinite(q)) throw DomainError("simulation: q must be > 0");
    if (config.n_paths == 0) throw DomainError("simulation: n_paths must be > 0");
    if (!(config.time_step > 0)) throw DomainError("simulation: time_step must be > 0");
    if (!(horizon_ > 0) || !std::isfinite(horizon_))
      throw DomainError("simulation: horizon must be > 0");
    if (!(switch_ >= 0)) throw DomainError("simulation: kill_after must be >= 0");
    residual_scale_ = (std::abs(c_) + sigma_ + rate_ * model.mean_jump()) / q;
  }

  double horizon() const { return horizon_; }
  double residual_scale() const { return residual_scale_; }

  PathOut run(const Task& task, Streams& s, bool negate,
              std::vector<TracePoint>* trace) const {
    PathOut out;
    double y = task.x;
    const double h = sigma_ > 0 ? config_.time_step : kInf;
    const double var_unit = sigma_ * sigma_;

    const auto* barrier = std::get_if<Barrier>(&task.policy);
    const auto* pair = std::get_if<ReflectedPair>(&task.policy);

    // Time-zero actions.
    switch (task.mode) {
      case Mode::Policy:
        if (barrier && y > barrier->a) {
          out.first += y - barrier->a;
          y = barrier->a;
        } else if (pair && y >= pair->c2) {
          out.first += y - pair->c1 - pair->delta;
          out.count += 1;
          y = pair->c1;
        }
        break;
      case Mode::Exit:
        if (y >= task.hi) {
          out.first = 1;
          return out;
        }
        if (y < task.lo || (y == task.lo && sigma_ > 0)) {
          out.second = 1;
          return out;
        }
        break;
      case Mode::Upcross:
        if (y >= task.hi) {
          out.first = 1;
          return out;
        }
        break;
    }

    boost::random::exponential_distribution<double> expo(1.0);
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    boost::random::uniform_01<double> unif;

    double end = horizon_;
    if (switch_ < horizon_) end = std::min(end, switch_ + expo(s.jumps) / q_);
    double next_jump = rate_ > 0 ? expo(s.jumps) / rate_ : kInf;

    auto uniform = [&] { return 1.0 - unif(s.bridge); };  // (0, 1]
    double t = 0, df = 1;

    while (t < end) {
      double dt = h;
      if (sigma_ > 0) {
        // Longer steps while every boundary is out of reach.
        const double dist = boundary_distance(task, y);
        double far = dist / (kReach * sigma_);
        far = std::min(far * far, dist / (2.0 * std::abs(c_)));
        if (far > dt) dt = std::min(far, kMaxStep);
      }
      dt = std::min(dt, end - t);
      const bool discounting = t < switch_;
      if (discounting) dt = std::min(dt, switch_ - t);
      bool jump_now = false;
      if (next_jump - t <= dt) {
        dt = next_jump - t;
        jump_now = true;
      }
      const double r = discounting ? q_ : 0.0;
      double d_end = df, d_mid = df;
      if (discounting) {
        d_end *= dt == h ? full_step_ : std::exp(-q_ * dt);
        d_mid *= dt == h ? half_step_ : std::exp(-0.5 * q_ * dt);
      }

      if (sigma_ > 0) {
        const double sd = sigma_ * std::sqrt(dt);
        double n = normal(s.gauss);
        if (negate) n = -n;
        const double w = c_ * dt + sd * n;
        const double var = var_unit * dt;
        const double w_lo = std::min(0.0, w), w_hi = std::max(0.0, w);
        auto bridge_min = [&] { return 0.5 * (w - std::sqrt(w * w - 2.0 * var * std::log(uniform()))); };
        auto bridge_max = [&] { return 0.5 * (w + std::sqrt(w * w - 2.0 * var * std::log(uniform()))); };
        const double reach = kReach * sd;

        if (task.mode == Mode::Exit) {
          if (y + w_lo - task.lo < reach && y + bridge_min() <= task.lo) {
            out.second = d_mid;
            return out;
          }
          if (task.hi - (y + w_hi) < reach && y + bridge_max() >= task.hi) {
            out.first = d_mid;
            return out;
          }
          y += w;
        } else {
          double injected = 0;
          if (y + w_lo < reach) injected = std::max(0.0, -(y + bridge_min()));
          double y_new = y + w + injected;
          if (task.mode == Mode::Upcross) {
            out.second += d_mid * injected;
            if (task.hi - (y + w_hi) < reach && y + bridge_max() >= task.hi) {
              out.first = d_mid;
              return out;
            }
          } else if (barrier) {
            if (barrier->a - (y + w_hi) < reach) {
              const double paid = std::max(0.0, y + bridge_max() - barrier->a);
              out.first += d_mid * paid;
              y_new -= paid;
            }
            y_new = std::clamp(y_new, 0.0, barrier->a);
          } else if (pair) {
            if (pair->c2 - (y + w_hi) < reach && y + bridge_max() >= pair->c2) {
              const double lump = pair->c2 - pair->c1;
              int k = 1;
              y_new -= lump;
              while (y_new >= pair->c2) {
                y_new -= lump;
                ++k;
              }
              out.first += d_mid * k * (lump - pair->delta);
              out.count += k;
            }
            if (y_new < 0) {
              injected -= y_new;
              y_new = 0;
            }
          } else {
            y_new = std::max(y_new, 0.0);
          }
          if (task.mode == Mode::Policy) out.second += d_mid * injected;
          y = y_new;
        }
      } else {
        // Bounded variation: deterministic drift c > 0 between jumps.
        const double rise = c_ * dt;
        auto discount_at = [&](double s) { return df * std::exp(-r * s); };
        if (task.mode == Mode::Exit || task.mode == Mode::Upcross) {
          if (y + rise >= task.hi) {
            out.first = discount_at((task.hi - y) / c_);
            return out;
          }
          y += rise;
        } else if (barrier) {
          if (y + rise > barrier->a) {
            const double s0 = (barrier->a - y) / c_;
            const double paid = r > 0 ? c_ * (discount_at(s0) - d_end) / r : c_ * (dt - s0) * df;
            out.first += paid;
            y = barrier->a;
          } else {
            y += rise;
          }
        } else if (pair) {
          double s0 = 0;
          while (y + c_ * (dt - s0) >= pair->c2) {
            s0 += (pair->c2 - y) / c_;
            out.first += discount_at(s0) * (pair->c2 - pair->c1 - pair->delta);
            out.count += 1;
            y = pair->c1;
          }
          y += c_ * (dt - s0);
        } else {
          y += rise;
        }
      }

      t += dt;
      df = d_end;
      if (jump_now) {
        y -= draw_jump(s.jumps);
        if (task.mode == Mode::Exit) {
          if (y < task.lo) {
            out.second = df;
            return out;
          }
        } else if (y < 0) {
          if (task.mode == Mode::Policy || task.mode == Mode::Upcross) out.second += df * -y;
          y = 0;
        }
        next_jump = t + expo(s.jumps) / rate_;
      }
      if (trace) trace->push_back({t, y});
    }
    out.end_state = y;
    out.reached_horizon = t >= horizon_;
    return out;
  }

 private:
  double boundary_distance(const Task& task, double y) const {
    switch (task.mode) {
      case Mode::Exit:
        return std::min(y - task.lo, task.hi - y);
      case Mode::Upcross:
        return std::min(y, task.hi - y);
      case Mode::Policy:
        break;
    }
    if (auto b = std::get_if<Barrier>(&task.policy)) return std::min(y, b->a - y);
    if (auto p = std::get_if<ReflectedPair>(&task.policy)) return std::min(y, p->c2 - y);
    return y;
  }

  double draw_jump(std::mt19937_64& g) const {
    return std::visit(
        [&](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, ExponentialJumps>) {
            return boost::random::exponential_distribution<double>(1.0 / d.mean)(g);
          } else {
            return boost::random::gamma_distribution<double>(d.shape, d.scale)(g);
          }
        },
        jumps_->dist);
  }

  double c_, sigma_, rate_;
  std::optional<CompoundPoisson> jumps_;
  double q_;
  SimConfig config_;
  double horizon_;
  double switch_;
  double full_step_, half_step_;
  double residual_scale_ = 0;
};

struct Moments {
  double mean = 0;
  double se = 0;
};

// Mean and standard error over independent units (paths, or antithetic
// pair averages).
Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double sum = 0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = v.size() > 1 ? ss / (n - 1) : 0.0;
  return {mean, std::sqrt(var / n)};
}

struct Batch {
  std::vector<PathOut> paths;
  std::size_t units = 0;
  bool antithetic = false;
};

Batch run_batch(const Simulator& sim, const Task& task, const SimConfig& config) {
  Batch b;
  b.antithetic = config.antithetic;
  const std::size_t per_unit = config.antithetic ? 2 : 1;
  b.units = (config.n_paths + per_unit - 1) / per_unit;
  b.paths.resize(b.units * per_unit);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      for (std::size_t k = 0; k < per_unit; ++k) {
        // Members of an antithetic pair share jump and Gaussian streams.
        Streams s{std::mt19937_64(stream_seed(config.seed, u, 0)),
                  std::mt19937_64(stream_seed(config.seed, u, 1)),
                  std::mt19937_64(stream_seed(config.seed, u * per_unit + k, 2))};
        b.paths[u * per_unit + k] = sim.run(task, s, k == 1, nullptr);
      }
    }
  };

  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(b.units)));
  if (threads == 1) {
    work(0, b.units);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (b.units + threads - 1) / threads;
    for (unsigned i = 0; i < threads; ++i) {
      const std::size_t lo = i * chunk, hi = std::min(b.units, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return b;
}

template <typename Field>
Moments unit_moments(const Batch& b, Field field) {
  const std::size_t per_unit = b.antithetic ? 2 : 1;
  std::vector<double> v(b.units);
  for (std::size_t u = 0; u < b.units; ++u) {
    double s = 0;
    for (std::size_t k = 0; k < per_unit; ++k) s += field(b.paths[u * per_unit + k]);
    v[u] = s / per_unit;
  }
  return moments(v);
}

void validate_policy(const LevyModel& model, const Policy& policy) {
  if (auto b = std::get_if<Barrier>(&policy)) {
    if (!(b->a >= 0) || !std::isfinite(b->a)) throw DomainError("barrier level must be >= 0");
    if (b->a == 0 && !model.is_bounded_variation())
      throw DomainError("a barrier at 0 cannot be simulated with a Gaussian component");
  } else if (auto p = std::get_if<ReflectedPair>(&policy)) {
    if (!(p->c1 >= 0 && p->c1 < p->c2) || !std::isfinite(p->c2) || !(p->delta >= 0))
      throw DomainError("pair policy needs 0 <= c1 < c2 and delta >= 0");
  }
}

ExitEstimate to_exit_estimate(const Batch& b) {
  const auto f = unit_moments(b, [](const PathOut& p) { return p.first; });
  const auto s = unit_moments(b, [](const PathOut& p) { return p.second; });
  return {f.mean, f.se, s.mean, s.se, b.paths.size()};
}

}  // namespace

SimResult simulate_policy(const LevyModel& model, const Policy& policy, double x,
                          double q, const SimConfig& config) {
  if (!(x >= 0) || !std::isfinite(x)) throw DomainError("simulation: x must be >= 0");
  validate_policy(model, policy);
  const Simulator sim(model, q, config);
  const Batch b = run_batch(sim, Task{Mode::Policy, policy, x, 0, 0}, config);

  SimResult r;
  const auto div = unit_moments(b, [](const PathOut& p) { return p.first; });
  const auto inj = unit_moments(b, [](const PathOut& p) { return p.second; });
  const auto cnt = unit_moments(b, [](const PathOut& p) { return p.count; });
  r.dividends_mean = div.mean;
  r.dividends_se = div.se;
  r.injections_mean = inj.mean;
  r.injections_se = inj.se;
  r.payments_count_mean = cnt.mean;
  r.n_paths_used = b.paths.size();
  r.horizon = sim.horizon();

  double tail = 0;
  std::size_t reached = 0;
  for (const auto& p : b.paths) {
    if (!p.reached_horizon) continue;
    tail += p.end_state;
    ++reached;
  }
  const double mean_end = reached ? tail / reached : 0.0;
  r.truncation_bound = std::exp(-q * r.horizon) * (mean_end + sim.residual_scale());
  r.horizon_warning = r.truncation_bound > 0.1 * r.dividends_se;
  return r;
}

ExitEstimate simulate_exit(const LevyModel& model, double x, double b, double a,
                           double q, const SimConfig& config) {
  if (!(b < a && b <= x && x <= a)) throw DomainError("simulate_exit: need b < a and b <= x <= a");
  const Simulator sim(model, q, config);
  return to_exit_estimate(run_batch(sim, Task{Mode::Exit, PayNothing{}, x, b, a}, config));
}

ExitEstimate simulate_reflected_upcross(const LevyModel& model, double x, double b,
                                        double q, const SimConfig& config) {
  if (!(0 <= x && x <= b)) throw DomainError("simulate_reflected_upcross: need 0 <= x <= b");
  const Simulator sim(model, q, config);
  return to_exit_estimate(run_batch(sim, Task{Mode::Upcross, PayNothing{}, x, 0, b}, config));
}

std::vector<TracePoint> trace_policy_path(const LevyModel& model, const Policy& policy,
                                          double x, double q, const SimConfig& config) {
  if (!(x >= 0)) throw DomainError("simulation: x must be >= 0");
  validate_policy(model, policy);
  const Simulator sim(model, q, config);
  Streams s{std::mt19937_64(stream_seed(config.seed, 0, 0)),
            std::mt19937_64(stream_seed(config.seed, 0, 1)),
            std::mt19937_64(stream_seed(config.seed, 0, 2))};
  std::vector<TracePoint> trace{{0.0, x}};
  sim.run(Task{Mode::Policy, policy, x, 0, 0}, s, false, &trace);
  return trace;
}

}  // namespace bailout
