#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <system_error>

#include "bailout/constraint_solver.hpp"
#include "bailout/errors.hpp"
#include "bailout/mc_simulator.hpp"
#include "bailout/model_config.hpp"
#include "bailout_cli/cli.hpp"
#include "bailout_cli/grid.hpp"
#include "bailout_cli/table.hpp"

namespace bailout::cli {

namespace {

constexpr double kDefaultK = 2.7;
constexpr double kDefaultFigureDelta = 0.05;

struct Context {
  const RunSpec& spec;
  LevyModel model;
  ScaleEngine engine;
  std::ostream& err;
};

Context make_context(const RunSpec& spec, std::ostream& err) {
  auto cfg = load_model_config(spec.model_path);
  const auto q = spec.q ? spec.q : cfg.q;
  if (!q) throw DomainError("the discount rate q is required (--q or \"q\" in the model file)");
  return Context{spec, cfg.model, ScaleEngine(cfg.model, *q), err};
}

std::vector<double> grid_or(const std::optional<std::string>& grid,
                            const std::optional<double>& single, const char* fallback) {
  if (grid) return parse_grid(*grid);
  if (single) return {*single};
  return parse_grid(fallback);
}

double delta_or(const RunSpec& spec, double fallback) {
  const double d = spec.delta.value_or(fallback);
  if (!(d >= 0)) throw DomainError("--delta must be >= 0");
  return d;
}

Cell opt_cell(const std::optional<double>& v) {
  if (v) return *v;
  return Missing{};
}

// Output of one command: tables keyed by role. The first is the main
// output; extra tables go to <stem>_<name>.csv (or extra JSON members).
struct Output {
  std::vector<std::pair<std::string, Table>> tables;
  std::optional<nlohmann::json> document;
};

Output single(std::string name, Table t) {
  Output o;
  o.tables.emplace_back(std::move(name), std::move(t));
  return o;
}

Output cmd_scale(const Context& c) {
  Table t{{"x", "W", "Wprime", "Z", "Wbar", "Zbar"}, {}};
  for (double x : grid_or(c.spec.x_grid, c.spec.x, "0:0.01:10")) {
    const auto v = c.engine.values(x);
    t.add({x, v.w, v.w_prime, c.engine.z(x), v.w_bar, c.engine.z_bar(x)});
  }
  return single("scale", std::move(t));
}

Output cmd_barrier(const Context& c) {
  Table t{{"lambda", "a", "x", "dividends_npv", "injections_npv", "combined"}, {}};
  const auto xs = grid_or(c.spec.x_grid, c.spec.x, "0:0.1:10");
  for (double lambda : grid_or(c.spec.lambda_grid, c.spec.lambda, "1")) {
    const double a = c.spec.a ? *c.spec.a : optimal_barrier(c.engine, lambda);
    for (double x : xs) {
      const auto r = barrier_value(c.engine, lambda, a, x);
      t.add({lambda, a, x, r.dividends_npv, r.injections_npv, r.combined});
    }
  }
  return single("barrier", std::move(t));
}

Output cmd_thresholds(const Context& c) {
  const double delta = delta_or(c.spec, kDefaultFigureDelta);
  Table t{{"lambda", "delta", "a_lambda", "c1", "c2", "g_max", "zeta_c1", "zeta_c2"}, {}};
  for (double lambda : grid_or(c.spec.lambda_grid, c.spec.lambda, "1:1:9")) {
    const auto th = optimal_thresholds(c.engine, lambda, delta);
    const double z1 = th.c1 > 0 ? zeta(c.engine, lambda, th.c1) : zeta_at_zero(c.engine, lambda);
    t.add({lambda, delta, th.a_lambda, th.c1, th.c2, th.g_max, z1, zeta(c.engine, lambda, th.c2)});
  }
  return single("thresholds", std::move(t));
}

void policy_cells(const Policy& p, std::vector<Cell>& row) {
  if (auto b = std::get_if<Barrier>(&p)) {
    row.insert(row.end(), {std::string("barrier"), b->a, Missing{}});
  } else if (auto r = std::get_if<ReflectedPair>(&p)) {
    row.insert(row.end(), {std::string("pair"), r->c1, r->c2});
  } else {
    row.insert(row.end(), {std::string("pay_nothing"), Missing{}, Missing{}});
  }
}

Output cmd_constrained(const Context& c) {
  const double delta = delta_or(c.spec, 0.0);
  Table t{{"x", "K", "delta", "status", "lambda_star", "policy", "a_or_c1", "c2", "value",
           "injections_check"},
          {}};
  const auto ks = grid_or(c.spec.K_grid, c.spec.K, "2.7");
  for (double x : grid_or(c.spec.x_grid, c.spec.x, "0:0.5:10")) {
    for (double K : ks) {
      const auto s = solve_constrained(c.engine, x, K, delta);
      for (const auto& w : s.warnings) c.err << "warning: x=" << x << " K=" << K << ": " << w << '\n';
      std::vector<Cell> row{x, K, delta, to_string(s.status), opt_cell(s.lambda_star)};
      policy_cells(s.policy, row);
      row.push_back(opt_cell(s.value));
      row.push_back(s.injections_check);
      t.add(std::move(row));
    }
  }
  return single("constrained", std::move(t));
}

// lambda* at x, or missing when the solver reports no multiplier or fails.
std::optional<double> lambda_star_at(const Context& c, double x, double K, double delta) {
  try {
    return solve_constrained(c.engine, x, K, delta).lambda_star;
  } catch (const NumericalError& e) {
    c.err << "warning: no multiplier at x=" << x << ": " << e.what() << '\n';
    return std::nullopt;
  }
}

Output cmd_dual(const Context& c, double delta, bool compare_no_cost) {
  const double K = c.spec.K.value_or(kDefaultK);
  const auto xs = grid_or(c.spec.x_grid, c.spec.x, "0:0.1:10");
  const auto lambdas = c.spec.lambda_grid ? parse_grid(*c.spec.lambda_grid)
                       : c.spec.lambda    ? std::vector<double>{*c.spec.lambda}
                                          : figure_lambda_grid();
  const auto env = dual_envelope(c.engine, xs, K, lambdas, delta);
  Table t{{"x", "lambda", "curve", "envelope", "lambda_star"}, {}};
  if (compare_no_cost) t.columns.push_back("lambda_star_no_cost");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Cell star = opt_cell(lambda_star_at(c, xs[i], K, delta));
    const Cell star0 = compare_no_cost ? opt_cell(lambda_star_at(c, xs[i], K, 0.0)) : Cell{};
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      std::vector<Cell> row{xs[i], lambdas[j], env.curves[i][j], env.envelope[i], star};
      if (compare_no_cost) row.push_back(star0);
      t.add(std::move(row));
    }
  }
  return single(compare_no_cost ? "figure4" : "figure1", std::move(t));
}

Output cmd_figure2(const Context& c) {
  const double delta = delta_or(c.spec, 0.0);
  Table t{{"x", "K", "value", "lambda_star", "status"}, {}};
  const auto ks = grid_or(c.spec.K_grid, c.spec.K, "1:0.25:8");
  for (double x : grid_or(c.spec.x_grid, c.spec.x, "0:0.25:8")) {
    for (double K : ks) {
      const auto s = solve_constrained(c.engine, x, K, delta);
      t.add({x, K, opt_cell(s.value), opt_cell(s.lambda_star), to_string(s.status)});
    }
  }
  return single("figure2", std::move(t));
}

Output cmd_figure3(const Context& c) {
  const double delta = delta_or(c.spec, kDefaultFigureDelta);
  const auto lambdas = grid_or(c.spec.lambda_grid, c.spec.lambda, "1:1:9");
  const auto xs = grid_or(c.spec.x_grid, c.spec.x, "0.05:0.05:15");
  Table curves{{"lambda", "x", "zeta"}, {}};
  Table marks{{"lambda", "a_lambda", "c1", "c2", "zeta_a", "zeta_c1", "zeta_c2"}, {}};
  auto z = [&](double lambda, double a) {
    return a > 0 ? zeta(c.engine, lambda, a) : zeta_at_zero(c.engine, lambda);
  };
  for (double lambda : lambdas) {
    for (double x : xs) curves.add({lambda, x, z(lambda, x)});
    const auto th = optimal_thresholds(c.engine, lambda, delta);
    marks.add({lambda, th.a_lambda, th.c1, th.c2, z(lambda, th.a_lambda), z(lambda, th.c1),
               z(lambda, th.c2)});
  }
  Output o;
  o.tables.emplace_back("figure3", std::move(curves));
  o.tables.emplace_back("thresholds", std::move(marks));
  return o;
}

Output cmd_simulate(const Context& c) {
  const auto& s = c.spec;
  const double x = s.x.value_or(1.0);
  const double lambda = s.lambda.value_or(1.0);
  const double delta = delta_or(s, 0.0);
  Policy policy = PayNothing{};
  if (s.policy == "optimal") {
    policy = optimal_policy(c.engine, lambda, delta);
  } else if (s.policy == "barrier") {
    policy = Barrier{s.a ? *s.a : optimal_barrier(c.engine, lambda)};
  } else if (s.policy == "pair") {
    if (s.c1.has_value() != s.c2.has_value())
      throw DomainError("--policy pair needs both --c1 and --c2, or neither");
    if (s.c1) {
      policy = ReflectedPair{*s.c1, *s.c2, delta};
    } else {
      if (!(delta > 0)) throw DomainError("optimal pair thresholds need --delta > 0");
      const auto th = optimal_thresholds(c.engine, lambda, delta);
      policy = ReflectedPair{th.c1, th.c2, delta};
    }
  }

  SimConfig cfg;
  cfg.n_paths = s.paths;
  cfg.seed = s.seed;
  cfg.threads = s.threads;
  if (s.dt) cfg.time_step = *s.dt;
  cfg.horizon = s.horizon;
  cfg.kill_after = s.kill_after;
  const auto r = simulate_policy(c.model, policy, x, c.engine.q(), cfg);
  const auto exact = policy_value(c.engine, lambda, policy, x);

  Table t{{"policy", "x", "lambda", "dividends_mean", "dividends_se", "injections_mean",
           "injections_se", "payments_count_mean", "n_paths_used", "horizon", "truncation_bound",
           "horizon_warning", "dividends_npv", "injections_npv"},
          {}};
  t.add({describe(policy), x, lambda, r.dividends_mean, r.dividends_se, r.injections_mean,
         r.injections_se, r.payments_count_mean, static_cast<double>(r.n_paths_used), r.horizon,
         r.truncation_bound, std::string(r.horizon_warning ? "true" : "false"),
         exact.dividends_npv, exact.injections_npv});

  Output o = single("simulate", std::move(t));
  nlohmann::json doc{
      {"policy", describe(policy)},
      {"x", x},
      {"q", c.engine.q()},
      {"lambda", lambda},
      {"config",
       {{"n_paths", cfg.n_paths},
        {"time_step", cfg.time_step},
        {"seed", cfg.seed},
        {"antithetic", cfg.antithetic},
        {"kill_after", cfg.kill_after ? nlohmann::json(*cfg.kill_after) : nlohmann::json()}}},
      {"result",
       {{"dividends_mean", r.dividends_mean},
        {"dividends_se", r.dividends_se},
        {"injections_mean", r.injections_mean},
        {"injections_se", r.injections_se},
        {"payments_count_mean", r.payments_count_mean},
        {"n_paths_used", r.n_paths_used},
        {"horizon", r.horizon},
        {"truncation_bound", r.truncation_bound},
        {"horizon_warning", r.horizon_warning}}},
      {"analytic", {{"dividends_npv", exact.dividends_npv}, {"injections_npv", exact.injections_npv}}},
  };
  o.document = std::move(doc);
  return o;
}

Output dispatch(const Context& c) {
  switch (c.spec.command) {
    case Command::Scale: return cmd_scale(c);
    case Command::Barrier: return cmd_barrier(c);
    case Command::Thresholds: return cmd_thresholds(c);
    case Command::Constrained: return cmd_constrained(c);
    case Command::Simulate: return cmd_simulate(c);
    case Command::Figure1: return cmd_dual(c, delta_or(c.spec, 0.0), false);
    case Command::Figure2: return cmd_figure2(c);
    case Command::Figure3: return cmd_figure3(c);
    case Command::Figure4: return cmd_dual(c, delta_or(c.spec, kDefaultFigureDelta), true);
  }
  throw DomainError("unknown command");
}

std::filesystem::path companion_path(const std::filesystem::path& main, const std::string& name) {
  auto p = main;
  p.replace_filename(main.stem().string() + "_" + name + main.extension().string());
  return p;
}

void open_or_throw(std::ofstream& f, const std::filesystem::path& p) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  f.open(p, std::ios::binary);
  if (!f) throw DomainError("cannot write output file " + p.string());
}

void emit(const RunSpec& spec, const Output& o, std::ostream& out) {
  if (spec.format == Format::Json) {
    nlohmann::json doc;
    if (o.document) {
      doc = *o.document;
    } else if (o.tables.size() == 1) {
      doc = to_json(o.tables.front().second);
    } else {
      for (const auto& [name, t] : o.tables) doc[name] = to_json(t);
    }
    if (spec.output_path.empty()) {
      out << doc.dump(2) << '\n';
    } else {
      std::ofstream f;
      open_or_throw(f, spec.output_path);
      f << doc.dump(2) << '\n';
    }
    return;
  }
  for (std::size_t i = 0; i < o.tables.size(); ++i) {
    if (spec.output_path.empty()) {
      if (i) out << '\n';
      write_csv(o.tables[i].second, out);
    } else {
      std::ofstream f;
      open_or_throw(f, i ? companion_path(spec.output_path, o.tables[i].first) : spec.output_path);
      write_csv(o.tables[i].second, f);
    }
  }
}

void report(std::ostream& err, const char* kind, const std::string& message, int code) {
  err << nlohmann::json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    const Context c = make_context(spec, err);
    emit(spec, dispatch(c), out);
    return kExitOk;
  } catch (const DomainError& e) {
    report(err, "config", e.what(), kExitConfig);
    return kExitConfig;
  } catch (const NumericalError& e) {
    report(err, "numerical", e.what(), kExitNumerical);
    return kExitNumerical;
  } catch (const std::exception& e) {
    report(err, "numerical", e.what(), kExitNumerical);
    return kExitNumerical;
  }
}

}  // namespace bailout::cli
