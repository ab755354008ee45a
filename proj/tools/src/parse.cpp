#include <CLI11.hpp>
#include <array>
#include <ostream>
#include <utility>

#include "bailout_cli/cli.hpp"

namespace bailout::cli {

namespace {

constexpr std::array<std::pair<Command, const char*>, 9> kCommands{{
    {Command::Scale, "tabulate W, W', Z, Wbar, Zbar on an x grid"},
    {Command::Barrier, "barrier policy values (optimal a unless --a is given)"},
    {Command::Thresholds, "optimal (c1, c2) thresholds over a lambda grid"},
    {Command::Constrained, "solve the injection-constrained problem on x/K grids"},
    {Command::Simulate, "Monte Carlo estimate of a policy's dividends and injections"},
    {Command::Figure1, "dual curves lambda K + V_lambda(x) and their envelope, delta = 0"},
    {Command::Figure2, "constrained value and multiplier surface over (x, K)"},
    {Command::Figure3, "zeta curves and the thresholds a, c1, c2 per lambda"},
    {Command::Figure4, "figure1 with a transaction cost, plus the no-cost multiplier"},
}};

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Scale: return "scale";
    case Command::Barrier: return "barrier";
    case Command::Thresholds: return "thresholds";
    case Command::Constrained: return "constrained";
    case Command::Simulate: return "simulate";
    case Command::Figure1: return "figure1";
    case Command::Figure2: return "figure2";
    case Command::Figure3: return "figure3";
    case Command::Figure4: return "figure4";
  }
  return "unknown";
}

ParseOutcome parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                std::ostream& err) {
  RunSpec spec;
  CLI::App app{"Bail-out dividend problems with fixed costs and injection constraints"};
  app.require_subcommand(1);

  std::string model;
  std::string format = "csv";
  std::string output;
  app.add_option("--model", model, "model JSON file")->required();
  app.add_option("--q", spec.q, "discount rate (overrides the model file)");
  app.add_option("--delta", spec.delta, "fixed transaction cost");
  app.add_option("--x", spec.x, "initial capital");
  app.add_option("--K", spec.K, "injection budget");
  app.add_option("--lambda", spec.lambda, "multiplier for single-lambda commands");
  app.add_option("--a", spec.a, "barrier level");
  app.add_option("--c1", spec.c1, "lower threshold");
  app.add_option("--c2", spec.c2, "upper threshold");
  app.add_option("--lambda-grid", spec.lambda_grid, "lambda grid: list, start:step:stop or 'figure'");
  app.add_option("--x-grid", spec.x_grid, "x grid");
  app.add_option("--K-grid", spec.K_grid, "K grid");
  app.add_option("--policy", spec.policy, "simulate: optimal, barrier, pair or none")
      ->check(CLI::IsMember({"optimal", "barrier", "pair", "none"}));
  app.add_option("--dt", spec.dt, "simulation step near boundaries");
  app.add_option("--horizon", spec.horizon, "simulation horizon");
  app.add_option("--kill-after", spec.kill_after, "switch from discounting to Exp(q) killing");
  app.add_option("--seed", spec.seed, "random seed");
  app.add_option("--paths", spec.paths, "number of simulated paths")->check(CLI::PositiveNumber);
  app.add_option("--threads", spec.threads, "worker threads (0 = all cores)");
  app.add_option("--out", output, "output file (default stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::vector<std::pair<Command, CLI::App*>> subs;
  for (const auto& [cmd, help] : kCommands)
    subs.emplace_back(cmd, app.add_subcommand(to_string(cmd), help)->fallthrough());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return {std::nullopt, app.exit(e, out, err) == 0 ? kExitOk : kExitConfig};
  }
  for (const auto& [cmd, sub] : subs)
    if (sub->parsed()) spec.command = cmd;
  spec.model_path = model;
  spec.output_path = output;
  spec.format = format == "json" ? Format::Json : Format::Csv;
  return {spec, kExitOk};
}

}  // namespace bailout::cli
