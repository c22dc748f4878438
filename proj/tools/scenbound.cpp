// Command-line front end: epsilon, bound, simulate, validate.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scenbound/commands.hpp"

namespace {

void add_selection(CLI::App* cmd, scenbound::cli::SelectionOptions& sel) {
  cmd->add_option("--input", sel.input, "Hub-format quantile CSV")->required();
  cmd->add_option("--x", sel.scenario_x, "Scenario X (differences are X - Y)")->required();
  cmd->add_option("--y", sel.scenario_y, "Scenario Y")->required();
  cmd->add_option("--target", sel.target, "Target name, e.g. \"cum case\"")->required();
  cmd->add_option("--location", sel.location, "Location code")->required();
  cmd->add_option("--model", sel.model, "Restrict to one model (default: all)");
  cmd->add_option("--columns", sel.column_map, "JSON file mapping field names to CSV headers");
  cmd->add_flag("--lenient", sel.lenient, "Skip malformed rows instead of failing");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace scenbound;
  CLI::App app{"Confidence bounds on scenario differences from quantile projections"};
  app.set_version_flag("--version", std::string(cli::kToolVersion));
  app.require_subcommand(1);

  cli::EpsilonOptions eps_opt;
  std::string eps_out;
  auto* eps_cmd = app.add_subcommand("epsilon", "Estimate violation from pre-divergence weeks");
  add_selection(eps_cmd, eps_opt.selection);
  eps_cmd->add_option("--t-app", eps_opt.t_app, "Divergence week; weeks 0..t_app-1 are used")
      ->required();
  eps_cmd->add_option("--method", eps_opt.method, "estimate | pchip | both")
      ->check(CLI::IsMember({"estimate", "pchip", "both"}));
  eps_cmd->add_option("--grid-points", eps_opt.grid_points, "Value grid size for pchip")
      ->check(CLI::Range(std::size_t{101}, std::size_t{100000000}));
  eps_cmd->add_flag("--literal", eps_opt.literal, "Use the verbatim pseudocode index rules");
  eps_cmd->add_option("--out", eps_out, "Write the JSON report here instead of stdout");

  cli::BoundOptions bound_opt;
  bound_opt.seed = cli::default_seed();
  std::string bound_out;
  auto* bound_cmd = app.add_subcommand("bound", "Per-week alpha-intervals for X - Y");
  add_selection(bound_cmd, bound_opt.selection);
  bound_cmd->add_option("--alpha", bound_opt.alpha, "Confidence level in (0, 1)");
  bound_cmd->add_option("--eps-l", bound_opt.eps_l, "Lower violation")->check(CLI::Range(0.0, 1.0));
  bound_cmd->add_option("--eps-u", bound_opt.eps_u, "Upper violation")->check(CLI::Range(0.0, 1.0));
  bound_cmd->add_option("--method", bound_opt.method, "grid | interp")
      ->check(CLI::IsMember({"grid", "interp"}));
  bound_cmd->add_option("--split", bound_opt.split, "symmetric | shortest")
      ->check(CLI::IsMember({"symmetric", "shortest"}));
  bound_cmd->add_option("--n-samples", bound_opt.n_samples, "Monte Carlo draws")
      ->check(CLI::PositiveNumber);
  bound_cmd->add_option("--seed", bound_opt.seed, "PRNG seed (default $SCENBOUND_SEED or 0)");
  bound_cmd->add_option("--out", bound_out, "Output prefix; writes <out>.jsonl and <out>.csv")
      ->required();

  validation::Options val_opt;
  auto* val_cmd = app.add_subcommand("validate", "Run the synthetic property suites");
  val_cmd->add_option("--seed", val_opt.seed, "Suite seed");
  val_cmd->add_option("--trials", val_opt.trials, "Universes per suite")
      ->check(CLI::PositiveNumber);
  val_cmd->add_option("--universe-n", val_opt.universe_n, "Outcomes per universe")
      ->check(CLI::Range(std::size_t{100}, std::size_t{10000000}));
  val_cmd->add_option("--n-samples", val_opt.n_samples, "Monte Carlo draws per interval")
      ->check(CLI::PositiveNumber);
  val_cmd->add_flag("--understate-eps", val_opt.understate_epsilon,
                    "Negative control: under-report violation to the coverage suite");

  std::string sim_spec;
  std::string sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Write a synthetic hub-format fixture");
  sim_cmd->add_option("--spec", sim_spec, "Simulation spec (JSON)")->required();
  sim_cmd->add_option("--out", sim_out, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eps_cmd) {
      const auto report = cli::cmd_epsilon(eps_opt).dump(2) + "\n";
      if (eps_out.empty()) std::cout << report;
      else cli::write_file(eps_out, report);
    } else if (*bound_cmd) {
      const auto out = cli::cmd_bound(bound_opt);
      cli::write_file(bound_out + ".jsonl", out.jsonl);
      cli::write_file(bound_out + ".csv", out.csv);
      if (!out.certificates_ok) {
        std::cerr << "certificate below alpha for at least one week\n";
        return cli::kValidationFailure;
      }
    } else if (*val_cmd) {
      const auto report = cli::cmd_validate(val_opt);
      std::cout << report.text();
      return report.passed ? cli::kOk : cli::kValidationFailure;
    } else if (*sim_cmd) {
      const auto text = cli::read_file(sim_spec);
      const auto spec = cli::simulation_spec_from_json(nlohmann::json::parse(text));
      cli::write_file(sim_out, cli::cmd_simulate(spec, text));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kInputError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad JSON: " << e.what() << '\n';
    return cli::kInputError;
  }
  return cli::kOk;
}
