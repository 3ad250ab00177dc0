// sviab: scenario-driven jump-diffusion simulation and submanifold viability
// verification. See README.md for the scenario format and output files.

#include <CLI11.hpp>

#include "viab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"stochastic viability toolkit"};
  app.require_subcommand(1);

  viab::CommandOptions opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", opt.scenario_path, "scenario file")->required();
    sub->add_option("--out", opt.out_dir, "output directory (default .)");
    sub->add_option("--seed", opt.seed, "override the scenario seed");
    sub->add_option("--threads", opt.threads, "worker threads (default 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tolerance-profile", opt.tolerance_profile,
                    "residual tolerance profile: analytic | fd")
        ->check(CLI::IsMember({"analytic", "fd"}));
  };

  CLI::App* check = app.add_subcommand("check", "evaluate the viability conditions on K");
  add_common(check);
  CLI::App* sim = app.add_subcommand("simulate", "run a path ensemble and emit statistics");
  add_common(sim);
  CLI::App* super =
      app.add_subcommand("supersolution", "verify the tube inequality on a radius ladder");
  add_common(super);
  CLI::App* conv = app.add_subcommand("convergence", "estimate the strong convergence order");
  add_common(conv);
  conv->add_option("--ladder", opt.ladder, "step ladder, e.g. 2^-6..2^-12 or 0.01,0.005");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (check->parsed()) return viab::cmd_check(opt);
  if (sim->parsed()) return viab::cmd_simulate(opt);
  if (super->parsed()) return viab::cmd_supersolution(opt);
  if (conv->parsed()) return viab::cmd_convergence(opt);
  return 2;
}
