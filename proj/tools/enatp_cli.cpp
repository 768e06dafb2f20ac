// Command-line front end: named experiments, decay sweeps, theorem
// verification suites, and worked-example reports, all emitting
// machine-readable CSV or plain pass/fail lines.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "enatp/enatp.hpp"

int main(int argc, char** argv) {
  CLI::App app{"two-qubit weak-measurement simulator"};
  app.require_subcommand(1);

  // run
  std::string run_config, run_out;
  CLI::App* run = app.add_subcommand("run", "execute an experiment config, write CSV results");
  run->add_option("--config", run_config, "experiment config file (key = value lines)")
      ->required();
  run->add_option("--out", run_out, "output CSV path")->required();

  // sweep
  enatp::SweepSpec spec;
  std::string sweep_out;
  CLI::App* sweep =
      app.add_subcommand("sweep", "decay surface over an (eps, rounds) grid, write CSV");
  sweep->add_option("--eps-min", spec.eps_min, "smallest measurement strength")
      ->capture_default_str();
  sweep->add_option("--eps-max", spec.eps_max, "largest measurement strength")
      ->capture_default_str();
  sweep->add_option("--eps-steps", spec.eps_steps, "number of grid points in eps")
      ->capture_default_str();
  sweep->add_option("--rounds-max", spec.rounds_max, "largest round count")
      ->capture_default_str();
  sweep->add_option("--state", spec.state, "initial state preset")->capture_default_str();
  sweep->add_option("--out", sweep_out, "output CSV path")->required();

  // verify
  std::string suite = "all";
  std::uint64_t seed = 7;
  int trials = 200;
  CLI::App* verify = app.add_subcommand("verify", "run the property suites, print pass/fail");
  verify->add_option("--suite", suite, "all|theorem1|theorem2|lemma2|corollary3|examples")
      ->capture_default_str();
  verify->add_option("--seed", seed, "random seed")->capture_default_str();
  verify->add_option("--trials", trials, "trials per property")->capture_default_str();

  // examples
  std::string which;
  CLI::App* examples = app.add_subcommand("examples", "rebuild one of the worked examples");
  examples->add_option("--which", which, "1|2|3|appendix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*run) return enatp::cmd_run(run_config, run_out);
  if (*sweep) return enatp::cmd_sweep(spec, sweep_out);
  if (*verify) return enatp::cmd_verify(suite, seed, trials);
  if (*examples) return enatp::cmd_examples(which);
  return 1;
}
