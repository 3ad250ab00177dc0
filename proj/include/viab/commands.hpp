#ifndef VIAB_COMMANDS_HPP
#define VIAB_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>

// Command layer behind the CLI binary. Each command loads a scenario, runs
// one pipeline, writes CSV reports under out_dir, prints a one-line summary,
// and returns the process exit code: 0 PASS, 1 principled FAIL, 2 error.

namespace viab {

struct CommandOptions {
  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  int threads = 1;
  std::string tolerance_profile = "analytic";  // analytic | fd
  std::string ladder = "2^-6..2^-12";          // cmd_convergence only
};

int cmd_check(const CommandOptions& opt);
int cmd_simulate(const CommandOptions& opt);
int cmd_supersolution(const CommandOptions& opt);
int cmd_convergence(const CommandOptions& opt);

}  // namespace viab

#endif  // VIAB_COMMANDS_HPP
