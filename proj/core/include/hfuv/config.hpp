#pragma once

#include <string>
#include <string_view>

#include "hfuv/harness.hpp"

namespace hfuv {

// Run configuration document (JSON):
//
// {
//   "command": "verify-lln",            // subcommand the file is meant for
//   "seed": 1,
//   "model": {
//     "drift": 0,
//     "volatility": {"kind": "constant" | "ito", "sigma0": 1, "tilde_b": 0, "tilde_sigma": 0,
//                    "tilde_v": 0, "floor_eps": 1e-4, "clamp_budget": 64},
//     "jumps": {"intensity": 0, "max_abs": 1, "fixed_count": null,
//               "size": {"kind": "atoms", "atoms": [[value, prob], ...]}
//                     | {"kind": "uniform", "a": .., "b": ..}
//                     | {"kind": "truncnormal", "mu": .., "s": .., "min_abs": ..}},
//     "bound_A": 10, "enforce_bound": false
//   },
//   "kernel": "H regime=JumpCLT d=1 l=1 p=4 q= L=(one)",  // optional
//   "experiment": {"kind": "LLN", "n_list": [...], "reps": 100, "t": 1, "T": 1,
//                  "beta_grid": [...], "truncation_m": [...], "aug_seeds": 500, "two_sample": true},
//   "io": {"input": "", "output_dir": "out", "samples": false}
// }
//
// Every key is optional except where noted; unknown keys are rejected.
struct IoConfig {
  std::string input;
  std::string output_dir = "out";
  bool samples = false;
};

struct RunConfig {
  std::string command;
  ExperimentPlan plan;
  IoConfig io;

  /// Canonical form: every key present, fixed order, two-space indentation.
  std::string to_text() const;
};

/// Parses and validates. A non-empty `command` replaces the document's
/// "command"; an absent experiment.kind follows from the command.
/// Throws ConfigError citing the offending key.
RunConfig parse_config(std::string_view text, std::string_view command = {});

/// Experiment kinds a subcommand accepts; empty for commands that run none.
std::vector<ExperimentKind> kinds_for_command(std::string_view command);

}  // namespace hfuv
