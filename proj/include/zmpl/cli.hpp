#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "zmpl/simulation.hpp"

namespace zmpl::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDataError = 2, kNumericalFailure = 3 };

/// Runs one command line (without the program name) and returns its exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Cartesian product n x theta x pi, in that nesting order. Every scenario
/// shares `seed`; streams are separated by the scenario id.
std::vector<McScenario> expand_scenario_grid(const std::vector<Count>& ns,
                                             const std::vector<double>& thetas,
                                             const std::vector<double>& pis, int mc_reps,
                                             int boot_reps, std::uint64_t seed);

}  // namespace zmpl::cli
