#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fvpnet/analysis.hpp"
#include "fvpnet/config.hpp"

namespace fvpnet {

/// Runs the checks named in `config.checks` (all of them when the list is
/// empty). Each check draws from its own substream of the scenario seed.
std::vector<CheckReport> run_checks(const ScenarioConfig& config);

/// Runs the scenario and collects the mixing matrix W(w*_t, x_t) at every
/// recorded step.
std::vector<std::pair<std::size_t, MixingMatrix>> collect_mixing(const Scenario& scenario);

/// ScenarioConfig for the built-in 20-robot scenario.
ScenarioConfig example1_config(Example1Variant variant, std::uint64_t seed, std::size_t horizon);

}  // namespace fvpnet
