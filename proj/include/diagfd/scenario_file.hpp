#pragma once

// Text scenario files:
//
//   [system]
//   n = 8
//   detector = vcube
//
//   [crashes]
//   2 = 4            # round = pid[,pid...]
//
//   [injections]
//   3 = 0,1          # round = tester,tested
//   1-20 = *,5       # round range, '*' matches every process
//   probability = 0.05
//   seed = 11
//
//   [run]
//   ordering = worst # fixed | random | best | worst
//   seed = 42
//   max_rounds = 30
//
// Syntax problems raise ParseError with the offending line; semantic problems
// (bad n, unknown pid, ...) raise InvalidScenario from validate_scenario.

#include "diagfd/sim_engine.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace diagfd
{
    Scenario parse_scenario(std::string_view text);
    Scenario load_scenario(const std::filesystem::path &path);

    /// Canonical text form; parse_scenario(render_scenario(s)) == s.
    std::string render_scenario(const Scenario &s);

    /// Per-round metrics followed by a blank line and the per-event latency block.
    std::string render_report_csv(const SimulationReport &report);
}
