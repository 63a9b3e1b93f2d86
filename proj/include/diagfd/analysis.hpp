#pragma once

#include "diagfd/detectors.hpp"
#include "diagfd/sim_engine.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace diagfd
{
    /// Diameter of a graph that is not strongly connected.
    inline constexpr int kUnreachable = std::numeric_limits<int>::max();

    /// Longest shortest directed path over all ordered pairs of the considered processes.
    int assignment_diameter(const TestingAssignment &a);
    /// Same, restricted to the processes that are Correct in `ground`.
    int assignment_diameter(const TestingAssignment &a, std::span<const GroundState> ground);

    /// True iff the subgraph induced by the correct processes is strongly connected (vacuous for <= 1).
    bool correct_strongly_connected(const TestingAssignment &a, std::span<const GroundState> ground);

    enum class Property
    {
        StrongCompleteness,
        WeakCompleteness,
        StrongAccuracy,
        LatencyBound,
        TestCountBound,
        ItemsBound,
    };

    std::string_view to_string(Property p) noexcept;

    struct Witness
    {
        int round = 0;
        ProcessId holder{};
        ProcessId subject{};
        std::string observed;
        std::string bound;
    };

    struct PropertyVerdict
    {
        Property property = Property::StrongCompleteness;
        bool holds = true;
        std::optional<Witness> witness;
        /// Free text for checks that were skipped or only partially applicable.
        std::string note;
    };

    /// Every crashed process is suspected by every correct process at the end of the run, and each
    /// event was diagnosed within 4x the diameter of the assignment in force when it happened.
    PropertyVerdict check_strong_completeness(const SimulationReport &report);

    PropertyVerdict check_weak_completeness(const SimulationReport &report);

    /// No correct process ends the run suspecting another correct process.
    PropertyVerdict check_strong_accuracy(const SimulationReport &report);

    /// Each isolated event's latency is at most the diameter of the assignment in force when it happened.
    /// Throws InapplicableRegime when false suspicions were injected.
    PropertyVerdict check_latency(const SimulationReport &report);

    /// Per-detector test count, latency, and items-per-test ceilings.
    /// Throws InapplicableRegime when false suspicions were injected.
    std::vector<PropertyVerdict> check_bounds(const SimulationReport &report, DetectorKind kind);

    /// Every checker that applies to the report's regime.
    std::vector<PropertyVerdict> check_all(const SimulationReport &report);

    std::string render_verdicts_text(std::span<const PropertyVerdict> verdicts);
    /// Columns: property,holds,witness.
    std::string render_verdicts_csv(std::span<const PropertyVerdict> verdicts);
}
