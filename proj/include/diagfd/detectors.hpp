#pragma once

// Brute-Force, vRing and vCube: which processes a tester probes each round,
// derived only from the tester's identity, n, and its local view.

#include "diagfd/core_model.hpp"

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace diagfd
{
    enum class DetectorKind
    {
        BruteForce,
        VRing,
        VCube,
    };

    std::string_view to_string(DetectorKind kind) noexcept;
    /// Accepts "bruteforce"/"brute-force"/"brute_force", "vring", "vcube" (case-insensitive).
    std::optional<DetectorKind> parse_detector_kind(std::string_view text);

    /// Brute-Force reads no diagnostic information from tested processes.
    constexpr bool gathers_diagnostics(DetectorKind kind) noexcept { return kind != DetectorKind::BruteForce; }

    constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }
    /// log2 of a power of two.
    unsigned log2_exact(std::size_t n);

    /// Throws InvalidScenario when (kind, n) is not a usable system.
    void validate_system(DetectorKind kind, std::size_t n);

    struct TestPlan
    {
        ProcessId tester{};
        std::vector<ProcessId> targets;
        /// Adaptive plans stop at the first target tested correct.
        bool adaptive = false;

        friend bool operator==(const TestPlan &, const TestPlan &) = default;
    };

    using Arc = std::pair<ProcessId, ProcessId>; // (tester, tested)

    struct TestingAssignment
    {
        std::size_t n = 0;
        std::set<Arc> arcs;

        bool contains(ProcessId tester, ProcessId tested) const { return arcs.contains({tester, tested}); }
        std::vector<ProcessId> testers_of(ProcessId tested) const;
        std::vector<ProcessId> tested_by(ProcessId tester) const;

        friend bool operator==(const TestingAssignment &, const TestingAssignment &) = default;
    };

    TestPlan brute_force_plan(ProcessId i, std::size_t n);

    /// The full probe order i+1, i+2, ... (mod n); execution stops at the first correct verdict.
    TestPlan vring_plan(ProcessId i, std::size_t n);

    /// c(i,s): the ordered cluster of i at level s, 1 <= s <= log2(n).
    std::vector<ProcessId> vcube_cluster(ProcessId i, unsigned s, std::size_t n);

    /// Every i for which j is the first process in some c(i,s) not suspected in j's view.
    /// Ordered by (s, i).
    TestPlan vcube_plan(ProcessId j, std::size_t n, const TimestampTable &view);

    TestPlan plan_for(DetectorKind kind, ProcessId i, std::size_t n, const TimestampTable &view);

    /// The arcs the plan is expected to execute if the view matches reality. For vRing this is
    /// the prefix of the ring walk up to and including the first target the view does not suspect.
    std::vector<ProcessId> expected_targets(const TestPlan &plan, const TimestampTable &view);

    /// Union of every correct process's expected arcs. An empty `ground` means every process is correct.
    TestingAssignment recompute_assignment(DetectorKind kind, std::size_t n, std::span<const TimestampTable> views,
                                           std::span<const GroundState> ground = {});

    /// Views that already reflect ground truth exactly (the converged state used by `topology`).
    std::vector<TimestampTable> converged_views(std::span<const GroundState> ground);

    /// "tester -> tested", one arc per line, ascending.
    std::string render_adjacency(const TestingAssignment &a);
}
