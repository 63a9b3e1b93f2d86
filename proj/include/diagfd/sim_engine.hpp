#pragma once

// Deterministic round-based execution of a detector over a declarative scenario.
//
// A round applies the crashes scheduled for it, computes every correct process's
// plan from its view at the start of the round, orders the testers according to
// the scenario's policy and runs each tester's plan to completion before the next
// tester starts. Diagnostic information moves test by test, so a tester scheduled
// late in a round sees what earlier testers learned in the same round.

#include "diagfd/core_model.hpp"
#include "diagfd/detectors.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace diagfd
{
    enum class Ordering
    {
        Fixed,
        SeededRandom,
        BestCase,
        WorstCase,
    };

    std::string_view to_string(Ordering o) noexcept;
    std::optional<Ordering> parse_ordering(std::string_view text);

    struct CrashEvent
    {
        int round = 1;
        ProcessId pid{};

        friend auto operator<=>(const CrashEvent &, const CrashEvent &) = default;
    };

    struct FalseSuspicion
    {
        int round = 1;
        ProcessId tester{};
        ProcessId tested{};

        friend auto operator<=>(const FalseSuspicion &, const FalseSuspicion &) = default;
    };

    struct RandomSuspicions
    {
        double probability = 0.0;
        std::uint64_t seed = 0;

        friend bool operator==(const RandomSuspicions &, const RandomSuspicions &) = default;
    };

    struct Scenario
    {
        std::size_t n = 2;
        DetectorKind detector = DetectorKind::BruteForce;
        std::vector<CrashEvent> crashes;
        std::vector<FalseSuspicion> false_suspicions;
        std::optional<RandomSuspicions> random_suspicions;
        Ordering ordering = Ordering::Fixed;
        std::uint64_t seed = 0;
        int max_rounds = 16;

        bool has_injections() const noexcept;

        friend bool operator==(const Scenario &, const Scenario &) = default;
    };

    /// Throws InvalidScenario describing the first violated rule.
    void validate_scenario(const Scenario &s);

    /// mt19937_64 with hand-rolled bounded draws so sequences do not depend on the
    /// standard library's distribution implementations.
    class DeterministicRng
    {
    public:
        explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

        std::uint64_t below(std::uint64_t bound);
        double unit();

        template <typename T>
        void shuffle(std::vector<T> &items)
        {
            for (std::size_t i = items.size(); i > 1; --i)
            {
                std::swap(items[i - 1], items[below(i)]);
            }
        }

        friend bool operator==(const DeterministicRng &, const DeterministicRng &) = default;

    private:
        std::mt19937_64 engine_;
    };

    /// Order in which testers run their plans this round.
    ///   Fixed: ascending pid.
    ///   SeededRandom: uniform permutation drawn from rng.
    ///   BestCase: testers of `recent_event` first, then increasing distance from it in the
    ///             reversed assignment; unreachable testers last. Ties by pid.
    ///   WorstCase: BestCase reversed.
    /// Without a recent event BestCase and WorstCase fall back to Fixed.
    std::vector<ProcessId> ordering_policies(Ordering policy, const TestingAssignment &assignment,
                                             std::span<const ProcessId> testers,
                                             std::optional<ProcessId> recent_event, DeterministicRng &rng);

    struct RoundTrace
    {
        int round = 0;
        std::vector<ProcessId> schedule;
        std::vector<TestOutcome> executed_tests;
        std::size_t items_transferred = 0;
        /// Assignment expected from the views at the start of the round.
        TestingAssignment assignment;
        std::vector<GroundState> ground;
        std::vector<TimestampTable> tables;
        std::size_t events_pending = 0;
        std::size_t events_detected = 0;

        std::size_t tests_executed() const noexcept { return executed_tests.size(); }
    };

    struct EventRecord
    {
        ProcessId pid{};
        int crash_round = 0;
        std::optional<int> detected_round;
        /// Another event was applied while this one was still being diagnosed.
        bool overlapped = false;
        /// Assignment in force when the event happened.
        TestingAssignment assignment_at_event;
        /// Processes correct just before the crash.
        std::vector<GroundState> ground_before;

        std::optional<int> latency() const
        {
            if (!detected_round)
                return std::nullopt;
            return *detected_round - crash_round + 1;
        }
    };

    struct SimulationReport
    {
        Scenario scenario;
        std::vector<RoundTrace> traces;
        std::vector<EventRecord> events;
        bool quiescent = false;
        /// Views at the end of the run; crashed processes keep the view they had when they crashed.
        std::vector<TimestampTable> final_tables;
        std::vector<GroundState> final_ground;

        Classification final_classification(ProcessId holder, ProcessId subject) const;
        bool injections_present() const noexcept { return scenario.has_injections(); }
        std::size_t max_tests_per_round() const;
    };

    struct RunOptions
    {
        /// Stop as soon as nothing can change any more.
        bool stop_at_quiescence = true;
        /// Throw InvalidScenario if a crash lands while an earlier event is undiagnosed.
        bool require_single_event = false;
        /// Keep every RoundTrace. When off only the most recent round is retained.
        bool record_traces = true;
    };

    /// The mutable state of one run. Copyable, so callers can branch a run and explore
    /// alternative schedules from the same state.
    class Simulator
    {
    public:
        explicit Simulator(Scenario scenario, RunOptions options = {});

        const Scenario &scenario() const noexcept { return scenario_; }
        int round() const noexcept { return round_; }
        const std::vector<GroundState> &ground() const noexcept { return ground_; }
        const std::vector<TimestampTable> &tables() const noexcept { return tables_; }
        const std::vector<EventRecord> &events() const noexcept { return events_; }
        const std::vector<RoundTrace> &traces() const noexcept { return traces_; }
        const RoundTrace &last_trace() const noexcept { return last_trace_; }

        bool can_run() const noexcept { return round_ < scenario_.max_rounds; }
        bool quiescent() const noexcept { return quiescent_; }
        bool all_events_detected() const noexcept;

        /// Runs one test with the given exclusion set for incoming diagnostics. The tester's
        /// table and the tested process's sent-snapshot are updated in place.
        TestOutcome execute_test(ProcessId tester, ProcessId tested, const std::set<ProcessId> &exclude);

        /// Runs the next round using the scenario's ordering policy.
        const RoundTrace &run_round();

        /// Runs the next round with an explicit tester order. Every correct process must appear exactly once.
        const RoundTrace &run_round_with_schedule(std::span<const ProcessId> schedule);

        /// Applies the next round's crashes and returns the testers that will be scheduled,
        /// together with the assignment they are expected to follow. Idempotent per round.
        std::vector<ProcessId> prepare_round();
        const TestingAssignment &prepared_assignment() const noexcept { return prepared_assignment_; }

        SimulationReport report() const;

        /// Compact encoding of the ground states, views, sent-snapshots and detection status.
        /// Round numbers are left out, so two states with equal keys evolve identically only
        /// when no crash or injection is still scheduled.
        std::vector<std::int64_t> state_key() const;

    private:
        bool verdict_is_forced_suspect(ProcessId tester, ProcessId tested);
        void apply_crashes();
        void update_detection();
        bool future_inputs_pending() const;

        Scenario scenario_;
        RunOptions options_;
        int round_ = 0;
        bool prepared_ = false;
        bool quiescent_ = false;
        std::vector<GroundState> ground_;
        std::vector<TimestampTable> tables_;
        std::vector<std::vector<SentSnapshot>> last_sent_; // [tested][tester]
        std::set<std::tuple<int, ProcessId, ProcessId>> forced_;
        DeterministicRng order_rng_;
        DeterministicRng injection_rng_;
        std::optional<ProcessId> recent_event_;
        TestingAssignment prepared_assignment_;
        std::vector<EventRecord> events_;
        std::vector<RoundTrace> traces_;
        RoundTrace last_trace_;
    };

    SimulationReport run_scenario(const Scenario &scenario, RunOptions options = {});

    /// One line per test: "round=R tester=T tested=U verdict=V items=K".
    std::string render_trace(const SimulationReport &report);
}
