#pragma once

// Process identities, ground truth, and the timestamped diagnostic state
// every detector keeps about every other process.

#include "diagfd/errors.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string_view>
#include <vector>

namespace diagfd
{
    enum class ProcessId : std::uint32_t
    {
    };

    constexpr ProcessId pid(std::size_t index) noexcept { return static_cast<ProcessId>(index); }
    constexpr std::size_t index_of(ProcessId p) noexcept { return static_cast<std::size_t>(p); }

    enum class GroundState
    {
        Correct,
        Failed,
    };

    enum class Classification
    {
        Unknown,
        Correct,
        Suspect,
    };

    enum class Verdict
    {
        Correct,
        Suspect,
    };

    std::string_view to_string(Classification c) noexcept;
    std::string_view to_string(Verdict v) noexcept;

    /// Diagnostic timestamp. -1 is unknown, even values mean correct, odd values mean suspect.
    struct Timestamp
    {
        std::int64_t value = -1;

        static constexpr Timestamp unknown() noexcept { return Timestamp{-1}; }
        constexpr bool is_unknown() const noexcept { return value == -1; }

        friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
    };

    /// Throws InvalidTimestamp for values below -1.
    Classification classification_of(Timestamp ts);

    struct DiagnosticItem
    {
        ProcessId subject{};
        Timestamp ts{};

        friend bool operator==(const DiagnosticItem &, const DiagnosticItem &) = default;
    };

    struct TestOutcome
    {
        ProcessId tester{};
        ProcessId tested{};
        Verdict verdict = Verdict::Suspect;
        std::vector<DiagnosticItem> items;

        friend bool operator==(const TestOutcome &, const TestOutcome &) = default;
    };

    /// One process's view of the whole system. The owner's own entry is pinned at 0.
    class TimestampTable
    {
    public:
        TimestampTable(ProcessId owner, std::size_t n);

        ProcessId owner() const noexcept { return owner_; }
        std::size_t size() const noexcept { return entries_.size(); }

        Timestamp at(ProcessId subject) const { return entries_.at(index_of(subject)); }
        Classification classify(ProcessId subject) const { return classification_of(at(subject)); }
        std::span<const Timestamp> entries() const noexcept { return entries_; }

        /// Raw write used by fixtures and tests; refuses anything that would break the owner invariant.
        void set(ProcessId subject, Timestamp ts);

        friend bool operator==(const TimestampTable &, const TimestampTable &) = default;

    private:
        ProcessId owner_;
        std::vector<Timestamp> entries_;
    };

    /// Applies a direct test result to the tester's table.
    TimestampTable record_test_outcome(TimestampTable table, ProcessId tested, Verdict verdict);

    /// Greater timestamp wins for every item whose subject is not excluded.
    /// Throws ProtocolViolation when an item carries the unknown timestamp.
    TimestampTable merge_diagnostic(TimestampTable table, std::span<const DiagnosticItem> items,
                                    const std::set<ProcessId> &exclude);

    /// What a tested process remembers having sent to one particular tester.
    struct SentSnapshot
    {
        ProcessId tester{};
        std::vector<Timestamp> entries;

        SentSnapshot(ProcessId tester, std::size_t n)
            : tester(tester), entries(n, Timestamp::unknown())
        {
        }

        friend bool operator==(const SentSnapshot &, const SentSnapshot &) = default;
    };

    struct DeltaResult
    {
        std::vector<DiagnosticItem> items;
        SentSnapshot snapshot;
    };

    /// Items the tested process has learned since it last answered this tester.
    /// Never includes unknown entries, the tester itself, the tested process itself, or any
    /// subject the tester asked to leave out; those are not marked as sent.
    DeltaResult diagnostic_delta(const TimestampTable &state_of_tested, const SentSnapshot &last_sent,
                                 const std::set<ProcessId> &exclude = {});
}
