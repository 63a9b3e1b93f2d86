#include "diagfd/core_model.hpp"

#include <algorithm>
#include <string>

namespace diagfd
{
    std::string_view to_string(Classification c) noexcept
    {
        switch (c)
        {
        case Classification::Unknown:
            return "unknown";
        case Classification::Correct:
            return "correct";
        case Classification::Suspect:
            return "suspect";
        }
        return "?";
    }

    std::string_view to_string(Verdict v) noexcept
    {
        return v == Verdict::Correct ? "correct" : "suspect";
    }

    Classification classification_of(Timestamp ts)
    {
        if (ts.value < -1)
        {
            throw InvalidTimestamp("timestamp " + std::to_string(ts.value) + " is below -1");
        }
        if (ts.value == -1)
        {
            return Classification::Unknown;
        }
        return ts.value % 2 == 0 ? Classification::Correct : Classification::Suspect;
    }

    TimestampTable::TimestampTable(ProcessId owner, std::size_t n)
        : owner_(owner), entries_(n, Timestamp::unknown())
    {
        if (index_of(owner) >= n)
        {
            throw InvalidScenario("table owner " + std::to_string(index_of(owner)) + " outside [0, " +
                                  std::to_string(n) + ")");
        }
        entries_[index_of(owner)] = Timestamp{0};
    }

    void TimestampTable::set(ProcessId subject, Timestamp ts)
    {
        classification_of(ts);
        if (subject == owner_ && (ts.value < 0 || ts.value % 2 != 0))
        {
            throw InvalidTimestamp("a process never suspects itself");
        }
        entries_.at(index_of(subject)) = ts;
    }

    TimestampTable record_test_outcome(TimestampTable table, ProcessId tested, Verdict verdict)
    {
        if (tested == table.owner())
        {
            throw SelfTest("process " + std::to_string(index_of(tested)) + " cannot test itself");
        }
        const Timestamp current = table.at(tested);
        Timestamp next = current;
        if (current.is_unknown())
        {
            next = Timestamp{verdict == Verdict::Correct ? 0 : 1};
        }
        else
        {
            const bool even = current.value % 2 == 0;
            // Odd -> even on a correct verdict undoes a false suspicion at this tester.
            if ((verdict == Verdict::Suspect && even) || (verdict == Verdict::Correct && !even))
            {
                next = Timestamp{current.value + 1};
            }
        }
        table.set(tested, next);
        return table;
    }

    TimestampTable merge_diagnostic(TimestampTable table, std::span<const DiagnosticItem> items,
                                    const std::set<ProcessId> &exclude)
    {
        for (const auto &item : items)
        {
            if (item.ts.is_unknown())
            {
                throw ProtocolViolation("diagnostic item about " + std::to_string(index_of(item.subject)) +
                                        " carries the unknown timestamp");
            }
            if (item.subject == table.owner() || exclude.contains(item.subject))
            {
                continue;
            }
            if (item.ts > table.at(item.subject))
            {
                table.set(item.subject, item.ts);
            }
        }
        return table;
    }

    DeltaResult diagnostic_delta(const TimestampTable &state_of_tested, const SentSnapshot &last_sent,
                                 const std::set<ProcessId> &exclude)
    {
        DeltaResult result{{}, last_sent};
        const auto entries = state_of_tested.entries();
        const std::size_t n = std::min(entries.size(), last_sent.entries.size());
        for (std::size_t s = 0; s < n; ++s)
        {
            const ProcessId subject = pid(s);
            if (subject == last_sent.tester || subject == state_of_tested.owner() || exclude.contains(subject))
            {
                continue;
            }
            if (!entries[s].is_unknown() && entries[s] > last_sent.entries[s])
            {
                result.items.push_back({subject, entries[s]});
                result.snapshot.entries[s] = entries[s];
            }
        }
        return result;
    }
}
