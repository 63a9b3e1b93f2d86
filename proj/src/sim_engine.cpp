#include "diagfd/sim_engine.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <limits>
#include <sstream>

namespace diagfd
{
    std::string_view to_string(Ordering o) noexcept
    {
        switch (o)
        {
        case Ordering::Fixed:
            return "fixed";
        case Ordering::SeededRandom:
            return "random";
        case Ordering::BestCase:
            return "best";
        case Ordering::WorstCase:
            return "worst";
        }
        return "?";
    }

    std::optional<Ordering> parse_ordering(std::string_view text)
    {
        std::string lowered;
        for (char c : text)
        {
            if (c != '-' && c != '_')
                lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
        if (lowered == "fixed")
            return Ordering::Fixed;
        if (lowered == "random" || lowered == "seededrandom")
            return Ordering::SeededRandom;
        if (lowered == "best" || lowered == "bestcase")
            return Ordering::BestCase;
        if (lowered == "worst" || lowered == "worstcase")
            return Ordering::WorstCase;
        return std::nullopt;
    }

    bool Scenario::has_injections() const noexcept
    {
        return !false_suspicions.empty() || (random_suspicions && random_suspicions->probability > 0.0);
    }

    void validate_scenario(const Scenario &s)
    {
        validate_system(s.detector, s.n);
        if (s.max_rounds < 1)
        {
            throw InvalidScenario("max_rounds must be at least 1");
        }
        std::set<ProcessId> crashed;
        for (const auto &c : s.crashes)
        {
            if (c.round < 1)
                throw InvalidScenario("crash rounds start at 1");
            if (index_of(c.pid) >= s.n)
                throw InvalidScenario("crash of nonexistent process " + std::to_string(index_of(c.pid)));
            if (!crashed.insert(c.pid).second)
                throw InvalidScenario("process " + std::to_string(index_of(c.pid)) + " crashes twice");
        }
        for (const auto &f : s.false_suspicions)
        {
            if (f.round < 1)
                throw InvalidScenario("injection rounds start at 1");
            if (index_of(f.tester) >= s.n || index_of(f.tested) >= s.n)
                throw InvalidScenario("injection names a nonexistent process");
            if (f.tester == f.tested)
                throw InvalidScenario("injection on a self test");
        }
        if (s.random_suspicions)
        {
            const double p = s.random_suspicions->probability;
            if (!(p >= 0.0 && p < 1.0))
                throw InvalidScenario("suspicion probability must lie in [0, 1)");
            if (!s.false_suspicions.empty())
                throw InvalidScenario("use either explicit injections or a probability, not both");
        }
    }

    std::uint64_t DeterministicRng::below(std::uint64_t bound)
    {
        if (bound <= 1)
            return 0;
        // Rejection sampling keeps the draw unbiased.
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do
        {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    double DeterministicRng::unit()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::vector<ProcessId> ordering_policies(Ordering policy, const TestingAssignment &assignment,
                                             std::span<const ProcessId> testers,
                                             std::optional<ProcessId> recent_event, DeterministicRng &rng)
    {
        std::vector<ProcessId> order(testers.begin(), testers.end());
        std::sort(order.begin(), order.end());
        if (policy == Ordering::Fixed)
        {
            return order;
        }
        if (policy == Ordering::SeededRandom)
        {
            rng.shuffle(order);
            return order;
        }
        if (!recent_event)
        {
            return order;
        }

        const std::size_t n = assignment.n;
        std::vector<std::vector<ProcessId>> testers_of(n);
        for (const auto &[tester, tested] : assignment.arcs)
        {
            testers_of[index_of(tested)].push_back(tester);
        }
        constexpr std::size_t unreached = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> dist(n, unreached);
        std::deque<ProcessId> queue{*recent_event};
        dist[index_of(*recent_event)] = 0;
        while (!queue.empty())
        {
            const ProcessId u = queue.front();
            queue.pop_front();
            for (ProcessId t : testers_of[index_of(u)])
            {
                if (dist[index_of(t)] == unreached)
                {
                    dist[index_of(t)] = dist[index_of(u)] + 1;
                    queue.push_back(t);
                }
            }
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](ProcessId a, ProcessId b) { return dist[index_of(a)] < dist[index_of(b)]; });
        if (policy == Ordering::WorstCase)
        {
            std::reverse(order.begin(), order.end());
        }
        return order;
    }

    Classification SimulationReport::final_classification(ProcessId holder, ProcessId subject) const
    {
        return final_tables.at(index_of(holder)).classify(subject);
    }

    std::size_t SimulationReport::max_tests_per_round() const
    {
        std::size_t best = 0;
        for (const auto &t : traces)
            best = std::max(best, t.tests_executed());
        return best;
    }

    Simulator::Simulator(Scenario scenario, RunOptions options)
        : scenario_(std::move(scenario)), options_(options), order_rng_(scenario_.seed),
          injection_rng_(scenario_.random_suspicions ? scenario_.random_suspicions->seed : 0)
    {
        validate_scenario(scenario_);
        const std::size_t n = scenario_.n;
        ground_.assign(n, GroundState::Correct);
        tables_.reserve(n);
        last_sent_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            tables_.emplace_back(pid(i), n);
            for (std::size_t t = 0; t < n; ++t)
            {
                last_sent_[i].emplace_back(pid(t), n);
            }
        }
        for (const auto &f : scenario_.false_suspicions)
        {
            forced_.insert({f.round, f.tester, f.tested});
        }
    }

    bool Simulator::all_events_detected() const noexcept
    {
        return std::all_of(events_.begin(), events_.end(), [](const EventRecord &e) { return e.detected_round.has_value(); });
    }

    bool Simulator::verdict_is_forced_suspect(ProcessId tester, ProcessId tested)
    {
        const int current = round_ + 1;
        if (forced_.contains({current, tester, tested}))
        {
            return true;
        }
        if (scenario_.random_suspicions && scenario_.random_suspicions->probability > 0.0)
        {
            return injection_rng_.unit() < scenario_.random_suspicions->probability;
        }
        return false;
    }

    TestOutcome Simulator::execute_test(ProcessId tester, ProcessId tested, const std::set<ProcessId> &exclude)
    {
        if (ground_.at(index_of(tester)) == GroundState::Failed)
        {
            throw SchedulerBug("crashed process " + std::to_string(index_of(tester)) + " scheduled as tester");
        }
        TestOutcome outcome{tester, tested, Verdict::Suspect, {}};
        if (ground_.at(index_of(tested)) == GroundState::Correct && !verdict_is_forced_suspect(tester, tested))
        {
            outcome.verdict = Verdict::Correct;
        }

        auto &table = tables_[index_of(tester)];
        table = record_test_outcome(std::move(table), tested, outcome.verdict);

        if (outcome.verdict == Verdict::Correct && gathers_diagnostics(scenario_.detector))
        {
            auto &snapshot = last_sent_[index_of(tested)][index_of(tester)];
            auto delta = diagnostic_delta(tables_[index_of(tested)], snapshot, exclude);
            snapshot = std::move(delta.snapshot);
            outcome.items = std::move(delta.items);
            table = merge_diagnostic(std::move(table), outcome.items, exclude);
        }
        return outcome;
    }

    void Simulator::apply_crashes()
    {
        const int current = round_ + 1;
        std::vector<ProcessId> now;
        for (const auto &c : scenario_.crashes)
        {
            if (c.round == current)
                now.push_back(c.pid);
        }
        if (now.empty())
            return;
        std::sort(now.begin(), now.end());

        const bool pending = !all_events_detected();
        if (options_.require_single_event && (pending || now.size() > 1))
        {
            throw InvalidScenario("crash in round " + std::to_string(current) +
                                  " overlaps an event that is still being diagnosed");
        }
        if (pending || now.size() > 1)
        {
            for (auto &e : events_)
            {
                if (!e.detected_round)
                    e.overlapped = true;
            }
        }
        const auto assignment = recompute_assignment(scenario_.detector, scenario_.n, tables_, ground_);
        const auto before = ground_;
        for (ProcessId p : now)
        {
            ground_[index_of(p)] = GroundState::Failed;
            events_.push_back({p, current, std::nullopt, pending || now.size() > 1, assignment, before});
            recent_event_ = p;
        }
    }

    std::vector<ProcessId> Simulator::prepare_round()
    {
        if (!prepared_)
        {
            apply_crashes();
            prepared_assignment_ = recompute_assignment(scenario_.detector, scenario_.n, tables_, ground_);
            prepared_ = true;
        }
        std::vector<ProcessId> testers;
        for (std::size_t i = 0; i < scenario_.n; ++i)
        {
            if (ground_[i] == GroundState::Correct)
                testers.push_back(pid(i));
        }
        return testers;
    }

    const RoundTrace &Simulator::run_round()
    {
        const auto testers = prepare_round();
        const auto schedule =
            ordering_policies(scenario_.ordering, prepared_assignment_, testers, recent_event_, order_rng_);
        return run_round_with_schedule(schedule);
    }

    const RoundTrace &Simulator::run_round_with_schedule(std::span<const ProcessId> schedule)
    {
        if (!can_run())
        {
            throw SchedulerBug("round limit " + std::to_string(scenario_.max_rounds) + " reached");
        }
        const auto testers = prepare_round();
        {
            std::vector<ProcessId> sorted(schedule.begin(), schedule.end());
            std::sort(sorted.begin(), sorted.end());
            if (sorted != testers)
            {
                throw SchedulerBug("schedule is not a permutation of the correct processes");
            }
        }

        const int current = round_ + 1;
        const auto before = tables_;
        RoundTrace trace;
        trace.round = current;
        trace.schedule.assign(schedule.begin(), schedule.end());
        trace.assignment = prepared_assignment_;

        for (ProcessId tester : schedule)
        {
            const TestPlan plan = plan_for(scenario_.detector, tester, scenario_.n, tables_[index_of(tester)]);
            std::set<ProcessId> exclude{tester};
            if (!plan.adaptive)
            {
                exclude.insert(plan.targets.begin(), plan.targets.end());
            }
            for (ProcessId target : plan.targets)
            {
                exclude.insert(target);
                auto outcome = execute_test(tester, target, exclude);
                const bool stop = plan.adaptive && outcome.verdict == Verdict::Correct;
                trace.items_transferred += outcome.items.size();
                trace.executed_tests.push_back(std::move(outcome));
                if (stop)
                    break;
            }
        }

        round_ = current;
        prepared_ = false;
        update_detection();

        trace.ground = ground_;
        trace.tables = tables_;
        trace.events_detected = static_cast<std::size_t>(
            std::count_if(events_.begin(), events_.end(), [](const EventRecord &e) { return e.detected_round.has_value(); }));
        trace.events_pending = events_.size() - trace.events_detected;

        quiescent_ = tables_ == before && trace.items_transferred == 0 && all_events_detected() &&
                     !future_inputs_pending();

        if (options_.record_traces)
        {
            traces_.push_back(trace);
        }
        last_trace_ = std::move(trace);
        return last_trace_;
    }

    void Simulator::update_detection()
    {
        for (auto &e : events_)
        {
            if (e.detected_round)
                continue;
            bool everyone = true;
            for (std::size_t k = 0; k < scenario_.n && everyone; ++k)
            {
                if (ground_[k] == GroundState::Correct && tables_[k].classify(e.pid) != Classification::Suspect)
                    everyone = false;
            }
            if (everyone)
                e.detected_round = round_;
        }
    }

    bool Simulator::future_inputs_pending() const
    {
        for (const auto &c : scenario_.crashes)
        {
            if (c.round > round_)
                return true;
        }
        for (const auto &f : scenario_.false_suspicions)
        {
            if (f.round > round_)
                return true;
        }
        return scenario_.random_suspicions && scenario_.random_suspicions->probability > 0.0;
    }

    SimulationReport Simulator::report() const
    {
        SimulationReport r;
        r.scenario = scenario_;
        r.traces = traces_;
        r.events = events_;
        r.quiescent = quiescent_;
        r.final_tables = tables_;
        r.final_ground = ground_;
        return r;
    }

    std::vector<std::int64_t> Simulator::state_key() const
    {
        std::vector<std::int64_t> key;
        const std::size_t n = scenario_.n;
        key.reserve(n + 2 * n * n + events_.size());
        for (auto g : ground_)
            key.push_back(g == GroundState::Failed ? 1 : 0);
        for (const auto &t : tables_)
            for (auto ts : t.entries())
                key.push_back(ts.value);
        for (const auto &row : last_sent_)
            for (const auto &snap : row)
                for (auto ts : snap.entries)
                    key.push_back(ts.value);
        for (const auto &e : events_)
            key.push_back(e.detected_round ? 1 : 0);
        return key;
    }

    SimulationReport run_scenario(const Scenario &scenario, RunOptions options)
    {
        Simulator sim(scenario, options);
        while (sim.can_run())
        {
            sim.run_round();
            if (options.stop_at_quiescence && sim.quiescent())
                break;
        }
        return sim.report();
    }

    std::string render_trace(const SimulationReport &report)
    {
        std::ostringstream out;
        for (const auto &t : report.traces)
        {
            for (const auto &test : t.executed_tests)
            {
                out << "round=" << t.round << " tester=" << index_of(test.tester) << " tested=" << index_of(test.tested)
                    << " verdict=" << to_string(test.verdict) << " items=" << test.items.size() << '\n';
            }
        }
        return out.str();
    }
}
