#include "diagfd/analysis.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace diagfd
{
    namespace
    {
        std::vector<std::vector<std::size_t>> adjacency(const TestingAssignment &a, const std::vector<bool> &keep,
                                                        bool reversed)
        {
            std::vector<std::vector<std::size_t>> adj(a.n);
            for (const auto &[tester, tested] : a.arcs)
            {
                const std::size_t u = index_of(tester), v = index_of(tested);
                if (u >= a.n || v >= a.n || !keep[u] || !keep[v])
                    continue;
                if (reversed)
                    adj[v].push_back(u);
                else
                    adj[u].push_back(v);
            }
            return adj;
        }

        std::vector<int> bfs(const std::vector<std::vector<std::size_t>> &adj, std::size_t source)
        {
            std::vector<int> dist(adj.size(), -1);
            std::deque<std::size_t> queue{source};
            dist[source] = 0;
            while (!queue.empty())
            {
                const std::size_t u = queue.front();
                queue.pop_front();
                for (std::size_t v : adj[u])
                {
                    if (dist[v] < 0)
                    {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            return dist;
        }

        int diameter_over(const TestingAssignment &a, const std::vector<bool> &keep)
        {
            const auto adj = adjacency(a, keep, false);
            int diameter = 0;
            for (std::size_t s = 0; s < a.n; ++s)
            {
                if (!keep[s])
                    continue;
                const auto dist = bfs(adj, s);
                for (std::size_t t = 0; t < a.n; ++t)
                {
                    if (!keep[t])
                        continue;
                    if (dist[t] < 0)
                        return kUnreachable;
                    diameter = std::max(diameter, dist[t]);
                }
            }
            return diameter;
        }

        std::vector<bool> correct_mask(std::size_t n, std::span<const GroundState> ground)
        {
            std::vector<bool> keep(n, true);
            for (std::size_t i = 0; i < n && i < ground.size(); ++i)
                keep[i] = ground[i] == GroundState::Correct;
            return keep;
        }

        std::string timestamp_text(Timestamp ts)
        {
            return std::to_string(ts.value) + "(" + std::string(to_string(classification_of(ts))) + ")";
        }

        int last_round(const SimulationReport &report)
        {
            return report.traces.empty() ? 0 : report.traces.back().round;
        }

        void require_no_injections(const SimulationReport &report, std::string_view what)
        {
            if (report.injections_present())
            {
                throw InapplicableRegime(std::string(what) + " bounds assume no false suspicions");
            }
        }

        PropertyVerdict fail(Property p, Witness w)
        {
            return PropertyVerdict{p, false, std::move(w), {}};
        }
    }

    int assignment_diameter(const TestingAssignment &a)
    {
        return diameter_over(a, std::vector<bool>(a.n, true));
    }

    int assignment_diameter(const TestingAssignment &a, std::span<const GroundState> ground)
    {
        return diameter_over(a, correct_mask(a.n, ground));
    }

    bool correct_strongly_connected(const TestingAssignment &a, std::span<const GroundState> ground)
    {
        const auto keep = correct_mask(a.n, ground);
        const auto first = std::find(keep.begin(), keep.end(), true);
        if (first == keep.end() || std::count(keep.begin(), keep.end(), true) <= 1)
            return true;
        const std::size_t root = static_cast<std::size_t>(first - keep.begin());
        const auto forward = bfs(adjacency(a, keep, false), root);
        const auto backward = bfs(adjacency(a, keep, true), root);
        for (std::size_t i = 0; i < a.n; ++i)
        {
            if (keep[i] && (forward[i] < 0 || backward[i] < 0))
                return false;
        }
        return true;
    }

    std::string_view to_string(Property p) noexcept
    {
        switch (p)
        {
        case Property::StrongCompleteness:
            return "StrongCompleteness";
        case Property::WeakCompleteness:
            return "WeakCompleteness";
        case Property::StrongAccuracy:
            return "StrongAccuracy";
        case Property::LatencyBound:
            return "LatencyBound";
        case Property::TestCountBound:
            return "TestCountBound";
        case Property::ItemsBound:
            return "ItemsBound";
        }
        return "?";
    }

    PropertyVerdict check_strong_completeness(const SimulationReport &report)
    {
        const auto &ground = report.final_ground;
        const std::size_t n = ground.size();
        for (std::size_t h = 0; h < n; ++h)
        {
            if (ground[h] != GroundState::Correct)
                continue;
            for (std::size_t c = 0; c < n; ++c)
            {
                if (ground[c] != GroundState::Failed)
                    continue;
                const Timestamp ts = report.final_tables[h].at(pid(c));
                if (classification_of(ts) != Classification::Suspect)
                {
                    return fail(Property::StrongCompleteness,
                                {last_round(report), pid(h), pid(c), timestamp_text(ts), "odd timestamp"});
                }
            }
        }

        PropertyVerdict verdict{Property::StrongCompleteness, true, std::nullopt, {}};
        for (const auto &e : report.events)
        {
            const int diameter = assignment_diameter(e.assignment_at_event, e.ground_before);
            const auto latency = e.latency();
            if (!latency || diameter == kUnreachable)
            {
                verdict.note = "detection window not checked for some events (unreachable diameter)";
                continue;
            }
            if (*latency > 4 * diameter)
            {
                return fail(Property::StrongCompleteness,
                            {*e.detected_round, pid(0), e.pid, std::to_string(*latency) + " rounds",
                             "<= " + std::to_string(4 * diameter) + " rounds"});
            }
        }
        return verdict;
    }

    PropertyVerdict check_weak_completeness(const SimulationReport &report)
    {
        const auto &ground = report.final_ground;
        const std::size_t n = ground.size();
        const bool any_correct = std::find(ground.begin(), ground.end(), GroundState::Correct) != ground.end();
        if (!any_correct)
            return {Property::WeakCompleteness, true, std::nullopt, "no correct process left"};
        for (std::size_t c = 0; c < n; ++c)
        {
            if (ground[c] != GroundState::Failed)
                continue;
            bool suspected = false;
            for (std::size_t h = 0; h < n && !suspected; ++h)
            {
                suspected = ground[h] == GroundState::Correct &&
                            report.final_classification(pid(h), pid(c)) == Classification::Suspect;
            }
            if (!suspected)
            {
                return fail(Property::WeakCompleteness,
                            {last_round(report), pid(c), pid(c), "no correct suspecter", "at least one"});
            }
        }
        return {Property::WeakCompleteness, true, std::nullopt, {}};
    }

    PropertyVerdict check_strong_accuracy(const SimulationReport &report)
    {
        const auto &ground = report.final_ground;
        const std::size_t n = ground.size();
        for (std::size_t h = 0; h < n; ++h)
        {
            if (ground[h] != GroundState::Correct)
                continue;
            for (std::size_t s = 0; s < n; ++s)
            {
                if (s == h || ground[s] != GroundState::Correct)
                    continue;
                const Timestamp ts = report.final_tables[h].at(pid(s));
                if (classification_of(ts) == Classification::Suspect)
                {
                    return fail(Property::StrongAccuracy,
                                {last_round(report), pid(h), pid(s), timestamp_text(ts), "not suspect"});
                }
            }
        }
        return {Property::StrongAccuracy, true, std::nullopt, {}};
    }

    PropertyVerdict check_latency(const SimulationReport &report)
    {
        require_no_injections(report, "latency");
        PropertyVerdict verdict{Property::LatencyBound, true, std::nullopt, "within assignment diameter"};
        for (const auto &e : report.events)
        {
            if (e.overlapped)
            {
                verdict.note = "within assignment diameter; overlapping events skipped";
                continue;
            }
            const int diameter = assignment_diameter(e.assignment_at_event, e.ground_before);
            if (diameter == kUnreachable)
            {
                verdict.note = "within assignment diameter; disconnected assignment skipped";
                continue;
            }
            const auto latency = e.latency();
            if (!latency)
            {
                return fail(Property::LatencyBound,
                            {last_round(report), pid(0), e.pid, "undetected", "<= " + std::to_string(diameter)});
            }
            if (*latency > diameter)
            {
                return fail(Property::LatencyBound, {*e.detected_round, pid(0), e.pid, std::to_string(*latency),
                                                     "<= diameter " + std::to_string(diameter)});
            }
        }
        return verdict;
    }

    std::vector<PropertyVerdict> check_bounds(const SimulationReport &report, DetectorKind kind)
    {
        require_no_injections(report, "detector");
        const std::size_t n = report.scenario.n;
        const std::size_t items_cap = kind == DetectorKind::BruteForce ? 0 : n - 2;
        int latency_cap = 1;
        if (kind == DetectorKind::VRing)
            latency_cap = static_cast<int>(n) - 1;
        else if (kind == DetectorKind::VCube)
            latency_cap = static_cast<int>(log2_exact(n));

        PropertyVerdict tests{Property::TestCountBound, true, std::nullopt, {}};
        PropertyVerdict items{Property::ItemsBound, true, std::nullopt, {}};
        for (const auto &t : report.traces)
        {
            const auto correct =
                static_cast<std::size_t>(std::count(t.ground.begin(), t.ground.end(), GroundState::Correct));
            const std::size_t count = t.tests_executed();
            bool ok = true;
            std::string bound;
            switch (kind)
            {
            case DetectorKind::BruteForce:
                ok = count == correct * (n - 1);
                bound = "== " + std::to_string(correct * (n - 1));
                break;
            case DetectorKind::VRing:
            {
                const std::size_t expected = correct >= 2 ? n : (correct == 1 ? n - 1 : 0);
                ok = count == expected;
                bound = "== " + std::to_string(expected);
                break;
            }
            case DetectorKind::VCube:
                ok = count <= n * log2_exact(n);
                bound = "<= " + std::to_string(n * log2_exact(n));
                break;
            }
            if (!ok && tests.holds)
            {
                tests = fail(Property::TestCountBound, {t.round, pid(0), pid(0), std::to_string(count), bound});
            }
            for (const auto &test : t.executed_tests)
            {
                if (test.items.size() > items_cap && items.holds)
                {
                    items = fail(Property::ItemsBound, {t.round, test.tester, test.tested,
                                                        std::to_string(test.items.size()),
                                                        "<= " + std::to_string(items_cap)});
                }
            }
        }

        const std::string cap_note = "within detector cap " + std::to_string(latency_cap);
        PropertyVerdict latency{Property::LatencyBound, true, std::nullopt, cap_note};
        for (const auto &e : report.events)
        {
            if (e.overlapped)
            {
                latency.note = cap_note + "; overlapping events skipped";
                continue;
            }
            const auto l = e.latency();
            if (!l || *l > latency_cap)
            {
                latency = fail(Property::LatencyBound, {e.detected_round.value_or(last_round(report)), pid(0), e.pid,
                                                        l ? std::to_string(*l) : "undetected",
                                                        "<= " + std::to_string(latency_cap)});
                break;
            }
        }
        return {tests, latency, items};
    }

    std::vector<PropertyVerdict> check_all(const SimulationReport &report)
    {
        std::vector<PropertyVerdict> out{check_strong_completeness(report), check_weak_completeness(report),
                                         check_strong_accuracy(report)};
        if (!report.injections_present())
        {
            out.push_back(check_latency(report));
            for (auto &v : check_bounds(report, report.scenario.detector))
                out.push_back(std::move(v));
        }
        return out;
    }

    namespace
    {
        std::string witness_text(const PropertyVerdict &v)
        {
            if (!v.witness)
                return v.note;
            const auto &w = *v.witness;
            std::ostringstream out;
            out << "round=" << w.round << " holder=" << index_of(w.holder) << " subject=" << index_of(w.subject)
                << " observed=" << w.observed << " bound=" << w.bound;
            return out.str();
        }
    }

    std::string render_verdicts_text(std::span<const PropertyVerdict> verdicts)
    {
        std::ostringstream out;
        for (const auto &v : verdicts)
        {
            std::string name(to_string(v.property));
            name.resize(std::max<std::size_t>(name.size(), 20), ' ');
            out << name << (v.holds ? "PASS" : "FAIL");
            const auto detail = witness_text(v);
            if (!detail.empty())
                out << "  " << detail;
            out << '\n';
        }
        return out.str();
    }

    std::string render_verdicts_csv(std::span<const PropertyVerdict> verdicts)
    {
        std::ostringstream out;
        out << "property,holds,witness\n";
        for (const auto &v : verdicts)
        {
            out << to_string(v.property) << ',' << (v.holds ? "true" : "false") << ',' << witness_text(v) << '\n';
        }
        return out.str();
    }
}
