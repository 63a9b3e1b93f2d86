#include "diagfd/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace diagfd
{
    std::string_view to_string(DetectorKind kind) noexcept
    {
        switch (kind)
        {
        case DetectorKind::BruteForce:
            return "bruteforce";
        case DetectorKind::VRing:
            return "vring";
        case DetectorKind::VCube:
            return "vcube";
        }
        return "?";
    }

    std::optional<DetectorKind> parse_detector_kind(std::string_view text)
    {
        std::string lowered;
        for (char c : text)
        {
            if (c != '-' && c != '_')
            {
                lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            }
        }
        if (lowered == "bruteforce")
            return DetectorKind::BruteForce;
        if (lowered == "vring")
            return DetectorKind::VRing;
        if (lowered == "vcube")
            return DetectorKind::VCube;
        return std::nullopt;
    }

    unsigned log2_exact(std::size_t n)
    {
        if (!is_power_of_two(n))
        {
            throw InvalidScenario(std::to_string(n) + " is not a power of two");
        }
        unsigned d = 0;
        while ((std::size_t{1} << d) < n)
        {
            ++d;
        }
        return d;
    }

    void validate_system(DetectorKind kind, std::size_t n)
    {
        if (n < 2)
        {
            throw InvalidScenario("n must be at least 2, got " + std::to_string(n));
        }
        if (kind == DetectorKind::VCube && !is_power_of_two(n))
        {
            throw InvalidScenario("vcube requires n to be a power of two, got " + std::to_string(n));
        }
    }

    std::vector<ProcessId> TestingAssignment::testers_of(ProcessId tested) const
    {
        std::vector<ProcessId> out;
        for (const auto &[tester, target] : arcs)
        {
            if (target == tested)
            {
                out.push_back(tester);
            }
        }
        return out;
    }

    std::vector<ProcessId> TestingAssignment::tested_by(ProcessId tester) const
    {
        std::vector<ProcessId> out;
        for (auto it = arcs.lower_bound({tester, pid(0)}); it != arcs.end() && it->first == tester; ++it)
        {
            out.push_back(it->second);
        }
        return out;
    }

    TestPlan brute_force_plan(ProcessId i, std::size_t n)
    {
        TestPlan plan{i, {}, false};
        plan.targets.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
        {
            if (pid(j) != i)
            {
                plan.targets.push_back(pid(j));
            }
        }
        return plan;
    }

    TestPlan vring_plan(ProcessId i, std::size_t n)
    {
        TestPlan plan{i, {}, true};
        plan.targets.reserve(n - 1);
        for (std::size_t step = 1; step < n; ++step)
        {
            plan.targets.push_back(pid((index_of(i) + step) % n));
        }
        return plan;
    }

    namespace
    {
        // c(i,s) = i ^ 2^(s-1) ^ offsets(s), where offsets(1) = [0] and
        // offsets(s) = [0] ++ c(0,1) ++ ... ++ c(0,s-1).
        std::vector<std::size_t> cluster_offsets(unsigned s)
        {
            std::vector<std::size_t> offsets{0};
            for (unsigned t = 1; t < s; ++t)
            {
                const std::size_t bit = std::size_t{1} << (t - 1);
                const std::size_t prefix = offsets.size();
                // c(0,t) = bit ^ offsets(t), and offsets(t) is the first 2^(t-1) entries built so far.
                for (std::size_t k = 0; k < prefix; ++k)
                {
                    offsets.push_back(bit ^ offsets[k]);
                }
            }
            return offsets;
        }
    }

    std::vector<ProcessId> vcube_cluster(ProcessId i, unsigned s, std::size_t n)
    {
        if (!is_power_of_two(n) || n < 2)
        {
            throw InvalidCluster("vcube clusters need n a power of two >= 2, got " + std::to_string(n));
        }
        const unsigned dims = log2_exact(n);
        if (s < 1 || s > dims)
        {
            throw InvalidCluster("cluster level " + std::to_string(s) + " outside [1, " + std::to_string(dims) + "]");
        }
        if (index_of(i) >= n)
        {
            throw InvalidCluster("process " + std::to_string(index_of(i)) + " outside the system");
        }
        const std::size_t head = index_of(i) ^ (std::size_t{1} << (s - 1));
        std::vector<ProcessId> cluster;
        for (std::size_t offset : cluster_offsets(s))
        {
            cluster.push_back(pid(head ^ offset));
        }
        return cluster;
    }

    TestPlan vcube_plan(ProcessId j, std::size_t n, const TimestampTable &view)
    {
        const unsigned dims = log2_exact(n);
        TestPlan plan{j, {}, false};
        for (unsigned s = 1; s <= dims; ++s)
        {
            for (std::size_t i = 0; i < n; ++i)
            {
                if (pid(i) == j)
                {
                    continue;
                }
                for (ProcessId candidate : vcube_cluster(pid(i), s, n))
                {
                    if (candidate == j)
                    {
                        plan.targets.push_back(pid(i));
                        break;
                    }
                    if (view.classify(candidate) != Classification::Suspect)
                    {
                        break;
                    }
                }
            }
        }
        return plan;
    }

    TestPlan plan_for(DetectorKind kind, ProcessId i, std::size_t n, const TimestampTable &view)
    {
        switch (kind)
        {
        case DetectorKind::BruteForce:
            return brute_force_plan(i, n);
        case DetectorKind::VRing:
            return vring_plan(i, n);
        case DetectorKind::VCube:
            return vcube_plan(i, n, view);
        }
        throw InvalidScenario("unknown detector kind");
    }

    std::vector<ProcessId> expected_targets(const TestPlan &plan, const TimestampTable &view)
    {
        if (!plan.adaptive)
        {
            return plan.targets;
        }
        std::vector<ProcessId> out;
        for (ProcessId target : plan.targets)
        {
            out.push_back(target);
            if (view.classify(target) != Classification::Suspect)
            {
                break;
            }
        }
        return out;
    }

    TestingAssignment recompute_assignment(DetectorKind kind, std::size_t n, std::span<const TimestampTable> views,
                                           std::span<const GroundState> ground)
    {
        TestingAssignment a{n, {}};
        for (std::size_t i = 0; i < n; ++i)
        {
            if (!ground.empty() && ground[i] == GroundState::Failed)
            {
                continue;
            }
            const auto &view = views[i];
            for (ProcessId target : expected_targets(plan_for(kind, pid(i), n, view), view))
            {
                a.arcs.insert({pid(i), target});
            }
        }
        return a;
    }

    std::vector<TimestampTable> converged_views(std::span<const GroundState> ground)
    {
        const std::size_t n = ground.size();
        std::vector<TimestampTable> views;
        views.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            TimestampTable t(pid(i), n);
            for (std::size_t j = 0; j < n; ++j)
            {
                if (j != i)
                {
                    t.set(pid(j), Timestamp{ground[j] == GroundState::Failed ? 1 : 0});
                }
            }
            views.push_back(std::move(t));
        }
        return views;
    }

    std::string render_adjacency(const TestingAssignment &a)
    {
        std::ostringstream out;
        for (const auto &[tester, tested] : a.arcs)
        {
            out << index_of(tester) << " -> " << index_of(tested) << '\n';
        }
        return out.str();
    }
}
