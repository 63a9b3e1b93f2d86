#include "diagfd/analysis.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace diagfd;

namespace
{
    // All-pairs shortest paths by Floyd-Warshall, independent of the BFS used by the library.
    int floyd_diameter(const TestingAssignment &a, const std::vector<bool> &keep)
    {
        constexpr int inf = 1 << 20;
        const std::size_t n = a.n;
        std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
        for (std::size_t i = 0; i < n; ++i)
            d[i][i] = 0;
        for (const auto &[u, v] : a.arcs)
            if (keep[index_of(u)] && keep[index_of(v)])
                d[index_of(u)][index_of(v)] = 1;
        for (std::size_t k = 0; k < n; ++k)
            if (keep[k])
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
        int best = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (keep[i] && keep[j])
                {
                    if (d[i][j] >= inf)
                        return kUnreachable;
                    best = std::max(best, d[i][j]);
                }
        return best;
    }

    TestingAssignment ring(std::size_t n)
    {
        TestingAssignment a{n, {}};
        for (std::size_t i = 0; i < n; ++i)
            a.arcs.insert({pid(i), pid((i + 1) % n)});
        return a;
    }

    Scenario make(DetectorKind kind, std::size_t n, std::vector<CrashEvent> crashes = {}, int max_rounds = 40)
    {
        Scenario s;
        s.n = n;
        s.detector = kind;
        s.crashes = std::move(crashes);
        s.max_rounds = max_rounds;
        return s;
    }

    // vCube n = 8: the level-1 tester of 2 (process 3) keeps suspecting it,
    // while its other testers (0 and 6) see it correct.
    Scenario contradictory_testers()
    {
        auto s = make(DetectorKind::VCube, 8, {}, 20);
        for (int r = 1; r <= 20; ++r)
            s.false_suspicions.push_back({r, pid(3), pid(2)});
        return s;
    }
}

TEST(Diameter, DirectedRing)
{
    EXPECT_EQ(assignment_diameter(ring(6)), 5);
}

TEST(Diameter, CompleteGraphIsOne)
{
    TestingAssignment a{5, {}};
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            if (i != j)
                a.arcs.insert({pid(i), pid(j)});
    EXPECT_EQ(assignment_diameter(a), 1);
}

TEST(Diameter, VCubeEightIsThree)
{
    const std::vector<GroundState> ground(8, GroundState::Correct);
    EXPECT_EQ(assignment_diameter(recompute_assignment(DetectorKind::VCube, 8, converged_views(ground))), 3);
}

TEST(Diameter, UnreachableSentinel)
{
    TestingAssignment a{3, {{pid(0), pid(1)}, {pid(1), pid(2)}}};
    EXPECT_EQ(assignment_diameter(a), kUnreachable);
}

TEST(Diameter, CorrectOnlyRestriction)
{
    // Ring 0..5 with 1, 2, 5 crashed and converged views: correct 0, 3, 4 form a 3-cycle.
    std::vector<GroundState> ground(6, GroundState::Correct);
    for (auto c : {1, 2, 5})
        ground[c] = GroundState::Failed;
    const auto a = recompute_assignment(DetectorKind::VRing, 6, converged_views(ground), ground);
    EXPECT_EQ(assignment_diameter(a), kUnreachable);
    EXPECT_EQ(assignment_diameter(a, ground), 2);
}

TEST(Diameter, AgreesWithFloydWarshallOnRandomGraphs)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial)
    {
        const std::size_t n = 2 + rng() % 9;
        TestingAssignment a{n, {}};
        const unsigned density = 1 + rng() % 6;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && rng() % 8 < density)
                    a.arcs.insert({pid(i), pid(j)});
        std::vector<GroundState> ground(n, GroundState::Correct);
        std::vector<bool> keep(n, true);
        for (std::size_t i = 0; i < n; ++i)
            if (rng() % 5 == 0)
            {
                ground[i] = GroundState::Failed;
                keep[i] = false;
            }
        EXPECT_EQ(assignment_diameter(a), floyd_diameter(a, std::vector<bool>(n, true)));
        EXPECT_EQ(assignment_diameter(a, ground), floyd_diameter(a, keep));
        EXPECT_EQ(correct_strongly_connected(a, ground), floyd_diameter(a, keep) != kUnreachable);
    }
}

TEST(StronglyConnected, TwoIslandsAreNot)
{
    // 0 and 1 test only each other; 2, 3, 4 test each other and 0, 1.
    TestingAssignment a{5, {}};
    a.arcs = {{pid(0), pid(1)}, {pid(1), pid(0)}, {pid(2), pid(3)}, {pid(3), pid(4)}, {pid(4), pid(2)},
              {pid(2), pid(0)}, {pid(3), pid(1)}, {pid(4), pid(0)}};
    const std::vector<GroundState> ground(5, GroundState::Correct);
    EXPECT_FALSE(correct_strongly_connected(a, ground));
}

TEST(StronglyConnected, RingAndSingleton)
{
    EXPECT_TRUE(correct_strongly_connected(ring(6), std::vector<GroundState>(6, GroundState::Correct)));
    std::vector<GroundState> one(4, GroundState::Failed);
    one[2] = GroundState::Correct;
    EXPECT_TRUE(correct_strongly_connected(TestingAssignment{4, {}}, one));
}

TEST(Completeness, HoldsWithoutInjections)
{
    for (auto kind : {DetectorKind::BruteForce, DetectorKind::VRing, DetectorKind::VCube})
    {
        const auto report = run_scenario(make(kind, 8, {{2, pid(1)}, {9, pid(6)}}));
        EXPECT_TRUE(check_strong_completeness(report).holds) << to_string(kind);
        EXPECT_TRUE(check_weak_completeness(report).holds);
    }
}

TEST(Completeness, SuspectedBystanderStillComplete)
{
    // Brute force n = 5: 1 crashes, every other process keeps suspecting 0.
    auto s = make(DetectorKind::BruteForce, 5, {{1, pid(1)}}, 10);
    for (int r = 1; r <= 10; ++r)
        for (std::size_t k = 2; k < 5; ++k)
            s.false_suspicions.push_back({r, pid(k), pid(0)});
    const auto report = run_scenario(s);
    EXPECT_TRUE(check_strong_completeness(report).holds);
    EXPECT_FALSE(check_strong_accuracy(report).holds);
}

TEST(Completeness, TruncatedRunFailsWithWitness)
{
    const auto report = run_scenario(make(DetectorKind::VRing, 6, {{3, pid(4)}}, 3));
    const auto v = check_strong_completeness(report);
    EXPECT_FALSE(v.holds);
    ASSERT_TRUE(v.witness);
    EXPECT_EQ(v.witness->subject, pid(4));
    EXPECT_EQ(v.witness->round, 3);
}

TEST(Accuracy, HoldsWithoutInjections)
{
    for (auto kind : {DetectorKind::BruteForce, DetectorKind::VRing, DetectorKind::VCube})
        EXPECT_TRUE(check_strong_accuracy(run_scenario(make(kind, 8, {{3, pid(2)}}))).holds);
}

TEST(Accuracy, ContradictoryTestersBreakIt)
{
    const auto report = run_scenario(contradictory_testers());
    const auto v = check_strong_accuracy(report);
    EXPECT_FALSE(v.holds);
    ASSERT_TRUE(v.witness);
    EXPECT_EQ(v.witness->subject, pid(2));
}

TEST(Accuracy, DisconnectedCorrectGroupsBreakIt)
{
    // 2, 3, 4 suspect both 0 and 1; 0 and 1 see each other correct.
    auto s = make(DetectorKind::BruteForce, 5, {}, 10);
    for (int r = 1; r <= 10; ++r)
        for (std::size_t k = 2; k < 5; ++k)
            for (std::size_t t : {0u, 1u})
                s.false_suspicions.push_back({r, pid(k), pid(t)});
    const auto report = run_scenario(s);
    EXPECT_FALSE(check_strong_accuracy(report).holds);
    EXPECT_EQ(report.final_classification(pid(0), pid(1)), Classification::Correct);
}

TEST(Accuracy, AllAgainstAllBreaksIt)
{
    auto s = make(DetectorKind::VRing, 4, {}, 3);
    for (int r = 1; r <= 3; ++r)
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                if (i != j)
                    s.false_suspicions.push_back({r, pid(i), pid(j)});
    EXPECT_FALSE(check_strong_accuracy(run_scenario(s)).holds);
}

TEST(Bounds, BruteForceEight)
{
    const auto report = run_scenario(make(DetectorKind::BruteForce, 8, {{3, pid(5)}}));
    EXPECT_EQ(report.traces.front().tests_executed(), 56u);
    for (const auto &v : check_bounds(report, DetectorKind::BruteForce))
        EXPECT_TRUE(v.holds) << to_string(v.property);
    EXPECT_EQ(report.events.at(0).latency(), 1);
}

TEST(Bounds, VRingSix)
{
    auto s = make(DetectorKind::VRing, 6, {{1, pid(1)}});
    s.ordering = Ordering::WorstCase;
    const auto report = run_scenario(s);
    for (const auto &t : report.traces)
        EXPECT_EQ(t.tests_executed(), 6u);
    EXPECT_EQ(report.events.at(0).latency(), 5);
    for (const auto &v : check_bounds(report, DetectorKind::VRing))
        EXPECT_TRUE(v.holds) << to_string(v.property);
}

TEST(Bounds, VCubeEight)
{
    auto s = make(DetectorKind::VCube, 8, {{2, pid(6)}});
    s.ordering = Ordering::WorstCase;
    const auto report = run_scenario(s);
    EXPECT_LE(report.max_tests_per_round(), 24u);
    EXPECT_LE(*report.events.at(0).latency(), 3);
    for (const auto &v : check_bounds(report, DetectorKind::VCube))
        EXPECT_TRUE(v.holds) << to_string(v.property);
}

TEST(Bounds, InjectionRegimeIsRejected)
{
    const auto report = run_scenario(contradictory_testers());
    EXPECT_THROW(check_bounds(report, DetectorKind::VCube), InapplicableRegime);
    EXPECT_THROW(check_latency(report), InapplicableRegime);
}

TEST(Bounds, ViolationCarriesWitness)
{
    // Checking a vRing report against Brute-Force bounds must fail the test count.
    const auto report = run_scenario(make(DetectorKind::VRing, 6));
    const auto verdicts = check_bounds(report, DetectorKind::BruteForce);
    EXPECT_FALSE(verdicts[0].holds);
    ASSERT_TRUE(verdicts[0].witness);
    EXPECT_EQ(verdicts[0].witness->observed, "6");
}

TEST(Latency, WithinDiameterAndSkipsOverlaps)
{
    auto s = make(DetectorKind::VRing, 8, {{1, pid(2)}, {2, pid(6)}});
    s.ordering = Ordering::WorstCase;
    const auto v = check_latency(run_scenario(s));
    EXPECT_TRUE(v.holds);
    EXPECT_FALSE(v.note.empty());
}

TEST(Rendering, CsvHasStableColumns)
{
    const auto report = run_scenario(contradictory_testers());
    const auto verdicts = check_all(report);
    const auto csv = render_verdicts_csv(verdicts);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "property,holds,witness");
    EXPECT_NE(csv.find("StrongAccuracy,false,round="), std::string::npos);
    EXPECT_NE(render_verdicts_text(verdicts).find("StrongAccuracy      FAIL"), std::string::npos);
}
