// diagfd: run, verify and inspect failure-detector scenarios.
//
// Exit codes: 0 success / all properties hold, 1 a property failed,
// 2 parse error, 3 invalid scenario.

#include "diagfd/analysis.hpp"
#include "diagfd/scenario_file.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace
{
    using namespace diagfd;

    constexpr int kExitOk = 0;
    constexpr int kExitPropertyFailed = 1;
    constexpr int kExitParse = 2;
    constexpr int kExitInvalid = 3;

    Scenario load_with_overrides(const std::string &path)
    {
        Scenario s = load_scenario(path);
        if (const char *env = std::getenv("DIAGFD_MAX_ROUNDS"); env != nullptr && *env != '\0')
        {
            int value = 0;
            const std::string_view text(env);
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec != std::errc{} || ptr != text.data() + text.size())
                throw ParseError(0, "DIAGFD_MAX_ROUNDS is not an integer: '" + std::string(text) + "'");
            s.max_rounds = value;
        }
        validate_scenario(s);
        return s;
    }

    bool write_text(const std::string &path, const std::string &text)
    {
        if (path.empty() || path == "-")
        {
            std::cout << text;
            return true;
        }
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out)
        {
            std::cerr << "error: cannot write " << path << '\n';
            return false;
        }
        return true;
    }

    template <typename Fn>
    int guarded(Fn &&fn)
    {
        try
        {
            return fn();
        }
        catch (const ParseError &e)
        {
            std::cerr << "parse error: " << e.what() << '\n';
            return kExitParse;
        }
        catch (const InvalidScenario &e)
        {
            std::cerr << "invalid scenario: " << e.what() << '\n';
            return kExitInvalid;
        }
    }

    int cmd_run(const std::string &scenario_path, const std::string &output_path, const std::string &trace_path)
    {
        return guarded([&] {
            const auto report = run_scenario(load_with_overrides(scenario_path));
            if (!write_text(output_path, render_report_csv(report)))
                return kExitInvalid;
            if (!trace_path.empty() && !write_text(trace_path, render_trace(report)))
                return kExitInvalid;
            return kExitOk;
        });
    }

    int cmd_verify(const std::string &scenario_path, const std::string &csv_path)
    {
        return guarded([&] {
            const auto report = run_scenario(load_with_overrides(scenario_path));
            const auto verdicts = check_all(report);
            std::cout << render_verdicts_text(verdicts);
            if (!csv_path.empty() && !write_text(csv_path, render_verdicts_csv(verdicts)))
                return kExitInvalid;
            const bool all = std::all_of(verdicts.begin(), verdicts.end(), [](const auto &v) { return v.holds; });
            return all ? kExitOk : kExitPropertyFailed;
        });
    }

    int cmd_topology(const std::string &detector, std::size_t n, const std::vector<std::size_t> &crashed)
    {
        return guarded([&] {
            const auto kind = parse_detector_kind(detector);
            if (!kind)
                throw InvalidScenario("unknown detector '" + detector + "'");
            validate_system(*kind, n);
            std::vector<GroundState> ground(n, GroundState::Correct);
            for (std::size_t p : crashed)
            {
                if (p >= n)
                    throw InvalidScenario("crashed process " + std::to_string(p) + " outside the system");
                ground[p] = GroundState::Failed;
            }
            const auto views = converged_views(ground);
            const auto a = recompute_assignment(*kind, n, views, ground);
            std::cout << render_adjacency(a);
            std::cout << "arcs: " << a.arcs.size() << '\n';
            const int d = assignment_diameter(a, ground);
            std::cout << "diameter: " << (d == kUnreachable ? std::string("unreachable") : std::to_string(d)) << '\n';
            return kExitOk;
        });
    }

    struct SweepRow
    {
        std::size_t n;
        std::uint64_t seed;
        std::size_t crash_pid;
        int crash_round;
        std::optional<int> latency;
        std::size_t max_tests;
        std::size_t items;
        bool complete;
    };

    int cmd_sweep(const std::string &detector, const std::vector<std::size_t> &n_list, std::uint64_t seeds,
                  const std::string &ordering, unsigned threads, const std::string &output_path)
    {
        return guarded([&] {
            const auto kind = parse_detector_kind(detector);
            if (!kind)
                throw InvalidScenario("unknown detector '" + detector + "'");
            const auto order = parse_ordering(ordering);
            if (!order)
                throw InvalidScenario("unknown ordering '" + ordering + "'");

            std::vector<Scenario> jobs;
            for (std::size_t n : n_list)
            {
                validate_system(*kind, n);
                for (std::uint64_t seed = 1; seed <= seeds; ++seed)
                {
                    DeterministicRng rng(seed * 0x9E3779B97F4A7C15ULL + n);
                    Scenario s;
                    s.n = n;
                    s.detector = *kind;
                    s.ordering = *order;
                    s.seed = seed;
                    const int crash_round = 1 + static_cast<int>(rng.below(4));
                    s.crashes.push_back({crash_round, pid(rng.below(n))});
                    s.max_rounds = crash_round + 4 * static_cast<int>(n);
                    jobs.push_back(std::move(s));
                }
            }

            std::vector<SweepRow> rows(jobs.size());
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t i = next++; i < jobs.size(); i = next++)
                {
                    const auto report = run_scenario(jobs[i]);
                    std::size_t items = 0;
                    for (const auto &t : report.traces)
                        items += t.items_transferred;
                    const auto &e = report.events.front();
                    rows[i] = {jobs[i].n, jobs[i].seed, index_of(e.pid), e.crash_round, e.latency(),
                               report.max_tests_per_round(), items, check_strong_completeness(report).holds};
                }
            };
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < std::max(1u, threads); ++t)
                pool.emplace_back(worker);
            for (auto &t : pool)
                t.join();

            std::ostringstream out;
            out << "detector,n,seed,crash_pid,crash_round,latency,max_tests_per_round,items_total,strong_completeness\n";
            for (const auto &r : rows)
            {
                out << to_string(*kind) << ',' << r.n << ',' << r.seed << ',' << r.crash_pid << ',' << r.crash_round << ','
                    << (r.latency ? std::to_string(*r.latency) : std::string()) << ',' << r.max_tests << ',' << r.items
                    << ',' << (r.complete ? "true" : "false") << '\n';
            }
            return write_text(output_path, out.str()) ? kExitOk : kExitInvalid;
        });
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Round-based simulator for test-based unreliable failure detectors"};
    app.require_subcommand(1);

    std::string scenario_path, output_path, trace_path, csv_path;

    auto *run = app.add_subcommand("run", "Run a scenario and write per-round metrics as CSV");
    run->add_option("scenario", scenario_path, "Scenario file")->required();
    run->add_option("-o,--output", output_path, "CSV output (default stdout)");
    run->add_option("--trace", trace_path, "Also write the per-test trace to this file");

    auto *verify = app.add_subcommand("verify", "Run a scenario and check completeness, accuracy and bounds");
    verify->add_option("scenario", scenario_path, "Scenario file")->required();
    verify->add_option("--csv", csv_path, "Also write verdicts as CSV");

    std::string detector;
    std::size_t n = 0;
    std::vector<std::size_t> crashed;
    auto *topology = app.add_subcommand("topology", "Print the converged testing assignment and its diameter");
    topology->add_option("--detector", detector, "bruteforce | vring | vcube")->required();
    topology->add_option("--n", n, "Number of processes")->required();
    topology->add_option("--crashed", crashed, "Crashed processes, comma separated")->delimiter(',');

    std::vector<std::size_t> n_list;
    std::uint64_t seeds = 10;
    std::string ordering = "random";
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    auto *sweep = app.add_subcommand("sweep", "Random single-crash scenarios over several system sizes");
    sweep->add_option("--detector", detector, "bruteforce | vring | vcube")->required();
    sweep->add_option("--n-list", n_list, "System sizes, comma separated")->delimiter(',')->required();
    sweep->add_option("--seeds", seeds, "Number of seeds per size");
    sweep->add_option("--ordering", ordering, "fixed | random | best | worst");
    sweep->add_option("--threads", threads, "Worker threads");
    sweep->add_option("-o,--output", output_path, "CSV output (default stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    if (*run)
        return cmd_run(scenario_path, output_path, trace_path);
    if (*verify)
        return cmd_verify(scenario_path, csv_path);
    if (*topology)
        return cmd_topology(detector, n, crashed);
    return cmd_sweep(detector, n_list, seeds, ordering, threads, output_path);
}
