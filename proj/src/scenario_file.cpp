#include "diagfd/scenario_file.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace diagfd
{
    namespace
    {
        std::string_view trim(std::string_view s)
        {
            const auto first = s.find_first_not_of(" \t\r");
            if (first == std::string_view::npos)
                return {};
            const auto last = s.find_last_not_of(" \t\r");
            return s.substr(first, last - first + 1);
        }

        template <typename T>
        T parse_number(std::string_view text, int line, std::string_view what)
        {
            text = trim(text);
            T value{};
            const auto *end = text.data() + text.size();
            const auto [ptr, ec] = std::from_chars(text.data(), end, value);
            if (ec != std::errc{} || ptr != end || text.empty())
            {
                throw ParseError(line, "expected a number for " + std::string(what) + ", got '" + std::string(text) + "'");
            }
            return value;
        }

        std::vector<std::string_view> split(std::string_view text, char sep)
        {
            std::vector<std::string_view> parts;
            std::size_t start = 0;
            while (true)
            {
                const auto pos = text.find(sep, start);
                parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
            return parts;
        }

        struct PendingInjection
        {
            int first_round;
            int last_round;
            std::optional<std::uint32_t> tester; // nullopt = every process
            std::optional<std::uint32_t> tested;
        };

        std::optional<std::uint32_t> parse_endpoint(std::string_view text, int line)
        {
            if (text == "*")
                return std::nullopt;
            return parse_number<std::uint32_t>(text, line, "process id");
        }
    }

    Scenario parse_scenario(std::string_view text)
    {
        Scenario s;
        std::string section;
        std::map<std::string, int> seen; // "section.key" -> line
        std::vector<PendingInjection> injections;
        std::optional<double> probability;
        std::optional<std::uint64_t> injection_seed;
        int line_no = 0;

        auto once = [&](const std::string &key, int line) {
            if (!seen.emplace(section + "." + key, line).second)
                throw ParseError(line, "duplicate key '" + key + "' in [" + section + "]");
        };

        std::istringstream in{std::string(text)};
        std::string raw;
        while (std::getline(in, raw))
        {
            ++line_no;
            std::string_view line = raw;
            if (const auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;

            if (line.front() == '[')
            {
                if (line.back() != ']')
                    throw ParseError(line_no, "unterminated section header");
                section = std::string(trim(line.substr(1, line.size() - 2)));
                if (section != "system" && section != "crashes" && section != "injections" && section != "run")
                    throw ParseError(line_no, "unknown section [" + section + "]");
                continue;
            }

            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ParseError(line_no, "expected 'key = value'");
            if (section.empty())
                throw ParseError(line_no, "key outside of any section");
            const std::string key(trim(line.substr(0, eq)));
            const std::string_view value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty())
                throw ParseError(line_no, "empty key or value");

            if (section == "system")
            {
                once(key, line_no);
                if (key == "n")
                    s.n = parse_number<std::size_t>(value, line_no, "n");
                else if (key == "detector")
                {
                    const auto kind = parse_detector_kind(value);
                    if (!kind)
                        throw ParseError(line_no, "unknown detector '" + std::string(value) + "'");
                    s.detector = *kind;
                }
                else
                    throw ParseError(line_no, "unknown key '" + key + "' in [system]");
            }
            else if (section == "run")
            {
                once(key, line_no);
                if (key == "ordering")
                {
                    const auto o = parse_ordering(value);
                    if (!o)
                        throw ParseError(line_no, "unknown ordering '" + std::string(value) + "'");
                    s.ordering = *o;
                }
                else if (key == "seed")
                    s.seed = parse_number<std::uint64_t>(value, line_no, "seed");
                else if (key == "max_rounds")
                    s.max_rounds = parse_number<int>(value, line_no, "max_rounds");
                else
                    throw ParseError(line_no, "unknown key '" + key + "' in [run]");
            }
            else if (section == "crashes")
            {
                const int round = parse_number<int>(key, line_no, "crash round");
                for (auto p : split(value, ','))
                    s.crashes.push_back({round, pid(parse_number<std::uint32_t>(p, line_no, "process id"))});
            }
            else // injections
            {
                if (key == "probability")
                {
                    once(key, line_no);
                    probability = parse_number<double>(value, line_no, "probability");
                    continue;
                }
                if (key == "seed")
                {
                    once(key, line_no);
                    injection_seed = parse_number<std::uint64_t>(value, line_no, "seed");
                    continue;
                }
                PendingInjection inj{0, 0, std::nullopt, std::nullopt};
                if (const auto dash = key.find('-'); dash != std::string::npos)
                {
                    inj.first_round = parse_number<int>(std::string_view(key).substr(0, dash), line_no, "round");
                    inj.last_round = parse_number<int>(std::string_view(key).substr(dash + 1), line_no, "round");
                    if (inj.last_round < inj.first_round)
                        throw ParseError(line_no, "empty round range");
                }
                else
                {
                    inj.first_round = inj.last_round = parse_number<int>(key, line_no, "round");
                }
                const auto ends = split(value, ',');
                if (ends.size() != 2)
                    throw ParseError(line_no, "expected 'tester,tested'");
                inj.tester = parse_endpoint(ends[0], line_no);
                inj.tested = parse_endpoint(ends[1], line_no);
                injections.push_back(inj);
            }
        }

        if (!seen.contains("system.n"))
            throw ParseError(line_no, "missing 'n' in [system]");
        if (!seen.contains("system.detector"))
            throw ParseError(line_no, "missing 'detector' in [system]");

        for (const auto &inj : injections)
        {
            for (int r = inj.first_round; r <= inj.last_round; ++r)
            {
                if (inj.tester && inj.tested)
                {
                    s.false_suspicions.push_back({r, pid(*inj.tester), pid(*inj.tested)});
                    continue;
                }
                for (std::size_t t = 0; t < s.n; ++t)
                {
                    if (inj.tester && *inj.tester != t)
                        continue;
                    for (std::size_t u = 0; u < s.n; ++u)
                    {
                        if (t == u || (inj.tested && *inj.tested != u))
                            continue;
                        s.false_suspicions.push_back({r, pid(t), pid(u)});
                    }
                }
            }
        }
        if (probability || injection_seed)
            s.random_suspicions = RandomSuspicions{probability.value_or(0.0), injection_seed.value_or(0)};
        return s;
    }

    Scenario load_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ParseError(0, "cannot open " + path.string());
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return parse_scenario(buffer.str());
    }

    std::string render_scenario(const Scenario &s)
    {
        std::ostringstream out;
        out << "[system]\n"
            << "n = " << s.n << '\n'
            << "detector = " << to_string(s.detector) << "\n\n";
        out << "[crashes]\n";
        for (const auto &c : s.crashes)
            out << c.round << " = " << index_of(c.pid) << '\n';
        out << "\n[injections]\n";
        for (const auto &f : s.false_suspicions)
            out << f.round << " = " << index_of(f.tester) << ',' << index_of(f.tested) << '\n';
        if (s.random_suspicions)
        {
            char buf[64];
            const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, s.random_suspicions->probability);
            out << "probability = " << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n'
                << "seed = " << s.random_suspicions->seed << '\n';
        }
        out << "\n[run]\n"
            << "ordering = " << to_string(s.ordering) << '\n'
            << "seed = " << s.seed << '\n'
            << "max_rounds = " << s.max_rounds << '\n';
        return out.str();
    }

    std::string render_report_csv(const SimulationReport &report)
    {
        std::ostringstream out;
        out << "round,tests_executed,items_transferred,events_pending,events_detected\n";
        for (const auto &t : report.traces)
        {
            out << t.round << ',' << t.tests_executed() << ',' << t.items_transferred << ',' << t.events_pending << ','
                << t.events_detected << '\n';
        }
        out << "\npid,crash_round,detected_round,latency\n";
        for (const auto &e : report.events)
        {
            out << index_of(e.pid) << ',' << e.crash_round << ',';
            if (e.detected_round)
                out << *e.detected_round << ',' << *e.latency();
            else
                out << ',';
            out << '\n';
        }
        return out.str();
    }
}
