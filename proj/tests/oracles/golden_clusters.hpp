#pragma once

// Reference data for vCube clusters at n = 8, shared by the unit tests and the acceptance run.

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace diagfd::oracle
{
    // Literal transcription of c(i,s) = { i^2^(s-1), c(i^2^(s-1),1), ..., c(i^2^(s-1),s-1) }.
    inline std::vector<std::size_t> cluster_by_recursion(std::size_t i, unsigned s)
    {
        const std::size_t head = i ^ (std::size_t{1} << (s - 1));
        std::vector<std::size_t> out{head};
        for (unsigned t = 1; t < s; ++t)
        {
            const auto sub = cluster_by_recursion(head, t);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }

    // Golden clusters for n = 8, columns c(0..7, s), rows s = 1..3. The c(5,3) cell is printed as "1,0,32";
    // the recursion gives 1,0,3,2.
    inline const std::map<std::pair<std::size_t, unsigned>, std::vector<std::size_t>> kGoldenClusters{
        {{0, 1}, {1}}, {{1, 1}, {0}}, {{2, 1}, {3}}, {{3, 1}, {2}},
        {{4, 1}, {5}}, {{5, 1}, {4}}, {{6, 1}, {7}}, {{7, 1}, {6}},
        {{0, 2}, {2, 3}}, {{1, 2}, {3, 2}}, {{2, 2}, {0, 1}}, {{3, 2}, {1, 0}},
        {{4, 2}, {6, 7}}, {{5, 2}, {7, 6}}, {{6, 2}, {4, 5}}, {{7, 2}, {5, 4}},
        {{0, 3}, {4, 5, 6, 7}}, {{1, 3}, {5, 4, 7, 6}}, {{2, 3}, {6, 7, 4, 5}}, {{3, 3}, {7, 6, 5, 4}},
        {{4, 3}, {0, 1, 2, 3}}, {{6, 3}, {2, 3, 0, 1}}, {{7, 3}, {3, 2, 1, 0}},
    };
}
