// Copyright 2026 The repcnot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "repcnot/matching.hpp"

using namespace repcnot;

namespace {

constexpr int64_t kNone = -1;

// Minimum perfect-matching cost by exhaustive recursion; kNone when none exists.
int64_t brute_min_cost(int n, const std::vector<int64_t> &cost, std::vector<bool> &used) {
    int first = -1;
    for (int i = 0; i < n; i++) {
        if (!used[i]) {
            first = i;
            break;
        }
    }
    if (first < 0) {
        return 0;
    }
    used[first] = true;
    int64_t best = kNone;
    for (int j = first + 1; j < n; j++) {
        int64_t c = cost[first * n + j];
        if (used[j] || c < 0) {
            continue;
        }
        used[j] = true;
        int64_t rest = brute_min_cost(n, cost, used);
        used[j] = false;
        if (rest >= 0 && (best < 0 || c + rest < best)) {
            best = c + rest;
        }
    }
    used[first] = false;
    return best;
}

int64_t matching_cost(int n, const std::vector<int64_t> &cost, const std::vector<int> &mate) {
    int64_t total = 0;
    for (int i = 0; i < n; i++) {
        EXPECT_GE(mate[i], 0);
        EXPECT_EQ(mate[mate[i]], i);
        if (i < mate[i]) {
            total += cost[i * n + mate[i]];
        }
    }
    return total;
}

int64_t weight_of(const std::vector<WeightedEdge> &edges, const std::vector<int> &mate) {
    int64_t total = 0;
    for (const auto &e : edges) {
        if (mate[e.u] == e.v) {
            total += e.w;
        }
    }
    return total;
}

int64_t brute_max_weight(int n, const std::vector<WeightedEdge> &edges, size_t idx, std::vector<bool> &used) {
    if (idx == edges.size()) {
        return 0;
    }
    int64_t best = brute_max_weight(n, edges, idx + 1, used);
    const auto &e = edges[idx];
    if (!used[e.u] && !used[e.v]) {
        used[e.u] = used[e.v] = true;
        best = std::max(best, e.w + brute_max_weight(n, edges, idx + 1, used));
        used[e.u] = used[e.v] = false;
    }
    return best;
}

}  // namespace

TEST(MaxWeightMatching, Empty) {
    EXPECT_TRUE(max_weight_matching(0, {}, false).empty());
    EXPECT_EQ(max_weight_matching(3, {}, false), (std::vector<int>{-1, -1, -1}));
}

TEST(MaxWeightMatching, SingleEdge) {
    EXPECT_EQ(max_weight_matching(2, {{0, 1, 1}}, false), (std::vector<int>{1, 0}));
}

TEST(MaxWeightMatching, PrefersHeavyMiddleUnlessMaxCardinality) {
    std::vector<WeightedEdge> edges = {{0, 1, 2}, {1, 2, 5}, {2, 3, 2}};
    EXPECT_EQ(max_weight_matching(4, edges, false), (std::vector<int>{-1, 2, 1, -1}));
    EXPECT_EQ(max_weight_matching(4, edges, true), (std::vector<int>{1, 0, 3, 2}));
}

TEST(MaxWeightMatching, BlossomCase) {
    // Odd cycle 0-1-2 with a pendant; requires blossom handling.
    std::vector<WeightedEdge> edges = {{0, 1, 8}, {0, 2, 9}, {1, 2, 10}, {2, 3, 7}};
    EXPECT_EQ(max_weight_matching(4, edges, false), (std::vector<int>{1, 0, 3, 2}));
    // Nested blossom with expansion.
    std::vector<WeightedEdge> nested = {{1, 2, 19}, {1, 3, 18}, {2, 3, 13}, {2, 4, 7}, {3, 5, 7},
                                        {4, 5, 6},  {4, 6, 6},  {5, 7, 6},  {6, 7, 10}};
    auto mate = max_weight_matching(8, nested, false);
    std::vector<bool> used(8, false);
    EXPECT_EQ(weight_of(nested, mate), brute_max_weight(8, nested, 0, used));
}

TEST(MaxWeightMatching, RandomGraphsAgreeWithBruteForce) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 400; trial++) {
        int n = 2 + int(rng() % 9);
        std::vector<WeightedEdge> edges;
        for (int i = 0; i < n; i++) {
            for (int j = i + 1; j < n; j++) {
                if (rng() % 3 != 0) {
                    edges.push_back({i, j, int64_t(rng() % 20)});
                }
            }
        }
        auto mate = max_weight_matching(n, edges, false);
        for (int i = 0; i < n; i++) {
            if (mate[i] >= 0) {
                EXPECT_EQ(mate[mate[i]], i);
            }
        }
        std::vector<bool> used(n, false);
        EXPECT_EQ(weight_of(edges, mate), brute_max_weight(n, edges, 0, used)) << "trial " << trial;
    }
}

TEST(MinCostPerfectMatching, RandomCompleteGraphs) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 300; trial++) {
        int n = 2 * (1 + int(rng() % 6));
        std::vector<int64_t> cost(n * n, 0);
        for (int i = 0; i < n; i++) {
            for (int j = i + 1; j < n; j++) {
                cost[i * n + j] = cost[j * n + i] = int64_t(rng() % (int64_t{1} << 40));
            }
        }
        auto mate = min_cost_perfect_matching(n, cost);
        ASSERT_EQ(static_cast<int>(mate.size()), n);
        std::vector<bool> used(n, false);
        EXPECT_EQ(matching_cost(n, cost, mate), brute_min_cost(n, cost, used)) << "trial " << trial;
    }
}

TEST(MinCostPerfectMatching, SparseAndImpossible) {
    // Path 0-1-2-3 forces the outer pairs.
    std::vector<int64_t> cost(16, kNone);
    auto link = [&](int a, int b, int64_t c) { cost[a * 4 + b] = cost[b * 4 + a] = c; };
    link(0, 1, 100);
    link(1, 2, 1);
    link(2, 3, 100);
    EXPECT_EQ(min_cost_perfect_matching(4, cost), (std::vector<int>{1, 0, 3, 2}));
    std::vector<int64_t> star(16, kNone);
    for (int j = 1; j < 4; j++) {
        star[j] = star[j * 4] = 1;
    }
    EXPECT_TRUE(min_cost_perfect_matching(4, star).empty());
    EXPECT_TRUE(min_cost_perfect_matching(0, {}).empty());
}
