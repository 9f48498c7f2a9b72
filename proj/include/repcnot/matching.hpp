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

#pragma once

#include <cstdint>
#include <vector>

namespace repcnot {

struct WeightedEdge {
    int u = 0;
    int v = 0;
    int64_t w = 0;
};

/// Maximum-weight matching on a general graph (Edmonds' blossom algorithm,
/// O(n^3)), integer weights. With `max_cardinality` the matching has maximum
/// cardinality first and maximum weight among those.
///
/// Returns mate[v], or -1 for unmatched vertices.
std::vector<int> max_weight_matching(int num_vertices, const std::vector<WeightedEdge> &edges,
                                     bool max_cardinality);

/// Minimum-cost perfect matching on a complete-ish graph given by `cost`
/// (n x n, symmetric, negative = no edge). Returns mate, or an empty vector
/// when no perfect matching exists.
std::vector<int> min_cost_perfect_matching(int n, const std::vector<int64_t> &cost);

}  // namespace repcnot
