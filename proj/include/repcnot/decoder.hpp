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

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "repcnot/noise.hpp"
#include "repcnot/sampler.hpp"

namespace repcnot {

/// Observable flips as a bit pair: bit 0 = control, bit 1 = target.
using ObsMask = uint8_t;

inline bool obs_control(ObsMask m) {
    return m & 1;
}
inline bool obs_target(ObsMask m) {
    return m & 2;
}

struct Fault {
    int id = 0;
    int channel = 0;
    int term = 0;
    std::array<uint8_t, 2> paulis{0, 0};
    std::array<int, 2> qubits{-1, -1};
    int instruction = 0;
    Timing timing = Timing::After;
    int layer = 0;
    double p = 0;  // probability of this single term
    std::vector<uint32_t> detectors;
    ObsMask obs = 0;

    /// Human-readable location, e.g. "depol2 term 5 (X q3, Z q4) after CNOT@L12".
    std::string describe(const NoisyCircuit &noisy) const;
};

struct FaultCatalog {
    CodeSpec spec;
    std::vector<Fault> faults;
};

/// Every Pauli term of every channel (including zero-probability channels),
/// propagated deterministically to detectors and observables.
FaultCatalog enumerate_faults(const NoisyCircuit &noisy);

/// Propagates an arbitrary set of single-term faults together; returns the fired
/// detectors and observable flips of their combination.
std::pair<BitVector, ObsMask> propagate_faults(const NoisyCircuit &noisy, const std::vector<const Fault *> &faults);

enum class EdgeType : uint8_t { Space, Time, SpaceTime, GateFlow, Boundary };

std::string_view edge_type_name(EdgeType t);

struct GraphEdge {
    int u = 0;  // u < v; v == boundary for Boundary edges
    int v = 0;
    double p = 0;
    double weight = 0;
    EdgeType type = EdgeType::Space;
    ObsMask obs = 0;
};

struct SyndromeGraph {
    CodeSpec spec;
    int num_detectors = 0;
    std::vector<GraphEdge> edges;
    std::vector<std::string> warnings;
    int decomposed_faults = 0;

    int boundary() const {
        return num_detectors;
    }
    int num_nodes() const {
        return num_detectors + 1;
    }
    /// First edge with these endpoints (any observable mask), or -1.
    int find_edge(int u, int v) const;
};

/// Displacement-based edge type. `v` may be the boundary node.
EdgeType classify_edge(const CodeSpec &spec, int u, int v);

/// ln((1-p)/p) with p clamped into (0, 0.5].
double edge_weight(double p);

/// Combines independent mechanisms of one edge: p + q - 2pq.
inline double combine_probability(double p, double q) {
    return p + q - 2 * p * q;
}

/// Throws DecodeError on an undecomposable fault or an undetectable logical flip.
SyndromeGraph build_syndrome_graph(const FaultCatalog &catalog, const NoisyCircuit *noisy = nullptr);

nlohmann::json graph_to_json(const SyndromeGraph &graph);

struct DecodeResult {
    ObsMask obs = 0;
    std::vector<std::pair<int, int>> matching;  // second == boundary for boundary matches
    int64_t cost = 0;                           // integer total cost of the matching
    double weight = 0;                          // cost in weight units
};

/// Read-only decoder over a fixed graph: all-pairs shortest paths plus exact matching.
class Decoder {
   public:
    /// Weight units per integer cost unit is 2^-30.
    static constexpr double kCostScale = 1073741824.0;

    explicit Decoder(const SyndromeGraph &graph);

    const SyndromeGraph &graph() const {
        return graph_;
    }
    /// Shortest-path cost between nodes, -1 when disconnected.
    int64_t distance(int a, int b) const {
        return dist_[static_cast<size_t>(a) * nodes_ + b];
    }
    ObsMask path_obs(int a, int b) const {
        return pobs_[static_cast<size_t>(a) * nodes_ + b];
    }

    /// Throws DecodeError on a bad row length or a disconnected defect.
    DecodeResult decode(const BitVector &row) const;
    /// Exhaustive pairing search; throws ValidationError for more than 12 defects.
    DecodeResult decode_brute_force(const BitVector &row) const;

   private:
    std::vector<int> defects(const BitVector &row) const;

    SyndromeGraph graph_;
    int nodes_ = 0;
    std::vector<int64_t> dist_;
    std::vector<ObsMask> pobs_;
};

/// Corrected logical parities for every shot: raw final-data parity XOR decoded flips.
struct DecodedShots {
    std::vector<uint8_t> control;
    std::vector<uint8_t> target;
};

DecodedShots decode_all(const Decoder &decoder, const DetectionMatrix &m, int threads = 1);

}  // namespace repcnot
