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

#include "repcnot/decoder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "repcnot/errors.hpp"
#include "repcnot/matching.hpp"

namespace repcnot {

namespace {

struct Injection {
    size_t pos;  // schedule position of the channel
    int lane;
    std::array<uint8_t, 2> paulis;
    std::array<int, 2> qubits;
};

// Runs the noiseless schedule with the given deterministic Paulis; returns record flips per lane.
void run_injected(const NoisyCircuit &noisy, std::vector<Injection> injections, FrameBatch &frame) {
    frame.clear();
    if (injections.empty()) {
        return;
    }
    std::sort(injections.begin(), injections.end(), [](const Injection &a, const Injection &b) { return a.pos < b.pos; });
    size_t next = 0;
    const auto &instrs = noisy.base.instructions;
    // The frame is the identity before the first injection, so start there.
    for (size_t pos = injections.front().pos; pos < noisy.schedule.size(); pos++) {
        const ScheduledOp &s = noisy.schedule[pos];
        if (!s.is_channel) {
            frame.apply(instrs[s.index]);
            continue;
        }
        while (next < injections.size() && injections[next].pos == pos) {
            const Injection &inj = injections[next++];
            uint64_t bit = uint64_t{1} << inj.lane;
            frame.apply_pauli(inj.qubits[0], inj.paulis[0], bit);
            if (inj.qubits[1] >= 0) {
                frame.apply_pauli(inj.qubits[1], inj.paulis[1], bit);
            }
        }
    }
}

std::pair<BitVector, ObsMask> lane_result(const NoisyCircuit &noisy, const FrameBatch &frame, int lane) {
    const Circuit &c = noisy.base;
    BitVector flips(c.records.size());
    const auto &rec = frame.records();
    for (size_t slot = 0; slot < rec.size(); slot++) {
        if ((rec[slot] >> lane) & 1) {
            flips.set(slot, true);
        }
    }
    ObsMask obs = 0;
    for (Block b : {Block::Control, Block::Target}) {
        bool parity = false;
        for (int k = 0; k < c.spec.distance; k++) {
            parity ^= flips.get(c.data_slot(b, k));
        }
        if (parity) {
            obs |= b == Block::Control ? 1 : 2;
        }
    }
    return {detectors_from_flips(flips, c), obs};
}

std::vector<size_t> channel_positions(const NoisyCircuit &noisy) {
    std::vector<size_t> pos(noisy.channels.size());
    for (size_t i = 0; i < noisy.schedule.size(); i++) {
        if (noisy.schedule[i].is_channel) {
            pos[noisy.schedule[i].index] = i;
        }
    }
    return pos;
}

char pauli_char(uint8_t p) {
    return "IXYZ"[p & 3];
}

}  // namespace

std::string Fault::describe(const NoisyCircuit &noisy) const {
    const NoiseChannel &ch = noisy.channels[channel];
    const Instruction &op = noisy.base.instructions[instruction];
    std::ostringstream out;
    out << channel_kind_name(ch.kind) << " term " << term << " (" << pauli_char(paulis[0]) << " q" << qubits[0];
    if (qubits[1] >= 0) {
        out << ", " << pauli_char(paulis[1]) << " q" << qubits[1];
    }
    out << ") " << (timing == Timing::Before ? "before " : "after ") << gate_name(op.gate) << "@L" << layer;
    return out.str();
}

FaultCatalog enumerate_faults(const NoisyCircuit &noisy) {
    FaultCatalog cat;
    cat.spec = noisy.base.spec;
    auto positions = channel_positions(noisy);
    for (size_t c = 0; c < noisy.channels.size(); c++) {
        const NoiseChannel &ch = noisy.channels[c];
        for (int t = 0; t < ch.num_terms(); t++) {
            Fault f;
            f.id = static_cast<int>(cat.faults.size());
            f.channel = static_cast<int>(c);
            f.term = t;
            f.paulis = channel_term_paulis(ch.kind, t);
            f.qubits = ch.qubits;
            if (ch.arity() == 1) {
                f.qubits[1] = -1;
                f.paulis[1] = 0;
            }
            f.instruction = ch.instruction;
            f.timing = ch.timing;
            f.layer = ch.layer;
            f.p = ch.p / ch.num_terms();
            cat.faults.push_back(f);
        }
    }
    FrameBatch frame(noisy.base.layout.width(), static_cast<int>(noisy.base.records.size()));
    for (size_t first = 0; first < cat.faults.size(); first += 64) {
        size_t count = std::min<size_t>(64, cat.faults.size() - first);
        std::vector<Injection> inj;
        for (size_t l = 0; l < count; l++) {
            const Fault &f = cat.faults[first + l];
            inj.push_back({positions[f.channel], static_cast<int>(l), f.paulis, f.qubits});
        }
        run_injected(noisy, inj, frame);
        for (size_t l = 0; l < count; l++) {
            auto [det, obs] = lane_result(noisy, frame, static_cast<int>(l));
            Fault &f = cat.faults[first + l];
            f.detectors = det.set_bits();
            f.obs = obs;
        }
    }
    return cat;
}

std::pair<BitVector, ObsMask> propagate_faults(const NoisyCircuit &noisy, const std::vector<const Fault *> &faults) {
    auto positions = channel_positions(noisy);
    std::vector<Injection> inj;
    for (const Fault *f : faults) {
        inj.push_back({positions[f->channel], 0, f->paulis, f->qubits});
    }
    FrameBatch frame(noisy.base.layout.width(), static_cast<int>(noisy.base.records.size()));
    run_injected(noisy, inj, frame);
    return lane_result(noisy, frame, 0);
}

std::string_view edge_type_name(EdgeType t) {
    switch (t) {
        case EdgeType::Space:
            return "space";
        case EdgeType::Time:
            return "time";
        case EdgeType::SpaceTime:
            return "space_time";
        case EdgeType::GateFlow:
            return "gate_flow";
        case EdgeType::Boundary:
            return "boundary";
    }
    return "?";
}

EdgeType classify_edge(const CodeSpec &spec, int u, int v) {
    int boundary = spec.detector_count();
    if (u == boundary || v == boundary) {
        return EdgeType::Boundary;
    }
    auto a = detector_label(spec, u);
    auto b = detector_label(spec, v);
    if (a.block != b.block) {
        return EdgeType::GateFlow;
    }
    int dk = std::abs(a.k - b.k);
    int ds = std::abs(a.sr - b.sr);
    if (dk == 0 && ds == 1) {
        return EdgeType::Time;
    }
    if (dk == 1 && ds == 0) {
        return EdgeType::Space;
    }
    return EdgeType::SpaceTime;
}

double edge_weight(double p) {
    p = std::clamp(p, std::numeric_limits<double>::min(), 0.5);
    return std::log((1 - p) / p);
}

int SyndromeGraph::find_edge(int u, int v) const {
    if (u > v) {
        std::swap(u, v);
    }
    for (size_t i = 0; i < edges.size(); i++) {
        if (edges[i].u == u && edges[i].v == v) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

namespace {

using EdgeKey = std::tuple<int, int, ObsMask>;

int type_rank(EdgeType t) {
    return static_cast<int>(t);  // Space < Time < SpaceTime < GateFlow < Boundary
}

struct Component {
    int u, v;
    ObsMask obs;
    bool is_new;
};

class Decomposer {
   public:
    Decomposer(const CodeSpec &spec, const std::map<std::pair<int, int>, std::vector<ObsMask>> &existing)
        : spec_(spec), existing_(existing), boundary_(spec.detector_count()) {
    }

    bool run(const std::vector<uint32_t> &dets, ObsMask target, bool allow_new, std::vector<Component> &out) {
        dets_ = dets;
        target_ = target;
        allow_new_ = allow_new;
        chosen_.clear();
        uint32_t all = dets.size() >= 32 ? ~0u : ((1u << dets.size()) - 1);
        if (!dfs(all, 0, false)) {
            return false;
        }
        out = chosen_;
        return true;
    }

   private:
    struct Option {
        int rank;
        int partner;  // index into dets_, or -1 for boundary
        ObsMask obs;
    };

    bool dfs(uint32_t remaining, ObsMask acc, bool used_new) {
        if (remaining == 0) {
            if (used_new) {
                for (auto &c : chosen_) {
                    if (c.is_new) {
                        c.obs = acc ^ target_;
                    }
                }
                return true;
            }
            return acc == target_;
        }
        int i = std::countr_zero(remaining);
        uint32_t rest = remaining & ~(1u << i);
        int a = static_cast<int>(dets_[i]);
        std::vector<Option> options;
        for (int j = -1; j < static_cast<int>(dets_.size()); j++) {
            if (j >= 0 && !((rest >> j) & 1)) {
                continue;
            }
            int b = j < 0 ? boundary_ : static_cast<int>(dets_[j]);
            auto it = existing_.find({std::min(a, b), std::max(a, b)});
            if (it == existing_.end()) {
                continue;
            }
            int rank = type_rank(classify_edge(spec_, a, b));
            for (ObsMask o : it->second) {
                options.push_back({rank, j, o});
            }
        }
        std::stable_sort(options.begin(), options.end(), [](const Option &x, const Option &y) {
            return std::tie(x.rank, x.partner, x.obs) < std::tie(y.rank, y.partner, y.obs);
        });
        for (const auto &o : options) {
            int b = o.partner < 0 ? boundary_ : static_cast<int>(dets_[o.partner]);
            uint32_t next = o.partner < 0 ? rest : rest & ~(1u << o.partner);
            chosen_.push_back({std::min(a, b), std::max(a, b), o.obs, false});
            if (dfs(next, acc ^ o.obs, used_new)) {
                return true;
            }
            chosen_.pop_back();
        }
        if (allow_new_ && !used_new && std::popcount(remaining) <= 2) {
            // The remainder becomes one new component.
            int b = boundary_;
            uint32_t next = rest;
            if (rest) {
                int j = std::countr_zero(rest);
                b = static_cast<int>(dets_[j]);
                next = 0;
            }
            chosen_.push_back({std::min(a, b), std::max(a, b), 0, true});
            if (dfs(next, acc, true)) {
                return true;
            }
            chosen_.pop_back();
        }
        return false;
    }

    const CodeSpec &spec_;
    const std::map<std::pair<int, int>, std::vector<ObsMask>> &existing_;
    int boundary_;
    std::vector<uint32_t> dets_;
    ObsMask target_ = 0;
    bool allow_new_ = false;
    std::vector<Component> chosen_;
};

// A fault spanning both blocks splits into one part per block; each part carries
// the observable bit of its own block.
bool decompose_by_block(Decomposer &dec, const CodeSpec &spec, const Fault &f, std::vector<Component> &out) {
    std::vector<uint32_t> control, target;
    for (uint32_t det : f.detectors) {
        (detector_label(spec, static_cast<int>(det)).block == Block::Control ? control : target).push_back(det);
    }
    if (control.empty() || target.empty()) {
        return false;
    }
    out.clear();
    for (auto [part, mask] : {std::pair{&control, ObsMask{1}}, std::pair{&target, ObsMask{2}}}) {
        std::vector<Component> sub;
        ObsMask want = f.obs & mask;
        if (!dec.run(*part, want, false, sub) && !dec.run(*part, want, true, sub)) {
            return false;
        }
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return true;
}

}  // namespace

SyndromeGraph build_syndrome_graph(const FaultCatalog &catalog, const NoisyCircuit *noisy) {
    SyndromeGraph g;
    g.spec = catalog.spec;
    g.num_detectors = catalog.spec.detector_count();
    int boundary = g.boundary();
    std::map<EdgeKey, double> prob;
    auto where = [&](const Fault &f) {
        return noisy ? f.describe(*noisy) : "fault " + std::to_string(f.id);
    };
    auto add = [&](int u, int v, ObsMask obs, double p) {
        EdgeKey key{std::min(u, v), std::max(u, v), obs};
        auto it = prob.find(key);
        if (it == prob.end()) {
            prob.emplace(key, p);
        } else {
            it->second = combine_probability(it->second, p);
        }
    };

    for (const auto &f : catalog.faults) {
        if (f.detectors.empty() && f.obs) {
            throw DecodeError("undetectable logical flip from " + where(f));
        }
        if (f.p <= 0 || f.detectors.empty() || f.detectors.size() > 2) {
            continue;
        }
        if (f.detectors.size() == 1) {
            add(static_cast<int>(f.detectors[0]), boundary, f.obs, f.p);
        } else {
            add(static_cast<int>(f.detectors[0]), static_cast<int>(f.detectors[1]), f.obs, f.p);
        }
    }

    std::map<std::pair<int, int>, std::vector<ObsMask>> existing;
    for (const auto &[key, p] : prob) {
        existing[{std::get<0>(key), std::get<1>(key)}].push_back(std::get<2>(key));
    }
    Decomposer dec(catalog.spec, existing);
    for (const auto &f : catalog.faults) {
        if (f.p <= 0 || f.detectors.size() <= 2) {
            continue;
        }
        if (f.detectors.size() > 16) {
            throw DecodeError("fault fires too many detectors: " + where(f));
        }
        std::vector<Component> parts;
        if (!decompose_by_block(dec, catalog.spec, f, parts) && !dec.run(f.detectors, f.obs, false, parts) &&
            !dec.run(f.detectors, f.obs, true, parts)) {
            std::ostringstream msg;
            msg << "cannot decompose " << f.detectors.size() << "-detector fault " << where(f) << " into graph edges";
            throw DecodeError(msg.str());
        }
        for (const auto &c : parts) {
            add(c.u, c.v, c.obs, f.p);
        }
        g.decomposed_faults++;
    }

    for (const auto &[key, p] : prob) {
        auto [u, v, obs] = key;
        GraphEdge e;
        e.u = u;
        e.v = v;
        e.obs = obs;
        e.p = p;
        if (p > 0.5) {
            std::ostringstream msg;
            msg << "edge (" << u << ", " << v << ") probability " << p << " clamped to 0.5";
            g.warnings.push_back(msg.str());
            e.p = 0.5;
        }
        e.weight = edge_weight(e.p);
        e.type = classify_edge(catalog.spec, u, v);
        g.edges.push_back(e);
    }
    return g;
}

nlohmann::json graph_to_json(const SyndromeGraph &g) {
    nlohmann::json nodes = nlohmann::json::array();
    for (int i = 0; i < g.num_detectors; i++) {
        auto l = detector_label(g.spec, i);
        nodes.push_back({{"id", i}, {"block", block_name(l.block)}, {"k", l.k}, {"sr", l.sr}});
    }
    nodes.push_back({{"id", g.boundary()}, {"boundary", true}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto &e : g.edges) {
        edges.push_back({{"u", e.u},
                         {"v", e.v},
                         {"p", e.p},
                         {"w", e.weight},
                         {"type", edge_type_name(e.type)},
                         {"obs", {obs_control(e.obs), obs_target(e.obs)}}});
    }
    return {{"spec", code_spec_to_json(g.spec)}, {"nodes", nodes}, {"edges", edges}};
}

// ---------------------------------------------------------------------------

namespace {

constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;

}  // namespace

Decoder::Decoder(const SyndromeGraph &graph) : graph_(graph), nodes_(graph.num_nodes()) {
    size_t n = static_cast<size_t>(nodes_);
    dist_.assign(n * n, kInf);
    pobs_.assign(n * n, 0);
    for (size_t i = 0; i < n; i++) {
        dist_[i * n + i] = 0;
    }
    for (const auto &e : graph_.edges) {
        int64_t c = std::llround(e.weight * kCostScale);
        size_t a = e.u, b = e.v;
        if (c < dist_[a * n + b]) {
            dist_[a * n + b] = dist_[b * n + a] = c;
            pobs_[a * n + b] = pobs_[b * n + a] = e.obs;
        }
    }
    for (size_t k = 0; k < n; k++) {
        for (size_t i = 0; i < n; i++) {
            int64_t dik = dist_[i * n + k];
            if (dik >= kInf) {
                continue;
            }
            for (size_t j = 0; j < n; j++) {
                int64_t c = dik + dist_[k * n + j];
                if (c < dist_[i * n + j]) {
                    dist_[i * n + j] = c;
                    pobs_[i * n + j] = pobs_[i * n + k] ^ pobs_[k * n + j];
                }
            }
        }
    }
    for (auto &d : dist_) {
        if (d >= kInf) {
            d = -1;
        }
    }
}

std::vector<int> Decoder::defects(const BitVector &row) const {
    if (static_cast<int>(row.size()) != graph_.num_detectors) {
        throw DecodeError("detector row has " + std::to_string(row.size()) + " bits, graph has " +
                          std::to_string(graph_.num_detectors) + " detectors");
    }
    std::vector<int> out;
    for (uint32_t i : row.set_bits()) {
        out.push_back(static_cast<int>(i));
    }
    int b = graph_.boundary();
    for (int a : out) {
        bool ok = distance(a, b) >= 0;
        for (int c : out) {
            ok = ok || (c != a && distance(a, c) >= 0);
        }
        if (!ok) {
            throw DecodeError("defect " + std::to_string(a) + " has no path to another defect or the boundary");
        }
    }
    return out;
}

DecodeResult Decoder::decode(const BitVector &row) const {
    auto det = defects(row);
    DecodeResult res;
    int n = static_cast<int>(det.size());
    if (n == 0) {
        return res;
    }
    int b = graph_.boundary();
    int m = 2 * n;
    std::vector<int64_t> cost(static_cast<size_t>(m) * m, -1);
    auto at = [&](int i, int j) -> int64_t & { return cost[static_cast<size_t>(i) * m + j]; };
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) {
            at(i, j) = at(j, i) = distance(det[i], det[j]);
        }
        at(i, n + i) = at(n + i, i) = distance(det[i], b);
        for (int j = i + 1; j < n; j++) {
            at(n + i, n + j) = at(n + j, n + i) = 0;
        }
    }
    auto mate = min_cost_perfect_matching(m, cost);
    if (mate.empty()) {
        throw DecodeError("no perfect matching exists for this detector row");
    }
    for (int i = 0; i < n; i++) {
        int j = mate[i];
        if (j < n) {
            if (i < j) {
                res.matching.emplace_back(det[i], det[j]);
                res.obs ^= path_obs(det[i], det[j]);
                res.cost += distance(det[i], det[j]);
            }
        } else {
            res.matching.emplace_back(det[i], b);
            res.obs ^= path_obs(det[i], b);
            res.cost += distance(det[i], b);
        }
    }
    res.weight = static_cast<double>(res.cost) / kCostScale;
    return res;
}

DecodeResult Decoder::decode_brute_force(const BitVector &row) const {
    auto det = defects(row);
    int n = static_cast<int>(det.size());
    if (n > 12) {
        throw ValidationError("brute-force decoding supports at most 12 defects, got " + std::to_string(n));
    }
    int b = graph_.boundary();
    DecodeResult best;
    best.cost = -1;
    std::vector<std::pair<int, int>> cur;
    std::function<void(uint32_t, int64_t, ObsMask)> rec = [&](uint32_t left, int64_t cost, ObsMask obs) {
        if (best.cost >= 0 && cost > best.cost) {
            return;
        }
        if (left == 0) {
            if (best.cost < 0 || cost < best.cost) {
                best.cost = cost;
                best.obs = obs;
                best.matching = cur;
            }
            return;
        }
        int i = std::countr_zero(left);
        uint32_t rest = left & ~(1u << i);
        int64_t db = distance(det[i], b);
        if (db >= 0) {
            cur.emplace_back(det[i], b);
            rec(rest, cost + db, obs ^ path_obs(det[i], b));
            cur.pop_back();
        }
        for (uint32_t r = rest; r; r &= r - 1) {
            int j = std::countr_zero(r);
            int64_t dij = distance(det[i], det[j]);
            if (dij < 0) {
                continue;
            }
            cur.emplace_back(det[i], det[j]);
            rec(rest & ~(1u << j), cost + dij, obs ^ path_obs(det[i], det[j]));
            cur.pop_back();
        }
    };
    rec(n >= 32 ? ~0u : (1u << n) - 1, 0, 0);
    if (best.cost < 0) {
        throw DecodeError("no perfect matching exists for this detector row");
    }
    best.weight = static_cast<double>(best.cost) / kCostScale;
    return best;
}

DecodedShots decode_all(const Decoder &decoder, const DetectionMatrix &m, int threads) {
    size_t shots = m.shots();
    DecodedShots out;
    out.control.resize(shots);
    out.target.resize(shots);
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&]() {
        try {
            constexpr size_t kChunk = 256;
            for (size_t begin = next.fetch_add(kChunk); begin < shots && !failed; begin = next.fetch_add(kChunk)) {
                size_t end = std::min(shots, begin + kChunk);
                for (size_t s = begin; s < end; s++) {
                    ObsMask obs = decoder.decode(m.detections.row(s)).obs;
                    out.control[s] = m.raw_parity(s, Block::Control) ^ obs_control(obs);
                    out.target[s] = m.raw_parity(s, Block::Target) ^ obs_target(obs);
                }
            }
        } catch (...) {
            if (!failed.exchange(true)) {
                error = std::current_exception();
            }
        }
    };
    int t = std::max(1, threads);
    std::vector<std::thread> pool;
    for (int i = 1; i < t; i++) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

}  // namespace repcnot
