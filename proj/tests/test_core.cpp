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

#include <array>
#include <map>
#include <random>

#include "repcnot/core.hpp"
#include "repcnot/errors.hpp"

using namespace repcnot;

namespace {

CodeSpec make_spec(int d, int rounds = 1, Basis basis = Basis::Z) {
    CodeSpec s;
    s.distance = d;
    s.rounds = rounds;
    s.basis = basis;
    s.initial_state = {basis, false, false};
    return s;
}

std::map<Role, int> role_counts(const Layout &layout) {
    std::map<Role, int> out;
    for (const auto &q : layout.qubits()) {
        out[q.role]++;
    }
    return out;
}

Instruction two_qubit(Gate g, int a, int b) {
    Instruction op;
    op.gate = g;
    op.targets = {a, b};
    return op;
}

Instruction one_qubit(Gate g, int a) {
    Instruction op;
    op.gate = g;
    op.targets = {a, -1};
    return op;
}

PauliFrame frame_of(int width, std::initializer_list<std::pair<int, char>> paulis) {
    PauliFrame f(width);
    for (auto [q, p] : paulis) {
        if (p == 'X' || p == 'Y') {
            f.x.set(q, true);
        }
        if (p == 'Z' || p == 'Y') {
            f.z.set(q, true);
        }
    }
    return f;
}

// Symplectic vector (x0, x1, z0, z1) times a 4x4 GF(2) matrix, column convention.
std::array<int, 4> symplectic_apply(const std::array<std::array<int, 4>, 4> &m, const std::array<int, 4> &v) {
    std::array<int, 4> out{};
    for (int r = 0; r < 4; r++) {
        for (int c = 0; c < 4; c++) {
            out[r] ^= m[r][c] & v[c];
        }
    }
    return out;
}

}  // namespace

TEST(CodeSpec, Validation) {
    EXPECT_NO_THROW(make_spec(3).validate());
    EXPECT_THROW(make_spec(4).validate(), ValidationError);
    EXPECT_THROW(make_spec(1).validate(), ValidationError);
    EXPECT_THROW(make_spec(3, 0).validate(), ValidationError);
    CodeSpec mixed = make_spec(3);
    mixed.initial_state = LogicalState::parse("+-");
    EXPECT_THROW(mixed.validate(), ValidationError);
    EXPECT_EQ(make_spec(5, 5).detector_count(), 2 * 4 * 11);
}

TEST(LogicalState, ParseAndName) {
    for (auto basis : {Basis::Z, Basis::X}) {
        for (const auto &s : LogicalState::all(basis)) {
            EXPECT_EQ(LogicalState::parse(s.name()), s);
        }
    }
    EXPECT_EQ(LogicalState::parse("-+").control, true);
    EXPECT_EQ(LogicalState::parse("-+").target, false);
    EXPECT_THROW(LogicalState::parse("0+"), ValidationError);
    EXPECT_THROW(LogicalState::parse("000"), ValidationError);
}

TEST(Layout, QubitCountsD3) {
    Layout layout = build_layout(make_spec(3));
    EXPECT_EQ(layout.qubits().size(), 21u);
    auto counts = role_counts(layout);
    EXPECT_EQ(counts[Role::Data], 6);
    EXPECT_EQ(counts[Role::Syndrome], 4);
    EXPECT_EQ(counts[Role::Flag], 8);
    EXPECT_EQ(counts[Role::Ancilla], 3);
}

TEST(Layout, QubitCountsD5AndD7) {
    Layout l5 = build_layout(make_spec(5));
    EXPECT_EQ(l5.qubits().size(), 39u);
    EXPECT_EQ(role_counts(l5)[Role::Syndrome], 8);
    EXPECT_EQ(build_layout(make_spec(7)).qubits().size(), 57u);
}

TEST(Layout, CanonicalChainOrder) {
    Layout layout = build_layout(make_spec(3));
    EXPECT_EQ(layout.data(Block::Control, 0), 0);
    EXPECT_EQ(layout.flag(Block::Control, 0), 1);
    EXPECT_EQ(layout.syndrome(Block::Control, 0), 2);
    EXPECT_EQ(layout.flag(Block::Control, 1), 3);
    EXPECT_EQ(layout.data(Block::Control, 1), 4);
    EXPECT_EQ(layout.data(Block::Target, 0), 9);
    EXPECT_EQ(layout.ancilla(0), 18);
    EXPECT_TRUE(layout.adjacent(layout.data(Block::Control, 2), layout.ancilla(2)));
    EXPECT_TRUE(layout.adjacent(layout.ancilla(2), layout.data(Block::Target, 2)));
    EXPECT_FALSE(layout.adjacent(layout.data(Block::Control, 0), layout.syndrome(Block::Control, 0)));
}

TEST(Layout, Deterministic) {
    EXPECT_EQ(build_layout(make_spec(5)), build_layout(make_spec(5)));
}

TEST(Layout, JsonRoundTrip) {
    Layout layout = build_layout(make_spec(5));
    nlohmann::json j = layout_to_json(layout);
    EXPECT_EQ(j["distance"], 5);
    EXPECT_EQ(j["qubits"][0]["role"], "data");
    EXPECT_EQ(j["qubits"][0]["block"], "control");
    EXPECT_EQ(layout_from_json(j), layout);
}

TEST(Layout, PhysicalMapMissingAncillaLinkNamesEdge) {
    CodeSpec spec = make_spec(3);
    Layout canonical = build_layout(spec);
    DeviceMap map;
    for (int i = 0; i < 21; i++) {
        map.physical.push_back(100 + i);
    }
    Edge dropped{canonical.data(Block::Control, 1), canonical.ancilla(1)};
    for (const auto &e : canonical.adjacency()) {
        if (e != Edge{std::min(dropped.first, dropped.second), std::max(dropped.first, dropped.second)}) {
            map.coupling.push_back({100 + e.first, 100 + e.second});
        }
    }
    try {
        build_layout(spec, map);
        FAIL() << "missing link accepted";
    } catch (const ValidationError &e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find(std::to_string(100 + dropped.first)), std::string::npos) << msg;
        EXPECT_NE(msg.find(std::to_string(100 + dropped.second)), std::string::npos) << msg;
    }
}

TEST(Layout, PhysicalMapSizeMismatch) {
    DeviceMap map;
    map.physical = {0, 1, 2};
    EXPECT_THROW(build_layout(make_spec(3), map), ValidationError);
}

TEST(Layout, PhysicalMapRelabels) {
    CodeSpec spec = make_spec(3);
    Layout canonical = build_layout(spec);
    DeviceMap map;
    for (int i = 0; i < 21; i++) {
        map.physical.push_back(2 * i);
    }
    for (const auto &e : canonical.adjacency()) {
        map.coupling.push_back({2 * e.first, 2 * e.second});
    }
    Layout mapped = build_layout(spec, map);
    EXPECT_EQ(mapped.data(Block::Target, 1), 2 * canonical.data(Block::Target, 1));
    EXPECT_EQ(mapped.width(), 41);
}

TEST(PropagateFrame, XOnControlSpreads) {
    PauliFrame f = propagate_frame(frame_of(2, {{0, 'X'}}), two_qubit(Gate::CNOT, 0, 1));
    EXPECT_EQ(f, frame_of(2, {{0, 'X'}, {1, 'X'}}));
}

TEST(PropagateFrame, ZOnControlStays) {
    PauliFrame f = propagate_frame(frame_of(2, {{0, 'Z'}}), two_qubit(Gate::CNOT, 0, 1));
    EXPECT_EQ(f, frame_of(2, {{0, 'Z'}}));
}

TEST(PropagateFrame, SingleQubitRules) {
    EXPECT_EQ(propagate_frame(frame_of(1, {{0, 'X'}}), one_qubit(Gate::H, 0)), frame_of(1, {{0, 'Z'}}));
    EXPECT_EQ(propagate_frame(frame_of(1, {{0, 'Y'}}), one_qubit(Gate::H, 0)), frame_of(1, {{0, 'Y'}}));
    EXPECT_EQ(propagate_frame(frame_of(1, {{0, 'Y'}}), one_qubit(Gate::X, 0)), frame_of(1, {{0, 'Y'}}));
    EXPECT_TRUE(propagate_frame(frame_of(1, {{0, 'Y'}}), one_qubit(Gate::ResetZ, 0)).is_identity());
    EXPECT_EQ(propagate_frame(frame_of(1, {{0, 'X'}}), one_qubit(Gate::MeasureZ, 0)), frame_of(1, {{0, 'X'}}));
    Instruction idle = one_qubit(Gate::Idle, 0);
    idle.duration = 1.0;
    EXPECT_EQ(propagate_frame(frame_of(1, {{0, 'Z'}}), idle), frame_of(1, {{0, 'Z'}}));
}

TEST(PropagateFrame, IdentityStaysIdentity) {
    for (Gate g : {Gate::ResetZ, Gate::H, Gate::X, Gate::MeasureZ, Gate::Idle}) {
        EXPECT_TRUE(propagate_frame(PauliFrame(2), one_qubit(g, 1)).is_identity());
    }
    for (Gate g : {Gate::CNOT, Gate::CZ}) {
        EXPECT_TRUE(propagate_frame(PauliFrame(2), two_qubit(g, 0, 1)).is_identity());
    }
}

TEST(PropagateFrame, TwoQubitGatesMatchSymplecticOracle) {
    // Rows/columns ordered (x_a, x_b, z_a, z_b).
    const std::array<std::array<int, 4>, 4> cnot{{{1, 0, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 0, 1}}};
    const std::array<std::array<int, 4>, 4> cz{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 1, 1, 0}, {1, 0, 0, 1}}};
    for (auto [gate, matrix] : {std::pair{Gate::CNOT, cnot}, std::pair{Gate::CZ, cz}}) {
        for (auto [a, b] : {std::pair{0, 1}, std::pair{1, 0}}) {
            for (int input = 0; input < 16; input++) {
                std::array<int, 4> v{input & 1, (input >> 1) & 1, (input >> 2) & 1, (input >> 3) & 1};
                PauliFrame f(2);
                f.x.set(a, v[0]);
                f.x.set(b, v[1]);
                f.z.set(a, v[2]);
                f.z.set(b, v[3]);
                PauliFrame got = propagate_frame(f, two_qubit(gate, a, b));
                auto want = symplectic_apply(matrix, v);
                EXPECT_EQ(got.x.get(a), want[0] == 1) << gate_name(gate) << " input " << input;
                EXPECT_EQ(got.x.get(b), want[1] == 1) << gate_name(gate) << " input " << input;
                EXPECT_EQ(got.z.get(a), want[2] == 1) << gate_name(gate) << " input " << input;
                EXPECT_EQ(got.z.get(b), want[3] == 1) << gate_name(gate) << " input " << input;
            }
        }
    }
}

TEST(PropagateFrame, GroupAction) {
    std::mt19937_64 rng(11);
    const int width = 6;
    std::vector<Instruction> ops = {two_qubit(Gate::CNOT, 0, 3), two_qubit(Gate::CZ, 2, 5), one_qubit(Gate::H, 4),
                                    one_qubit(Gate::X, 1), one_qubit(Gate::ResetZ, 2), one_qubit(Gate::MeasureZ, 0)};
    for (int trial = 0; trial < 200; trial++) {
        PauliFrame a(width), b(width);
        for (int q = 0; q < width; q++) {
            a.x.set(q, rng() & 1);
            a.z.set(q, rng() & 1);
            b.x.set(q, rng() & 1);
            b.z.set(q, rng() & 1);
        }
        for (const auto &op : ops) {
            EXPECT_EQ(propagate_frame(a, op) ^ propagate_frame(b, op), propagate_frame(a ^ b, op));
        }
    }
}
