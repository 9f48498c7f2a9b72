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

#include "repcnot/core.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "repcnot/errors.hpp"

namespace repcnot {

std::string_view basis_name(Basis b) {
    return b == Basis::Z ? "z" : "x";
}

Basis parse_basis(std::string_view text) {
    if (text == "z" || text == "Z") {
        return Basis::Z;
    }
    if (text == "x" || text == "X") {
        return Basis::X;
    }
    throw ValidationError("unknown basis '" + std::string(text) + "' (expected z or x)");
}

std::string LogicalState::name() const {
    std::string s(2, ' ');
    if (basis == Basis::Z) {
        s[0] = control ? '1' : '0';
        s[1] = target ? '1' : '0';
    } else {
        s[0] = control ? '-' : '+';
        s[1] = target ? '-' : '+';
    }
    return s;
}

LogicalState LogicalState::parse(std::string_view text) {
    auto bad = [&] { return ValidationError("unknown logical state '" + std::string(text) + "'"); };
    if (text.size() != 2) {
        throw bad();
    }
    auto is_z = [](char c) { return c == '0' || c == '1'; };
    auto is_x = [](char c) { return c == '+' || c == '-'; };
    if (is_z(text[0]) && is_z(text[1])) {
        return {Basis::Z, text[0] == '1', text[1] == '1'};
    }
    if (is_x(text[0]) && is_x(text[1])) {
        return {Basis::X, text[0] == '-', text[1] == '-'};
    }
    throw bad();
}

std::array<LogicalState, 4> LogicalState::all(Basis basis) {
    return {{{basis, false, false}, {basis, false, true}, {basis, true, false}, {basis, true, true}}};
}

void CodeSpec::validate() const {
    if (distance < 3 || distance % 2 == 0) {
        throw ValidationError("distance must be odd and >= 3, got " + std::to_string(distance));
    }
    if (rounds < 1) {
        throw ValidationError("rounds must be >= 1, got " + std::to_string(rounds));
    }
    if (initial_state.basis != basis) {
        throw ValidationError("initial state |" + initial_state.name() + "> does not belong to the " +
                              std::string(basis_name(basis)) + " basis");
    }
}

std::string_view role_name(Role r) {
    switch (r) {
        case Role::Data:
            return "data";
        case Role::Flag:
            return "flag";
        case Role::Syndrome:
            return "syndrome";
        case Role::Ancilla:
            return "ancilla";
    }
    return "?";
}

std::string_view block_name(Block b) {
    switch (b) {
        case Block::Control:
            return "control";
        case Block::Target:
            return "target";
        case Block::Shared:
            return "shared";
    }
    return "?";
}

namespace {

Role parse_role(std::string_view s) {
    for (Role r : {Role::Data, Role::Flag, Role::Syndrome, Role::Ancilla}) {
        if (role_name(r) == s) {
            return r;
        }
    }
    throw ValidationError("unknown qubit role '" + std::string(s) + "'");
}

Block parse_block(std::string_view s) {
    for (Block b : {Block::Control, Block::Target, Block::Shared}) {
        if (block_name(b) == s) {
            return b;
        }
    }
    throw ValidationError("unknown block '" + std::string(s) + "'");
}

Edge ordered(int a, int b) {
    return a < b ? Edge{a, b} : Edge{b, a};
}

// Links every layout must contain, as pairs of canonical slots.
std::vector<Edge> required_links(int d) {
    int per_block = 4 * d - 3;
    std::vector<Edge> links;
    for (int b = 0; b < 2; b++) {
        for (int i = 0; i + 1 < per_block; i++) {
            links.emplace_back(b * per_block + i, b * per_block + i + 1);
        }
    }
    for (int k = 0; k < d; k++) {
        int anc = 2 * per_block + k;
        links.emplace_back(4 * k, anc);
        links.emplace_back(anc, per_block + 4 * k);
    }
    return links;
}

}  // namespace

bool Layout::adjacent(int a, int b) const {
    return std::binary_search(adjacency_.begin(), adjacency_.end(), ordered(a, b));
}

const QubitInfo &Layout::info(int id) const {
    if (id < 0 || id >= width_ || slot_of_id_[id] < 0) {
        throw std::out_of_range("qubit " + std::to_string(id) + " is not in the layout");
    }
    return qubits_[slot_of_id_[id]];
}

void Layout::index() {
    int d = distance_;
    for (size_t b = 0; b < 2; b++) {
        data_[b].assign(d, -1);
        flag_[b].assign(2 * (d - 1), -1);
        syndrome_[b].assign(d - 1, -1);
    }
    ancilla_.assign(d, -1);
    width_ = 0;
    for (const auto &q : qubits_) {
        width_ = std::max(width_, q.id + 1);
    }
    slot_of_id_.assign(width_, -1);
    for (size_t i = 0; i < qubits_.size(); i++) {
        const auto &q = qubits_[i];
        if (slot_of_id_[q.id] >= 0) {
            throw ValidationError("duplicate qubit id " + std::to_string(q.id));
        }
        slot_of_id_[q.id] = static_cast<int>(i);
        auto check_pos = [&](size_t n) {
            if (q.position < 0 || static_cast<size_t>(q.position) >= n) {
                throw ValidationError("qubit " + std::to_string(q.id) + " has out-of-range position");
            }
        };
        if (q.role == Role::Ancilla) {
            check_pos(ancilla_.size());
            ancilla_[q.position] = q.id;
            continue;
        }
        if (q.block == Block::Shared) {
            throw ValidationError("only ancillas may be shared, qubit " + std::to_string(q.id));
        }
        size_t b = idx(q.block);
        std::vector<int> *dst = q.role == Role::Data ? &data_[b] : q.role == Role::Flag ? &flag_[b] : &syndrome_[b];
        check_pos(dst->size());
        (*dst)[q.position] = q.id;
    }
    auto complete = [](const std::vector<int> &v) { return std::find(v.begin(), v.end(), -1) == v.end(); };
    for (size_t b = 0; b < 2; b++) {
        if (!complete(data_[b]) || !complete(flag_[b]) || !complete(syndrome_[b])) {
            throw ValidationError("layout block is missing qubits");
        }
    }
    if (!complete(ancilla_)) {
        throw ValidationError("layout is missing ancillas");
    }
}

Layout build_layout(const CodeSpec &spec, const std::optional<DeviceMap> &device_map) {
    int d = spec.distance;
    if (d < 3 || d % 2 == 0) {
        throw ValidationError("distance must be odd and >= 3, got " + std::to_string(d));
    }
    int n = spec.num_physical_qubits();
    std::vector<int> ids(n);
    for (int i = 0; i < n; i++) {
        ids[i] = i;
    }
    if (device_map) {
        if (static_cast<int>(device_map->physical.size()) != n) {
            throw ValidationError("physical map has " + std::to_string(device_map->physical.size()) +
                                  " entries, expected " + std::to_string(n));
        }
        ids = device_map->physical;
        if (std::set<int>(ids.begin(), ids.end()).size() != ids.size()) {
            throw ValidationError("physical map repeats a device qubit");
        }
        if (*std::min_element(ids.begin(), ids.end()) < 0) {
            throw ValidationError("physical map contains a negative index");
        }
    }

    Layout layout;
    layout.distance_ = d;
    int per_block = 4 * d - 3;
    for (int b = 0; b < 2; b++) {
        Block block = b == 0 ? Block::Control : Block::Target;
        for (int i = 0; i < per_block; i++) {
            QubitInfo q;
            q.id = ids[b * per_block + i];
            q.block = block;
            switch (i % 4) {
                case 0:
                    q.role = Role::Data;
                    q.position = i / 4;
                    break;
                case 1:
                    q.role = Role::Flag;
                    q.position = 2 * (i / 4);
                    break;
                case 2:
                    q.role = Role::Syndrome;
                    q.position = i / 4;
                    break;
                default:
                    q.role = Role::Flag;
                    q.position = 2 * (i / 4) + 1;
                    break;
            }
            layout.qubits_.push_back(q);
        }
    }
    for (int k = 0; k < d; k++) {
        layout.qubits_.push_back({ids[2 * per_block + k], Role::Ancilla, Block::Shared, k});
    }

    std::set<Edge> coupling;
    if (device_map) {
        for (auto [a, b] : device_map->coupling) {
            coupling.insert(ordered(a, b));
        }
    }
    for (auto [sa, sb] : required_links(d)) {
        Edge e = ordered(ids[sa], ids[sb]);
        if (device_map && !coupling.contains(e)) {
            throw ValidationError("device coupling lacks required link (" + std::to_string(e.first) + ", " +
                                  std::to_string(e.second) + ")");
        }
        layout.adjacency_.push_back(e);
    }
    std::sort(layout.adjacency_.begin(), layout.adjacency_.end());
    layout.index();
    return layout;
}

nlohmann::json layout_to_json(const Layout &layout) {
    nlohmann::json qs = nlohmann::json::array();
    for (const auto &q : layout.qubits()) {
        qs.push_back({{"id", q.id}, {"role", role_name(q.role)}, {"block", block_name(q.block)}, {"position", q.position}});
    }
    nlohmann::json adj = nlohmann::json::array();
    for (auto [a, b] : layout.adjacency()) {
        adj.push_back({a, b});
    }
    return {{"distance", layout.distance()}, {"qubits", qs}, {"adjacency", adj}};
}

Layout layout_from_json(const nlohmann::json &j) {
    try {
        Layout layout;
        layout.distance_ = j.at("distance").get<int>();
        if (layout.distance_ < 3 || layout.distance_ % 2 == 0) {
            throw ValidationError("layout distance must be odd and >= 3");
        }
        for (const auto &q : j.at("qubits")) {
            layout.qubits_.push_back({q.at("id").get<int>(), parse_role(q.at("role").get<std::string>()),
                                      parse_block(q.at("block").get<std::string>()), q.at("position").get<int>()});
        }
        for (const auto &e : j.at("adjacency")) {
            layout.adjacency_.push_back(ordered(e.at(0).get<int>(), e.at(1).get<int>()));
        }
        std::sort(layout.adjacency_.begin(), layout.adjacency_.end());
        layout.index();
        // Re-derive the required chain from the roles and check it is present.
        CodeSpec spec;
        spec.distance = layout.distance_;
        if (static_cast<int>(layout.qubits_.size()) != spec.num_physical_qubits()) {
            throw ValidationError("layout has wrong qubit count");
        }
        std::vector<int> canonical;
        for (int b = 0; b < 2; b++) {
            Block block = b == 0 ? Block::Control : Block::Target;
            for (int k = 0; k < layout.distance_; k++) {
                canonical.push_back(layout.data(block, k));
                if (k + 1 < layout.distance_) {
                    canonical.push_back(layout.flag(block, 2 * k));
                    canonical.push_back(layout.syndrome(block, k));
                    canonical.push_back(layout.flag(block, 2 * k + 1));
                }
            }
        }
        for (int k = 0; k < layout.distance_; k++) {
            canonical.push_back(layout.ancilla(k));
        }
        for (auto [sa, sb] : required_links(layout.distance_)) {
            if (!layout.adjacent(canonical[sa], canonical[sb])) {
                throw ValidationError("layout adjacency lacks required link (" + std::to_string(canonical[sa]) +
                                      ", " + std::to_string(canonical[sb]) + ")");
            }
        }
        return layout;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed layout JSON: ") + e.what());
    }
}

std::string_view gate_name(Gate g) {
    switch (g) {
        case Gate::ResetZ:
            return "R";
        case Gate::H:
            return "H";
        case Gate::X:
            return "X";
        case Gate::CNOT:
            return "CNOT";
        case Gate::CZ:
            return "CZ";
        case Gate::MeasureZ:
            return "M";
        case Gate::Idle:
            return "IDLE";
    }
    return "?";
}

int gate_arity(Gate g) {
    return (g == Gate::CNOT || g == Gate::CZ) ? 2 : 1;
}

void apply_clifford(PauliFrame &frame, const Instruction &instr) {
    int a = instr.targets[0];
    int b = instr.targets[1];
    switch (instr.gate) {
        case Gate::H: {
            bool x = frame.x.get(a);
            frame.x.set(a, frame.z.get(a));
            frame.z.set(a, x);
            break;
        }
        case Gate::CNOT:
            if (frame.x.get(a)) {
                frame.x.flip(b);
            }
            if (frame.z.get(b)) {
                frame.z.flip(a);
            }
            break;
        case Gate::CZ:
            if (frame.x.get(a)) {
                frame.z.flip(b);
            }
            if (frame.x.get(b)) {
                frame.z.flip(a);
            }
            break;
        case Gate::ResetZ:
            frame.x.set(a, false);
            frame.z.set(a, false);
            break;
        case Gate::X:
        case Gate::MeasureZ:
        case Gate::Idle:
            break;
    }
}

PauliFrame propagate_frame(PauliFrame frame, const Instruction &instr) {
    apply_clifford(frame, instr);
    return frame;
}

}  // namespace repcnot
