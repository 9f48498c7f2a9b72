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

#include "repcnot/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "repcnot/errors.hpp"

namespace repcnot {

std::string_view record_role_name(RecordRole r) {
    switch (r) {
        case RecordRole::Syndrome:
            return "syndrome";
        case RecordRole::Flag:
            return "flag";
        case RecordRole::Data:
            return "data";
    }
    return "?";
}

namespace {

Instruction op1(Gate g, int q, int layer) {
    Instruction i;
    i.gate = g;
    i.targets = {q, -1};
    i.layer = layer;
    return i;
}

Instruction op2(Gate g, int a, int b, int layer) {
    Instruction i;
    i.gate = g;
    i.targets = {a, b};
    i.layer = layer;
    return i;
}

// Appends fragments that run side by side, starting at `layer`. Record slots are
// assigned in execution order (layer, then instruction order within the layer).
class Assembler {
   public:
    explicit Assembler(Circuit &c) : c_(c) {
    }

    void add_layer(std::vector<Instruction> ops) {
        if (ops.empty()) {
            return;
        }
        for (auto &op : ops) {
            op.layer = c_.num_layers;
            c_.instructions.push_back(op);
        }
        c_.num_layers++;
    }

    void add_parallel(const std::vector<CircuitFragment> &frags) {
        int depth = 0;
        for (const auto &f : frags) {
            depth = std::max(depth, f.num_layers);
        }
        for (int t = 0; t < depth; t++) {
            for (const auto &f : frags) {
                for (const auto &op : f.instructions) {
                    if (op.layer != t) {
                        continue;
                    }
                    Instruction out = op;
                    out.layer = c_.num_layers + t;
                    if (out.gate == Gate::MeasureZ) {
                        MeasurementRecord rec = f.records[op.record_slot];
                        rec.slot = static_cast<int>(c_.records.size());
                        out.record_slot = rec.slot;
                        c_.records.push_back(rec);
                    }
                    c_.instructions.push_back(out);
                }
            }
        }
        c_.num_layers += depth;
    }

   private:
    Circuit &c_;
};

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

int Circuit::syndrome_slot(Block b, int k, int round) const {
    int m = spec.checks_per_block();
    return (round - 1) * 6 * m + static_cast<int>(b) * 3 * m + 3 * k;
}

int Circuit::flag_slot(Block b, int j, int round) const {
    int m = spec.checks_per_block();
    return (round - 1) * 6 * m + static_cast<int>(b) * 3 * m + 3 * (j / 2) + 1 + (j % 2);
}

int Circuit::data_slot(Block b, int k) const {
    int m = spec.checks_per_block();
    return spec.num_extraction_rounds() * 6 * m + static_cast<int>(b) * spec.distance + k;
}

CircuitFragment build_extraction_round(const CodeSpec &spec, const Layout &layout, Block block, int round) {
    CircuitFragment f;
    f.num_layers = 8;
    int m = spec.distance - 1;
    Gate bridge = spec.basis == Basis::Z ? Gate::CZ : Gate::CNOT;
    auto &ops = f.instructions;
    // T1-T2: flags and syndromes to |0>, syndromes to |+>.
    for (int k = 0; k < m; k++) {
        ops.push_back(op1(Gate::ResetZ, layout.syndrome(block, k), 0));
        ops.push_back(op1(Gate::ResetZ, layout.flag(block, 2 * k), 0));
        ops.push_back(op1(Gate::ResetZ, layout.flag(block, 2 * k + 1), 0));
    }
    for (int k = 0; k < m; k++) {
        ops.push_back(op1(Gate::H, layout.syndrome(block, k), 1));
    }
    // T3-T6: the flag chain. Gates touching one syndrome qubit serialize; checks run in parallel.
    for (int k = 0; k < m; k++) {
        int s = layout.syndrome(block, k);
        int fa = layout.flag(block, 2 * k);
        int fb = layout.flag(block, 2 * k + 1);
        ops.push_back(op2(Gate::CNOT, s, fa, 2));
        ops.push_back(op2(bridge, fa, layout.data(block, k), 3));
        ops.push_back(op2(Gate::CNOT, s, fb, 3));
        ops.push_back(op2(bridge, fb, layout.data(block, k + 1), 4));
        ops.push_back(op2(Gate::CNOT, s, fa, 4));
        ops.push_back(op2(Gate::CNOT, s, fb, 5));
    }
    // T7-T8: rotate syndromes back and read out; data idles during readout.
    for (int k = 0; k < m; k++) {
        ops.push_back(op1(Gate::H, layout.syndrome(block, k), 6));
    }
    auto measure = [&](int q, RecordRole role, int position) {
        Instruction op = op1(Gate::MeasureZ, q, 7);
        op.record_slot = static_cast<int>(f.records.size());
        f.records.push_back({op.record_slot, q, round, role, block, position});
        ops.push_back(op);
    };
    for (int k = 0; k < m; k++) {
        measure(layout.syndrome(block, k), RecordRole::Syndrome, k);
        measure(layout.flag(block, 2 * k), RecordRole::Flag, 2 * k);
        measure(layout.flag(block, 2 * k + 1), RecordRole::Flag, 2 * k + 1);
    }
    for (int k = 0; k < spec.distance; k++) {
        Instruction idle = op1(Gate::Idle, layout.data(block, k), 7);
        idle.duration = 1.0;
        ops.push_back(idle);
    }
    return f;
}

CircuitFragment build_transversal_cnot(const Layout &layout) {
    CircuitFragment f;
    f.num_layers = 4;
    for (int k = 0; k < layout.distance(); k++) {
        int c = layout.data(Block::Control, k);
        int t = layout.data(Block::Target, k);
        int a = layout.ancilla(k);
        f.instructions.push_back(op1(Gate::ResetZ, a, 0));
        f.instructions.push_back(op2(Gate::CNOT, c, a, 1));
        f.instructions.push_back(op2(Gate::CNOT, a, t, 2));
        f.instructions.push_back(op2(Gate::CNOT, c, a, 3));
    }
    std::stable_sort(f.instructions.begin(), f.instructions.end(),
                     [](const Instruction &x, const Instruction &y) { return x.layer < y.layer; });
    return f;
}

Circuit build_memory_experiment(const CodeSpec &spec, const Layout &layout) {
    spec.validate();
    if (layout.distance() != spec.distance) {
        throw ValidationError("layout distance does not match the code spec");
    }
    Circuit c;
    c.spec = spec;
    c.layout = layout;
    Assembler as(c);
    int d = spec.distance;
    const std::array<Block, 2> blocks{Block::Control, Block::Target};
    auto logical_bit = [&](Block b) {
        return b == Block::Control ? spec.initial_state.control : spec.initial_state.target;
    };

    // (1) Data initialization.
    std::vector<Instruction> reset, flip, rotate;
    for (Block b : blocks) {
        for (int k = 0; k < d; k++) {
            int q = layout.data(b, k);
            reset.push_back(op1(Gate::ResetZ, q, 0));
            if (logical_bit(b)) {
                flip.push_back(op1(Gate::X, q, 0));
            }
            if (spec.basis == Basis::X) {
                rotate.push_back(op1(Gate::H, q, 0));
            }
        }
    }
    as.add_layer(reset);
    as.add_layer(flip);
    as.add_layer(rotate);

    // (2) R rounds, (3) CNOT, (4) R rounds.
    auto rounds = [&](int first, int count) {
        for (int r = first; r < first + count; r++) {
            as.add_parallel({build_extraction_round(spec, layout, Block::Control, r),
                             build_extraction_round(spec, layout, Block::Target, r)});
        }
    };
    rounds(1, spec.rounds);
    c.cnot_first_layer = c.num_layers;
    as.add_parallel({build_transversal_cnot(layout)});
    c.cnot_last_layer = c.num_layers - 1;
    rounds(spec.rounds + 1, spec.rounds);

    // (5) Final readout in the code basis.
    if (spec.basis == Basis::X) {
        std::vector<Instruction> hs;
        for (Block b : blocks) {
            for (int k = 0; k < d; k++) {
                hs.push_back(op1(Gate::H, layout.data(b, k), 0));
            }
        }
        as.add_layer(hs);
    }
    CircuitFragment readout;
    readout.num_layers = 1;
    for (Block b : blocks) {
        for (int k = 0; k < d; k++) {
            Instruction m = op1(Gate::MeasureZ, layout.data(b, k), 0);
            m.record_slot = static_cast<int>(readout.records.size());
            readout.records.push_back({m.record_slot, m.targets[0], spec.num_syndrome_rounds(), RecordRole::Data, b, k});
            readout.instructions.push_back(m);
        }
    }
    as.add_parallel({readout});
    return c;
}

LogicalState ideal_output_state(const LogicalState &initial) {
    LogicalState out = initial;
    if (initial.basis == Basis::Z) {
        // X_L propagates control -> target.
        out.target = initial.control != initial.target;
    } else {
        // Z_L propagates target -> control.
        out.control = initial.control != initial.target;
    }
    return out;
}

void validate_circuit(const Circuit &c) {
    const Layout &layout = c.layout;
    int prev_layer = -1;
    std::set<int> used;
    int next_slot = 0;
    for (const auto &op : c.instructions) {
        if (op.layer < prev_layer) {
            throw ValidationError("instructions are not layer-ordered");
        }
        if (op.layer != prev_layer) {
            used.clear();
            prev_layer = op.layer;
        }
        for (int i = 0; i < op.arity(); i++) {
            int q = op.targets[i];
            layout.info(q);
            if (!used.insert(q).second) {
                throw ValidationError("qubit " + std::to_string(q) + " used twice in layer " + std::to_string(op.layer));
            }
        }
        if (op.is_two_qubit() && !layout.adjacent(op.targets[0], op.targets[1])) {
            throw ValidationError("two-qubit gate on non-adjacent qubits " + std::to_string(op.targets[0]) + ", " +
                                  std::to_string(op.targets[1]));
        }
        if (op.gate == Gate::MeasureZ) {
            if (op.record_slot != next_slot) {
                throw ValidationError("record slot " + std::to_string(op.record_slot) + " out of execution order");
            }
            if (next_slot >= static_cast<int>(c.records.size()) || c.records[next_slot].qubit != op.targets[0]) {
                throw ValidationError("record metadata does not match measurement " + std::to_string(next_slot));
            }
            next_slot++;
        }
    }
    if (next_slot != static_cast<int>(c.records.size())) {
        throw ValidationError("record count does not match measurements");
    }
    for (const auto &r : c.records) {
        int expected = r.role == RecordRole::Data       ? c.data_slot(r.block, r.position)
                       : r.role == RecordRole::Syndrome ? c.syndrome_slot(r.block, r.position, r.round)
                                                        : c.flag_slot(r.block, r.position, r.round);
        if (expected != r.slot) {
            throw ValidationError("record " + std::to_string(r.slot) + " is not in canonical position");
        }
    }
}

std::string circuit_to_text(const Circuit &c) {
    std::ostringstream out;
    int layer = -1;
    for (const auto &op : c.instructions) {
        if (op.layer != layer) {
            if (layer >= 0) {
                out << '\n';
            }
            layer = op.layer;
            out << 'L' << layer << ": ";
        } else {
            out << "; ";
        }
        out << gate_name(op.gate);
        if (op.gate == Gate::Idle) {
            out << '(' << format_double(op.duration) << ')';
        }
        for (int i = 0; i < op.arity(); i++) {
            out << " q" << op.targets[i];
        }
    }
    if (layer >= 0) {
        out << '\n';
    }
    return out.str();
}

nlohmann::json code_spec_to_json(const CodeSpec &spec) {
    return {{"distance", spec.distance},
            {"rounds", spec.rounds},
            {"basis", basis_name(spec.basis)},
            {"state", spec.initial_state.name()}};
}

CodeSpec code_spec_from_json(const nlohmann::json &j) {
    try {
        CodeSpec spec;
        spec.distance = j.at("distance").get<int>();
        spec.rounds = j.at("rounds").get<int>();
        spec.basis = parse_basis(j.at("basis").get<std::string>());
        spec.initial_state = LogicalState::parse(j.at("state").get<std::string>());
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed code spec: ") + e.what());
    }
}

nlohmann::json circuit_sidecar(const Circuit &c) {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto &r : c.records) {
        recs.push_back({{"slot", r.slot},
                        {"qubit", r.qubit},
                        {"round", r.round},
                        {"role", record_role_name(r.role)},
                        {"block", block_name(r.block)},
                        {"position", r.position}});
    }
    return {{"spec", code_spec_to_json(c.spec)},
            {"layout", layout_to_json(c.layout)},
            {"cnot_layers", {c.cnot_first_layer, c.cnot_last_layer}},
            {"records", recs}};
}

namespace {

int parse_int(std::string_view s, std::string_view what) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ValidationError("bad " + std::string(what) + " '" + std::string(s) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

Instruction parse_instruction(std::string_view text, int layer) {
    auto tokens = split(trim(text), ' ');
    if (tokens.empty() || tokens[0].empty()) {
        throw ValidationError("empty instruction in layer " + std::to_string(layer));
    }
    Instruction op;
    op.layer = layer;
    std::string_view name = tokens[0];
    if (name.starts_with("IDLE(") && name.ends_with(")")) {
        op.gate = Gate::Idle;
        auto inner = name.substr(5, name.size() - 6);
        auto res = std::from_chars(inner.data(), inner.data() + inner.size(), op.duration);
        if (res.ec != std::errc() || res.ptr != inner.data() + inner.size()) {
            throw ValidationError("bad idle duration '" + std::string(inner) + "'");
        }
    } else {
        bool found = false;
        for (Gate g : {Gate::ResetZ, Gate::H, Gate::X, Gate::CNOT, Gate::CZ, Gate::MeasureZ}) {
            if (gate_name(g) == name) {
                op.gate = g;
                found = true;
            }
        }
        if (!found) {
            throw ValidationError("unknown gate '" + std::string(name) + "'");
        }
    }
    if (static_cast<int>(tokens.size()) != 1 + op.arity()) {
        throw ValidationError("gate '" + std::string(name) + "' has wrong operand count");
    }
    for (int i = 0; i < op.arity(); i++) {
        auto t = tokens[1 + i];
        if (t.empty() || t[0] != 'q') {
            throw ValidationError("bad operand '" + std::string(t) + "'");
        }
        op.targets[i] = parse_int(t.substr(1), "qubit");
    }
    return op;
}

RecordRole parse_record_role(std::string_view s) {
    for (RecordRole r : {RecordRole::Syndrome, RecordRole::Flag, RecordRole::Data}) {
        if (record_role_name(r) == s) {
            return r;
        }
    }
    throw ValidationError("unknown record role '" + std::string(s) + "'");
}

}  // namespace

Circuit circuit_from_text(std::string_view text, const nlohmann::json &sidecar) {
    Circuit c;
    try {
        c.spec = code_spec_from_json(sidecar.at("spec"));
        c.layout = layout_from_json(sidecar.at("layout"));
        c.cnot_first_layer = sidecar.at("cnot_layers").at(0).get<int>();
        c.cnot_last_layer = sidecar.at("cnot_layers").at(1).get<int>();
        for (const auto &r : sidecar.at("records")) {
            MeasurementRecord rec;
            rec.slot = r.at("slot").get<int>();
            rec.qubit = r.at("qubit").get<int>();
            rec.round = r.at("round").get<int>();
            rec.role = parse_record_role(r.at("role").get<std::string>());
            std::string b = r.at("block").get<std::string>();
            rec.block = b == "control" ? Block::Control : b == "target" ? Block::Target : Block::Shared;
            rec.position = r.at("position").get<int>();
            c.records.push_back(rec);
        }
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed circuit sidecar: ") + e.what());
    }
    int slot = 0;
    for (auto line : split(text, '\n')) {
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        auto colon = line.find(':');
        if (line[0] != 'L' || colon == std::string_view::npos) {
            throw ValidationError("bad layer line '" + std::string(line) + "'");
        }
        int layer = parse_int(line.substr(1, colon - 1), "layer");
        for (auto part : split(line.substr(colon + 1), ';')) {
            Instruction op = parse_instruction(part, layer);
            if (op.gate == Gate::MeasureZ) {
                op.record_slot = slot++;
            }
            c.instructions.push_back(op);
        }
        c.num_layers = std::max(c.num_layers, layer + 1);
    }
    validate_circuit(c);
    return c;
}

}  // namespace repcnot
