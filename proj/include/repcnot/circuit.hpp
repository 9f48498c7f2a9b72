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

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "repcnot/core.hpp"

namespace repcnot {

enum class RecordRole : uint8_t { Syndrome, Flag, Data };

std::string_view record_role_name(RecordRole r);

struct MeasurementRecord {
    int slot = 0;
    int qubit = 0;
    int round = 0;  // 1..2R for extraction records, 2R+1 for the final data readout
    RecordRole role = RecordRole::Syndrome;
    Block block = Block::Control;
    int position = 0;  // check k, flag index j, or data index k
    bool operator==(const MeasurementRecord &) const = default;
};

/// A run of layers with layer numbers and record slots local to the fragment.
struct CircuitFragment {
    std::vector<Instruction> instructions;
    std::vector<MeasurementRecord> records;
    int num_layers = 0;
};

/// The complete memory experiment: initialization, R rounds, transversal CNOT,
/// R rounds, final data readout.
struct Circuit {
    CodeSpec spec;
    Layout layout;
    std::vector<Instruction> instructions;  // non-decreasing layer
    std::vector<MeasurementRecord> records;  // by slot
    int num_layers = 0;
    int cnot_first_layer = 0;  // first layer of the transversal CNOT fragment
    int cnot_last_layer = 0;   // last layer of the transversal CNOT fragment

    int syndrome_slot(Block b, int k, int round) const;
    int flag_slot(Block b, int j, int round) const;
    int data_slot(Block b, int k) const;
    bool operator==(const Circuit &) const = default;
};

/// One syndrome extraction round on one block (8 layers, 3(d-1) records).
CircuitFragment build_extraction_round(const CodeSpec &spec, const Layout &layout, Block block, int round = 1);

/// Ancilla-mediated transversal CNOT (4 layers, no records).
CircuitFragment build_transversal_cnot(const Layout &layout);

Circuit build_memory_experiment(const CodeSpec &spec, const Layout &layout);

/// Logical state after an ideal logical CNOT (control -> target).
LogicalState ideal_output_state(const LogicalState &initial);

/// Throws ValidationError on non-adjacent two-qubit gates, a qubit used twice
/// in one layer, or record slots out of execution order.
void validate_circuit(const Circuit &circuit);

/// One layer per line: `L<t>: H q3; CNOT q4 q5; ...`.
std::string circuit_to_text(const Circuit &circuit);
nlohmann::json circuit_sidecar(const Circuit &circuit);
Circuit circuit_from_text(std::string_view text, const nlohmann::json &sidecar);

nlohmann::json code_spec_to_json(const CodeSpec &spec);
CodeSpec code_spec_from_json(const nlohmann::json &j);

}  // namespace repcnot
