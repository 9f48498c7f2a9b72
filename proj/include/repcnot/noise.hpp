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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "repcnot/circuit.hpp"

namespace repcnot {

enum class TwoQubitGateType : uint8_t { ECR, CZ, CX };

struct QubitCalibration {
    double t1_us = 0;
    double t2_us = 0;
    double readout_err = 0;
    double sq_err = 0;
    std::optional<double> idle_err;  // derived from T2 when absent
    bool operator==(const QubitCalibration &) const = default;
};

struct GateTimes {
    double sq_ns = 0;
    double tq_ns = 0;
    double meas_ns = 0;
    bool operator==(const GateTimes &) const = default;
};

/// Per-qubit and per-edge error rates. A `defaults` entry, when present, covers
/// every qubit and edge not listed explicitly.
struct CalibrationTable {
    std::string name;
    TwoQubitGateType tq_gate_type = TwoQubitGateType::ECR;
    GateTimes gate_times;
    std::map<int, QubitCalibration> qubits;
    std::map<Edge, double> edges;  // keys ordered (min, max)
    std::optional<QubitCalibration> default_qubit;
    std::optional<double> default_tq_err;

    /// Throws ValidationError when the qubit has no entry and there is no default.
    const QubitCalibration &qubit(int id) const;
    double tq_err(int a, int b) const;
    /// Depolarizing probability for an idle of `windows` measurement durations.
    double idle_probability(int id, double windows) const;
    bool idle_is_derived(int id) const;

    bool operator==(const CalibrationTable &) const = default;
};

/// p = 1 - exp(-t/T2), clamped to [0, 1].
double derived_idle_error(double duration_ns, double t2_us);

/// Uniform table: every qubit and edge takes the given values.
CalibrationTable uniform_calibration(double sq_err, double tq_err, double readout_err, double idle_err,
                                     TwoQubitGateType type = TwoQubitGateType::ECR);

/// Parses the JSON calibration schema. Throws ValidationError.
CalibrationTable load_calibration(std::string_view json_text);
CalibrationTable load_calibration_file(const std::filesystem::path &path);
nlohmann::json calibration_to_json(const CalibrationTable &table);

struct ConnectivityReport {
    std::vector<Edge> broken_in_layout;
    std::vector<Edge> broken_outside_layout;  // warnings only
    std::vector<std::string> warnings;
    bool usable = true;
};

/// Edges whose two-qubit error rate is 1 (within 1e-12); any inside the layout makes it unusable.
ConnectivityReport validate_connectivity(const CalibrationTable &calib, const Layout &layout);

enum class ChannelKind : uint8_t { Depol1, Depol2, FlipX };
enum class Timing : uint8_t { Before, After };

std::string_view channel_kind_name(ChannelKind k);

/// Single-qubit Pauli codes used by channel terms: 0 = I, 1 = X, 2 = Y, 3 = Z.
inline bool pauli_has_x(uint8_t p) {
    return p == 1 || p == 2;
}
inline bool pauli_has_z(uint8_t p) {
    return p == 2 || p == 3;
}

/// Paulis applied to (qubits[0], qubits[1]) by term `term` of a channel.
/// Depol1: X, Y, Z. Depol2: the 15 non-identity two-qubit Paulis, first operand
/// major. FlipX: X.
std::array<uint8_t, 2> channel_term_paulis(ChannelKind kind, int term);

struct NoiseChannel {
    ChannelKind kind = ChannelKind::Depol1;
    double p = 0;
    std::array<int, 2> qubits{-1, -1};
    int instruction = 0;  // index into base.instructions
    Timing timing = Timing::After;
    int layer = 0;

    int arity() const {
        return kind == ChannelKind::Depol2 ? 2 : 1;
    }
    int num_terms() const {
        return kind == ChannelKind::Depol1 ? 3 : kind == ChannelKind::Depol2 ? 15 : 1;
    }
    bool operator==(const NoiseChannel &) const = default;
};

/// One step of the execution order: an ideal gate or a noise channel.
struct ScheduledOp {
    bool is_channel = false;
    uint32_t index = 0;
    bool operator==(const ScheduledOp &) const = default;
};

struct NoisyCircuit {
    Circuit base;
    std::vector<NoiseChannel> channels;
    std::vector<ScheduledOp> schedule;
    std::vector<int> derived_idle_qubits;  // qubits whose idle rate came from T2

    /// Sum of all channel probabilities, for audits.
    double total_probability() const;
    /// Schedule position of a base instruction.
    size_t schedule_position(int instruction) const;
};

/// Attaches the circuit-level depolarizing model. Throws ValidationError on missing calibration.
NoisyCircuit attach_noise(const Circuit &circuit, const CalibrationTable &calib);

}  // namespace repcnot
