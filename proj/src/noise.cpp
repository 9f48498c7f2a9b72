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

#include "repcnot/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "repcnot/errors.hpp"

namespace repcnot {

namespace {

constexpr double kBrokenTolerance = 1e-12;

Edge ordered(int a, int b) {
    return a < b ? Edge{a, b} : Edge{b, a};
}

std::string edge_str(Edge e) {
    return "(" + std::to_string(e.first) + ", " + std::to_string(e.second) + ")";
}

double probability(const nlohmann::json &j, const char *key, const std::string &where) {
    double p = j.at(key).get<double>();
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << key << " = " << p << " out of range [0, 1] for " << where;
        throw ValidationError(msg.str());
    }
    return p;
}

double positive(const nlohmann::json &j, const char *key, const std::string &where) {
    double v = j.at(key).get<double>();
    if (!(v > 0.0)) {
        throw ValidationError(std::string(key) + " must be positive for " + where);
    }
    return v;
}

QubitCalibration parse_qubit(const nlohmann::json &j, const std::string &where) {
    QubitCalibration q;
    q.t1_us = positive(j, "t1_us", where);
    q.t2_us = positive(j, "t2_us", where);
    q.readout_err = probability(j, "readout_err", where);
    q.sq_err = probability(j, "sq_err", where);
    if (j.contains("idle_err") && !j.at("idle_err").is_null()) {
        q.idle_err = probability(j, "idle_err", where);
    }
    return q;
}

nlohmann::json qubit_json(const QubitCalibration &q) {
    nlohmann::json j = {{"t1_us", q.t1_us}, {"t2_us", q.t2_us}, {"readout_err", q.readout_err}, {"sq_err", q.sq_err}};
    j["idle_err"] = q.idle_err ? nlohmann::json(*q.idle_err) : nlohmann::json(nullptr);
    return j;
}

std::string_view gate_type_name(TwoQubitGateType t) {
    switch (t) {
        case TwoQubitGateType::ECR:
            return "ECR";
        case TwoQubitGateType::CZ:
            return "CZ";
        case TwoQubitGateType::CX:
            return "CX";
    }
    return "?";
}

}  // namespace

const QubitCalibration &CalibrationTable::qubit(int id) const {
    auto it = qubits.find(id);
    if (it != qubits.end()) {
        return it->second;
    }
    if (default_qubit) {
        return *default_qubit;
    }
    throw ValidationError("calibration '" + name + "' has no entry for qubit " + std::to_string(id));
}

double CalibrationTable::tq_err(int a, int b) const {
    auto it = edges.find(ordered(a, b));
    if (it != edges.end()) {
        return it->second;
    }
    if (default_tq_err) {
        return *default_tq_err;
    }
    throw ValidationError("calibration '" + name + "' has no entry for edge " + edge_str(ordered(a, b)));
}

double derived_idle_error(double duration_ns, double t2_us) {
    double p = 1.0 - std::exp(-(duration_ns * 1e-3) / t2_us);
    return std::clamp(p, 0.0, 1.0);
}

double CalibrationTable::idle_probability(int id, double windows) const {
    const auto &q = qubit(id);
    if (q.idle_err) {
        return *q.idle_err;
    }
    return derived_idle_error(windows * gate_times.meas_ns, q.t2_us);
}

bool CalibrationTable::idle_is_derived(int id) const {
    return !qubit(id).idle_err.has_value();
}

CalibrationTable uniform_calibration(double sq_err, double tq_err, double readout_err, double idle_err,
                                     TwoQubitGateType type) {
    CalibrationTable t;
    t.name = "uniform";
    t.tq_gate_type = type;
    t.gate_times = {50.0, 500.0, 1000.0};
    t.default_qubit = QubitCalibration{100.0, 100.0, readout_err, sq_err, idle_err};
    t.default_tq_err = tq_err;
    return t;
}

CalibrationTable load_calibration(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("calibration is not valid JSON: ") + e.what());
    }
    CalibrationTable t;
    try {
        t.name = j.value("name", std::string("unnamed"));
        std::string type = j.at("tq_gate_type").get<std::string>();
        if (type == "ECR") {
            t.tq_gate_type = TwoQubitGateType::ECR;
        } else if (type == "CZ") {
            t.tq_gate_type = TwoQubitGateType::CZ;
        } else if (type == "CX") {
            t.tq_gate_type = TwoQubitGateType::CX;
        } else {
            throw ValidationError("unknown tq_gate_type '" + type + "'");
        }
        const auto &times = j.at("gate_times_ns");
        t.gate_times.sq_ns = positive(times, "sq", "gate_times_ns");
        t.gate_times.tq_ns = positive(times, "tq", "gate_times_ns");
        t.gate_times.meas_ns = positive(times, "meas", "gate_times_ns");
        if (j.contains("defaults")) {
            const auto &d = j.at("defaults");
            t.default_qubit = parse_qubit(d, "defaults");
            t.default_tq_err = probability(d, "tq_err", "defaults");
        }
        for (const auto &q : j.at("qubits")) {
            int id = q.at("id").get<int>();
            if (!t.qubits.emplace(id, parse_qubit(q, "qubit " + std::to_string(id))).second) {
                throw ValidationError("duplicate calibration entry for qubit " + std::to_string(id));
            }
        }
        for (const auto &e : j.at("edges")) {
            Edge key = ordered(e.at("a").get<int>(), e.at("b").get<int>());
            double p = probability(e, "tq_err", "edge " + edge_str(key));
            if (!t.default_qubit && (!t.qubits.contains(key.first) || !t.qubits.contains(key.second))) {
                throw ValidationError("edge " + edge_str(key) + " references an uncalibrated qubit");
            }
            if (!t.edges.emplace(key, p).second) {
                throw ValidationError("duplicate calibration entry for edge " + edge_str(key));
            }
        }
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("calibration schema violation: ") + e.what());
    }
    return t;
}

CalibrationTable load_calibration_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open calibration file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return load_calibration(buf.str());
}

nlohmann::json calibration_to_json(const CalibrationTable &t) {
    nlohmann::json j;
    j["name"] = t.name;
    j["tq_gate_type"] = gate_type_name(t.tq_gate_type);
    j["gate_times_ns"] = {{"sq", t.gate_times.sq_ns}, {"tq", t.gate_times.tq_ns}, {"meas", t.gate_times.meas_ns}};
    if (t.default_qubit) {
        auto d = qubit_json(*t.default_qubit);
        d["tq_err"] = t.default_tq_err.value_or(0.0);
        j["defaults"] = d;
    }
    j["qubits"] = nlohmann::json::array();
    for (const auto &[id, q] : t.qubits) {
        auto e = qubit_json(q);
        e["id"] = id;
        j["qubits"].push_back(e);
    }
    j["edges"] = nlohmann::json::array();
    for (const auto &[e, p] : t.edges) {
        j["edges"].push_back({{"a", e.first}, {"b", e.second}, {"tq_err", p}});
    }
    return j;
}

ConnectivityReport validate_connectivity(const CalibrationTable &calib, const Layout &layout) {
    ConnectivityReport report;
    std::set<Edge> in_layout(layout.adjacency().begin(), layout.adjacency().end());
    for (const auto &[e, p] : calib.edges) {
        if (std::abs(p - 1.0) > kBrokenTolerance) {
            continue;
        }
        if (in_layout.contains(e)) {
            report.broken_in_layout.push_back(e);
        } else {
            report.broken_outside_layout.push_back(e);
            report.warnings.push_back("broken edge " + edge_str(e) + " lies outside the layout");
        }
    }
    if (!calib.edges.empty() || !calib.default_tq_err) {
        for (const auto &e : layout.adjacency()) {
            if (!calib.edges.contains(e) && !calib.default_tq_err) {
                report.warnings.push_back("layout edge " + edge_str(e) + " has no calibration entry");
            }
        }
    }
    if (calib.default_tq_err && std::abs(*calib.default_tq_err - 1.0) <= kBrokenTolerance) {
        for (const auto &e : layout.adjacency()) {
            if (!calib.edges.contains(e)) {
                report.broken_in_layout.push_back(e);
            }
        }
    }
    report.usable = report.broken_in_layout.empty();
    return report;
}

std::string_view channel_kind_name(ChannelKind k) {
    switch (k) {
        case ChannelKind::Depol1:
            return "depol1";
        case ChannelKind::Depol2:
            return "depol2";
        case ChannelKind::FlipX:
            return "flip_x";
    }
    return "?";
}

std::array<uint8_t, 2> channel_term_paulis(ChannelKind kind, int term) {
    switch (kind) {
        case ChannelKind::Depol1:
            return {static_cast<uint8_t>(term + 1), 0};
        case ChannelKind::Depol2:
            return {static_cast<uint8_t>((term + 1) >> 2), static_cast<uint8_t>((term + 1) & 3)};
        case ChannelKind::FlipX:
            return {1, 0};
    }
    return {0, 0};
}

double NoisyCircuit::total_probability() const {
    double total = 0;
    for (const auto &c : channels) {
        total += c.p;
    }
    return total;
}

size_t NoisyCircuit::schedule_position(int instruction) const {
    for (size_t i = 0; i < schedule.size(); i++) {
        if (!schedule[i].is_channel && static_cast<int>(schedule[i].index) == instruction) {
            return i;
        }
    }
    throw std::out_of_range("instruction " + std::to_string(instruction) + " not scheduled");
}

NoisyCircuit attach_noise(const Circuit &circuit, const CalibrationTable &calib) {
    NoisyCircuit nc;
    nc.base = circuit;
    std::set<int> derived;
    bool wrap_tq = calib.tq_gate_type != TwoQubitGateType::CZ;

    for (size_t i = 0; i < circuit.instructions.size(); i++) {
        const Instruction &op = circuit.instructions[i];
        int idx = static_cast<int>(i);
        std::vector<NoiseChannel> before, after;
        auto channel = [&](ChannelKind kind, double p, int a, int b, Timing timing) {
            NoiseChannel ch;
            ch.kind = kind;
            ch.p = p;
            ch.qubits = {a, b};
            ch.instruction = idx;
            ch.timing = timing;
            ch.layer = op.layer;
            (timing == Timing::Before ? before : after).push_back(ch);
        };
        int a = op.targets[0];
        int b = op.targets[1];
        switch (op.gate) {
            case Gate::H:
            case Gate::X:
                channel(ChannelKind::Depol1, calib.qubit(a).sq_err, a, -1, Timing::After);
                break;
            case Gate::CNOT:
            case Gate::CZ: {
                double ptq = calib.tq_err(a, b);
                if (wrap_tq) {
                    channel(ChannelKind::Depol1, calib.qubit(a).sq_err, a, -1, Timing::Before);
                    channel(ChannelKind::Depol1, calib.qubit(b).sq_err, b, -1, Timing::Before);
                }
                channel(ChannelKind::Depol2, ptq, a, b, Timing::After);
                if (wrap_tq) {
                    channel(ChannelKind::Depol1, calib.qubit(a).sq_err, a, -1, Timing::After);
                    channel(ChannelKind::Depol1, calib.qubit(b).sq_err, b, -1, Timing::After);
                }
                break;
            }
            case Gate::MeasureZ:
                channel(ChannelKind::FlipX, calib.qubit(a).readout_err, a, -1, Timing::Before);
                break;
            case Gate::ResetZ:
                channel(ChannelKind::FlipX, calib.qubit(a).readout_err, a, -1, Timing::After);
                break;
            case Gate::Idle:
                channel(ChannelKind::Depol1, calib.idle_probability(a, op.duration), a, -1, Timing::After);
                if (calib.idle_is_derived(a)) {
                    derived.insert(a);
                }
                break;
        }
        for (const auto &ch : before) {
            nc.schedule.push_back({true, static_cast<uint32_t>(nc.channels.size())});
            nc.channels.push_back(ch);
        }
        nc.schedule.push_back({false, static_cast<uint32_t>(i)});
        for (const auto &ch : after) {
            nc.schedule.push_back({true, static_cast<uint32_t>(nc.channels.size())});
            nc.channels.push_back(ch);
        }
    }
    nc.derived_idle_qubits.assign(derived.begin(), derived.end());
    return nc;
}

}  // namespace repcnot
