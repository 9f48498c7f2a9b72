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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "repcnot/bitvector.hpp"

namespace repcnot {

enum class Basis : uint8_t { Z = 0, X = 1 };

std::string_view basis_name(Basis b);
Basis parse_basis(std::string_view text);

/// Two-block logical product state. In the Z basis `false`/`true` mean |0>/|1>;
/// in the X basis they mean |+>/|->.
struct LogicalState {
    Basis basis = Basis::Z;
    bool control = false;
    bool target = false;

    bool operator==(const LogicalState &) const = default;
    /// "00", "01", ..., "++", "+-", ...
    std::string name() const;
    static LogicalState parse(std::string_view text);
    /// The four states of one basis in canonical order.
    static std::array<LogicalState, 4> all(Basis basis);
};

struct CodeSpec {
    int distance = 3;
    int rounds = 1;  // R: extraction rounds on each side of the CNOT
    Basis basis = Basis::Z;
    LogicalState initial_state{};

    /// Throws ValidationError.
    void validate() const;

    int checks_per_block() const {
        return distance - 1;
    }
    int num_physical_qubits() const {
        return 3 * distance + 6 * (distance - 1);
    }
    int num_syndrome_rounds() const {
        return 2 * rounds + 1;
    }
    int num_extraction_rounds() const {
        return 2 * rounds;
    }
    int detector_count() const {
        return 2 * checks_per_block() * num_syndrome_rounds();
    }
    bool operator==(const CodeSpec &) const = default;
};

enum class Role : uint8_t { Data, Flag, Syndrome, Ancilla };
enum class Block : uint8_t { Control = 0, Target = 1, Shared = 2 };

std::string_view role_name(Role r);
std::string_view block_name(Block b);

struct QubitInfo {
    int id = 0;
    Role role = Role::Data;
    Block block = Block::Control;
    int position = 0;
    bool operator==(const QubitInfo &) const = default;
};

using Edge = std::pair<int, int>;

/// Placement of logical chains onto a device: `physical[i]` is the device index
/// used for the i-th canonical qubit, `coupling` the device's usable two-qubit links.
struct DeviceMap {
    std::vector<int> physical;
    std::vector<Edge> coupling;
};

/// Qubit roles and connectivity of two flagged repetition-code blocks joined by
/// one ancilla per data pair.
///
/// Canonical order: control chain (data_0, flag_0, syn_0, flag_1, data_1, ...),
/// then the target chain, then the ancillas.
class Layout {
   public:
    int distance() const {
        return distance_;
    }
    const std::vector<QubitInfo> &qubits() const {
        return qubits_;
    }
    /// Sorted, each pair with first < second.
    const std::vector<Edge> &adjacency() const {
        return adjacency_;
    }
    /// One past the largest qubit id; the width of any frame over this layout.
    int width() const {
        return width_;
    }
    bool adjacent(int a, int b) const;

    int data(Block b, int k) const {
        return data_[idx(b)][k];
    }
    int flag(Block b, int j) const {
        return flag_[idx(b)][j];
    }
    int syndrome(Block b, int k) const {
        return syndrome_[idx(b)][k];
    }
    int ancilla(int k) const {
        return ancilla_[k];
    }
    /// Throws std::out_of_range for ids not in the layout.
    const QubitInfo &info(int id) const;

    bool operator==(const Layout &other) const {
        return distance_ == other.distance_ && qubits_ == other.qubits_ && adjacency_ == other.adjacency_;
    }

    friend Layout build_layout(const CodeSpec &spec, const std::optional<DeviceMap> &device_map);
    friend Layout layout_from_json(const nlohmann::json &j);

   private:
    static size_t idx(Block b) {
        return static_cast<size_t>(b);
    }
    void index();

    int distance_ = 0;
    int width_ = 0;
    std::vector<QubitInfo> qubits_;
    std::vector<Edge> adjacency_;
    std::array<std::vector<int>, 2> data_;
    std::array<std::vector<int>, 2> flag_;
    std::array<std::vector<int>, 2> syndrome_;
    std::vector<int> ancilla_;
    std::vector<int> slot_of_id_;
};

/// Throws ValidationError on size mismatch or when a required link is missing from the device coupling.
Layout build_layout(const CodeSpec &spec, const std::optional<DeviceMap> &device_map = std::nullopt);

nlohmann::json layout_to_json(const Layout &layout);
Layout layout_from_json(const nlohmann::json &j);

/// Pauli frame over `width` qubits; Y is both bits set. Signs are not tracked.
struct PauliFrame {
    BitVector x;
    BitVector z;

    PauliFrame() = default;
    explicit PauliFrame(size_t width) : x(width), z(width) {
    }
    size_t width() const {
        return x.size();
    }
    bool is_identity() const {
        return !x.any() && !z.any();
    }
    PauliFrame &operator^=(const PauliFrame &other) {
        x ^= other.x;
        z ^= other.z;
        return *this;
    }
    friend PauliFrame operator^(PauliFrame a, const PauliFrame &b) {
        a ^= b;
        return a;
    }
    bool operator==(const PauliFrame &) const = default;
};

enum class Gate : uint8_t { ResetZ, H, X, CNOT, CZ, MeasureZ, Idle };

std::string_view gate_name(Gate g);
int gate_arity(Gate g);

struct Instruction {
    Gate gate = Gate::H;
    std::array<int, 2> targets{-1, -1};
    int layer = 0;
    int record_slot = -1;   // MeasureZ only
    double duration = 0.0;  // Idle only, in measurement windows

    int arity() const {
        return gate_arity(gate);
    }
    bool is_two_qubit() const {
        return arity() == 2;
    }
    bool operator==(const Instruction &) const = default;
};

/// In-place conjugation of the frame by the ideal gate.
void apply_clifford(PauliFrame &frame, const Instruction &instr);

/// Pure form of apply_clifford.
PauliFrame propagate_frame(PauliFrame frame, const Instruction &instr);

}  // namespace repcnot
