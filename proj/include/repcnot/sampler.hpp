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
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "repcnot/bitvector.hpp"
#include "repcnot/circuit.hpp"
#include "repcnot/noise.hpp"

namespace repcnot {

/// Stabilizer tableau simulator (Aaronson-Gottesman) over the circuit's gate set.
class TableauSimulator {
   public:
    explicit TableauSimulator(int num_qubits);

    int num_qubits() const {
        return n_;
    }
    void h(int q);
    void x(int q);
    void cnot(int c, int t);
    void cz(int a, int b);
    /// Returns the outcome; `deterministic` reports whether it was forced.
    /// Random outcomes resolve to 0.
    bool measure(int q, bool *deterministic = nullptr);
    void reset(int q);
    /// Applies one instruction; returns the outcome of a MeasureZ, else false.
    bool apply(const Instruction &op, bool *deterministic = nullptr);

   private:
    bool row_x(int r, int q) const {
        return x_[r * n_ + q];
    }
    bool row_z(int r, int q) const {
        return z_[r * n_ + q];
    }
    void rowsum(int h, int i);

    int n_;
    std::vector<uint8_t> x_;
    std::vector<uint8_t> z_;
    std::vector<uint8_t> r_;
};

/// Noiseless outcome of every record. Throws std::logic_error when a record is
/// not deterministic.
BitVector reference_outcomes(const Circuit &circuit);

/// 64 Pauli frames processed side by side: bit `l` of each word belongs to lane `l`.
class FrameBatch {
   public:
    FrameBatch(int num_qubits, int num_records);

    void clear();
    void apply(const Instruction &op);
    /// XORs Pauli code `pauli` onto qubit `q` for the lanes in `mask`.
    void apply_pauli(int q, uint8_t pauli, uint64_t mask) {
        if (pauli_has_x(pauli)) {
            x_[q] ^= mask;
        }
        if (pauli_has_z(pauli)) {
            z_[q] ^= mask;
        }
    }
    uint64_t x(int q) const {
        return x_[q];
    }
    uint64_t z(int q) const {
        return z_[q];
    }
    /// Record flips, one word of lanes per slot.
    const std::vector<uint64_t> &records() const {
        return records_;
    }

   private:
    std::vector<uint64_t> x_;
    std::vector<uint64_t> z_;
    std::vector<uint64_t> records_;
};

/// Deterministic Pauli applied in every shot, for tests and fault studies.
struct PauliInjection {
    int instruction = 0;
    Timing timing = Timing::Before;
    int qubit = 0;
    uint8_t pauli = 1;  // 1 = X, 2 = Y, 3 = Z
};

struct SampleOptions {
    int threads = 1;
    std::vector<PauliInjection> injections;
};

/// One shot's record flips relative to the noiseless reference.
struct ShotRecord {
    BitVector raw_bits;
    uint64_t shot_index = 0;
    uint64_t seed = 0;
};

/// All shots of one sampling call; row `i` is shot `i`.
struct ShotRecords {
    BitMatrix bits;
    uint64_t seed = 0;

    size_t shots() const {
        return bits.rows();
    }
    ShotRecord shot(size_t i) const {
        return {bits.row(i), i, seed};
    }
};

/// Per-shot generator keyed by (seed, shot_index).
std::mt19937_64 shot_rng(uint64_t seed, uint64_t shot_index);

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Throws ValidationError when shots < 1.
ShotRecords sample(const NoisyCircuit &noisy, uint64_t shots, uint64_t seed, const SampleOptions &options = {});

struct DetectorLabel {
    Block block = Block::Control;
    int k = 0;
    int sr = 1;
    bool operator==(const DetectorLabel &) const = default;
};

/// Index of detector (block, k, sr): block-major, then sr, then k.
int detector_index(const CodeSpec &spec, Block block, int k, int sr);
DetectorLabel detector_label(const CodeSpec &spec, int index);

struct DetectionMatrix {
    CodeSpec spec;
    BitMatrix detections;  // shots x detector_count
    BitMatrix final_data;  // shots x 2d measured data outcomes: control 0..d-1, then target

    size_t shots() const {
        return detections.rows();
    }
    /// Parity of the final data outcomes of one block.
    bool raw_parity(size_t shot, Block block) const;
};

/// Throws ValidationError on a shape mismatch.
DetectionMatrix extract_detectors(const ShotRecords &records, const Circuit &circuit);

/// Detector flips for a single record-flip vector (no reference needed).
BitVector detectors_from_flips(const BitVector &flips, const Circuit &circuit);

/// Binary detection file plus `<path>.meta.json`. Throws IoError.
void write_detections(const std::filesystem::path &path, const DetectionMatrix &m, const nlohmann::json &extra_meta = {});
DetectionMatrix read_detections(const std::filesystem::path &path);
std::string detections_to_csv(const DetectionMatrix &m);

}  // namespace repcnot
