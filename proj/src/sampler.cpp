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

#include "repcnot/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "repcnot/errors.hpp"

namespace repcnot {

// ---------------------------------------------------------------------------
// Tableau simulation.

TableauSimulator::TableauSimulator(int num_qubits)
    : n_(num_qubits),
      x_(static_cast<size_t>(2 * num_qubits + 1) * num_qubits, 0),
      z_(static_cast<size_t>(2 * num_qubits + 1) * num_qubits, 0),
      r_(2 * num_qubits + 1, 0) {
    for (int i = 0; i < n_; i++) {
        x_[i * n_ + i] = 1;
        z_[(n_ + i) * n_ + i] = 1;
    }
}

void TableauSimulator::h(int q) {
    for (int i = 0; i < 2 * n_; i++) {
        uint8_t &xi = x_[i * n_ + q];
        uint8_t &zi = z_[i * n_ + q];
        r_[i] ^= xi & zi;
        std::swap(xi, zi);
    }
}

void TableauSimulator::x(int q) {
    for (int i = 0; i < 2 * n_; i++) {
        r_[i] ^= z_[i * n_ + q];
    }
}

void TableauSimulator::cnot(int c, int t) {
    for (int i = 0; i < 2 * n_; i++) {
        uint8_t xc = x_[i * n_ + c], zc = z_[i * n_ + c];
        uint8_t xt = x_[i * n_ + t], zt = z_[i * n_ + t];
        r_[i] ^= xc & zt & (xt ^ zc ^ 1);
        x_[i * n_ + t] = xt ^ xc;
        z_[i * n_ + c] = zc ^ zt;
    }
}

void TableauSimulator::cz(int a, int b) {
    h(b);
    cnot(a, b);
    h(b);
}

namespace {

// Exponent of i contributed when multiplying Pauli (x1,z1) by (x2,z2).
int pauli_phase(int x1, int z1, int x2, int z2) {
    if (!x1 && !z1) {
        return 0;
    }
    if (x1 && z1) {
        return z2 - x2;
    }
    if (x1) {
        return z2 * (2 * x2 - 1);
    }
    return x2 * (1 - 2 * z2);
}

}  // namespace

void TableauSimulator::rowsum(int h, int i) {
    int phase = 2 * r_[h] + 2 * r_[i];
    for (int j = 0; j < n_; j++) {
        phase += pauli_phase(x_[i * n_ + j], z_[i * n_ + j], x_[h * n_ + j], z_[h * n_ + j]);
        x_[h * n_ + j] ^= x_[i * n_ + j];
        z_[h * n_ + j] ^= z_[i * n_ + j];
    }
    phase = ((phase % 4) + 4) % 4;
    r_[h] = phase == 2;
}

bool TableauSimulator::measure(int q, bool *deterministic) {
    int p = -1;
    for (int i = n_; i < 2 * n_; i++) {
        if (x_[i * n_ + q]) {
            p = i;
            break;
        }
    }
    if (p >= 0) {
        for (int i = 0; i < 2 * n_; i++) {
            if (i != p && x_[i * n_ + q]) {
                rowsum(i, p);
            }
        }
        std::memcpy(&x_[(p - n_) * n_], &x_[p * n_], n_);
        std::memcpy(&z_[(p - n_) * n_], &z_[p * n_], n_);
        r_[p - n_] = r_[p];
        std::memset(&x_[p * n_], 0, n_);
        std::memset(&z_[p * n_], 0, n_);
        z_[p * n_ + q] = 1;
        r_[p] = 0;
        if (deterministic) {
            *deterministic = false;
        }
        return false;
    }
    int s = 2 * n_;
    std::memset(&x_[s * n_], 0, n_);
    std::memset(&z_[s * n_], 0, n_);
    r_[s] = 0;
    for (int i = 0; i < n_; i++) {
        if (x_[i * n_ + q]) {
            rowsum(s, i + n_);
        }
    }
    if (deterministic) {
        *deterministic = true;
    }
    return r_[s];
}

void TableauSimulator::reset(int q) {
    if (measure(q)) {
        x(q);
    }
}

bool TableauSimulator::apply(const Instruction &op, bool *deterministic) {
    int a = op.targets[0];
    int b = op.targets[1];
    switch (op.gate) {
        case Gate::ResetZ:
            reset(a);
            break;
        case Gate::H:
            h(a);
            break;
        case Gate::X:
            x(a);
            break;
        case Gate::CNOT:
            cnot(a, b);
            break;
        case Gate::CZ:
            cz(a, b);
            break;
        case Gate::MeasureZ:
            return measure(a, deterministic);
        case Gate::Idle:
            break;
    }
    return false;
}

BitVector reference_outcomes(const Circuit &circuit) {
    TableauSimulator sim(circuit.layout.width());
    BitVector out(circuit.records.size());
    for (const auto &op : circuit.instructions) {
        bool det = true;
        bool v = sim.apply(op, &det);
        if (op.gate == Gate::MeasureZ) {
            if (!det) {
                throw std::logic_error("record " + std::to_string(op.record_slot) + " on qubit " +
                                       std::to_string(op.targets[0]) + " is not deterministic");
            }
            out.set(op.record_slot, v);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Frame simulation.

FrameBatch::FrameBatch(int num_qubits, int num_records)
    : x_(num_qubits, 0), z_(num_qubits, 0), records_(num_records, 0) {
}

void FrameBatch::clear() {
    std::fill(x_.begin(), x_.end(), 0);
    std::fill(z_.begin(), z_.end(), 0);
    std::fill(records_.begin(), records_.end(), 0);
}

void FrameBatch::apply(const Instruction &op) {
    int a = op.targets[0];
    int b = op.targets[1];
    switch (op.gate) {
        case Gate::ResetZ:
            x_[a] = 0;
            z_[a] = 0;
            break;
        case Gate::H:
            std::swap(x_[a], z_[a]);
            break;
        case Gate::X:
        case Gate::Idle:
            break;
        case Gate::CNOT:
            x_[b] ^= x_[a];
            z_[a] ^= z_[b];
            break;
        case Gate::CZ:
            z_[a] ^= x_[b];
            z_[b] ^= x_[a];
            break;
        case Gate::MeasureZ:
            records_[op.record_slot] = x_[a];
            break;
    }
}

std::mt19937_64 shot_rng(uint64_t seed, uint64_t shot_index) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                      static_cast<uint32_t>(shot_index), static_cast<uint32_t>(shot_index >> 32)};
    return std::mt19937_64(seq);
}

namespace {

struct InjectionPlan {
    // Injections keyed by schedule position; applied before the op at that position.
    std::vector<std::vector<PauliInjection>> at;
    std::vector<PauliInjection> tail;
};

InjectionPlan plan_injections(const NoisyCircuit &noisy, const std::vector<PauliInjection> &injections) {
    InjectionPlan plan;
    plan.at.resize(noisy.schedule.size());
    int n = static_cast<int>(noisy.base.instructions.size());
    for (const auto &inj : injections) {
        if (inj.instruction < 0 || inj.instruction >= n) {
            throw ValidationError("injection targets unknown instruction " + std::to_string(inj.instruction));
        }
        if (inj.qubit < 0 || inj.qubit >= noisy.base.layout.width()) {
            throw ValidationError("injection targets unknown qubit " + std::to_string(inj.qubit));
        }
        size_t pos = noisy.schedule_position(inj.instruction);
        if (inj.timing == Timing::After) {
            pos++;
        }
        if (pos >= plan.at.size()) {
            plan.tail.push_back(inj);
        } else {
            plan.at[pos].push_back(inj);
        }
    }
    return plan;
}

void run_batch(const NoisyCircuit &noisy, const InjectionPlan &plan, uint64_t seed, uint64_t first_shot, int lanes,
               FrameBatch &frame, std::vector<std::mt19937_64> &rngs) {
    frame.clear();
    for (int l = 0; l < lanes; l++) {
        rngs[l] = shot_rng(seed, first_shot + l);
    }
    uint64_t all = lanes == 64 ? ~uint64_t{0} : ((uint64_t{1} << lanes) - 1);
    const auto &instrs = noisy.base.instructions;
    for (size_t pos = 0; pos < noisy.schedule.size(); pos++) {
        for (const auto &inj : plan.at[pos]) {
            frame.apply_pauli(inj.qubit, inj.pauli, all);
        }
        const ScheduledOp &s = noisy.schedule[pos];
        if (!s.is_channel) {
            frame.apply(instrs[s.index]);
            continue;
        }
        const NoiseChannel &ch = noisy.channels[s.index];
        if (ch.p <= 0) {
            continue;
        }
        int terms = ch.num_terms();
        for (int l = 0; l < lanes; l++) {
            double u = uniform01(rngs[l]);
            if (u >= ch.p) {
                continue;
            }
            int term = std::min(static_cast<int>(u * terms / ch.p), terms - 1);
            auto paulis = channel_term_paulis(ch.kind, term);
            uint64_t bit = uint64_t{1} << l;
            frame.apply_pauli(ch.qubits[0], paulis[0], bit);
            if (ch.arity() == 2) {
                frame.apply_pauli(ch.qubits[1], paulis[1], bit);
            }
        }
    }
}

}  // namespace

ShotRecords sample(const NoisyCircuit &noisy, uint64_t shots, uint64_t seed, const SampleOptions &options) {
    if (shots < 1) {
        throw ValidationError("shots must be at least 1");
    }
    const Circuit &c = noisy.base;
    InjectionPlan plan = plan_injections(noisy, options.injections);
    int num_records = static_cast<int>(c.records.size());
    ShotRecords out;
    out.seed = seed;
    out.bits = BitMatrix(shots, num_records);
    uint64_t batches = (shots + 63) / 64;
    int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(batches)));
    std::atomic<uint64_t> next{0};

    auto worker = [&]() {
        FrameBatch frame(c.layout.width(), num_records);
        std::vector<std::mt19937_64> rngs(64);
        for (uint64_t b = next++; b < batches; b = next++) {
            uint64_t first = b * 64;
            int lanes = static_cast<int>(std::min<uint64_t>(64, shots - first));
            run_batch(noisy, plan, seed, first, lanes, frame, rngs);
            const auto &rec = frame.records();
            for (int slot = 0; slot < num_records; slot++) {
                uint64_t w = rec[slot];
                while (w) {
                    int l = std::countr_zero(w);
                    w &= w - 1;
                    if (l < lanes) {
                        out.bits.set(first + l, slot, true);
                    }
                }
            }
        }
    };
    // Rows of different batches live in disjoint words, so workers never share memory.
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; t++) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Detectors.

int detector_index(const CodeSpec &spec, Block block, int k, int sr) {
    int m = spec.checks_per_block();
    return static_cast<int>(block) * m * spec.num_syndrome_rounds() + (sr - 1) * m + k;
}

DetectorLabel detector_label(const CodeSpec &spec, int index) {
    int m = spec.checks_per_block();
    int per_block = m * spec.num_syndrome_rounds();
    if (index < 0 || index >= 2 * per_block) {
        throw std::out_of_range("detector index " + std::to_string(index));
    }
    DetectorLabel label;
    label.block = index < per_block ? Block::Control : Block::Target;
    int rem = index % per_block;
    label.sr = rem / m + 1;
    label.k = rem % m;
    return label;
}

bool DetectionMatrix::raw_parity(size_t shot, Block block) const {
    int d = spec.distance;
    int base = block == Block::Control ? 0 : d;
    bool p = false;
    for (int k = 0; k < d; k++) {
        p ^= final_data.get(shot, base + k);
    }
    return p;
}

namespace {

template <typename Get>
void fill_detectors(const Circuit &c, Get get, BitMatrix &out, size_t row) {
    const CodeSpec &spec = c.spec;
    int m = spec.checks_per_block();
    int rounds = spec.num_extraction_rounds();
    for (Block b : {Block::Control, Block::Target}) {
        for (int k = 0; k < m; k++) {
            bool prev = false;
            for (int r = 1; r <= rounds; r++) {
                bool s = get(c.syndrome_slot(b, k, r)) ^ get(c.flag_slot(b, 2 * k, r)) ^ get(c.flag_slot(b, 2 * k + 1, r));
                if (s != prev) {
                    out.set(row, detector_index(spec, b, k, r), true);
                }
                prev = s;
            }
            bool final_check = get(c.data_slot(b, k)) ^ get(c.data_slot(b, k + 1));
            if (final_check != prev) {
                out.set(row, detector_index(spec, b, k, rounds + 1), true);
            }
        }
    }
}

}  // namespace

DetectionMatrix extract_detectors(const ShotRecords &records, const Circuit &circuit) {
    if (records.bits.cols() != circuit.records.size()) {
        throw ValidationError("record count " + std::to_string(records.bits.cols()) + " does not match circuit (" +
                              std::to_string(circuit.records.size()) + ")");
    }
    BitVector ref = reference_outcomes(circuit);
    DetectionMatrix m;
    m.spec = circuit.spec;
    size_t shots = records.shots();
    int d = circuit.spec.distance;
    m.detections = BitMatrix(shots, circuit.spec.detector_count());
    m.final_data = BitMatrix(shots, 2 * d);
    for (size_t s = 0; s < shots; s++) {
        fill_detectors(circuit, [&](int slot) { return records.bits.get(s, slot); }, m.detections, s);
        for (Block b : {Block::Control, Block::Target}) {
            for (int k = 0; k < d; k++) {
                int slot = circuit.data_slot(b, k);
                m.final_data.set(s, static_cast<int>(b) * d + k, records.bits.get(s, slot) ^ ref.get(slot));
            }
        }
    }
    return m;
}

BitVector detectors_from_flips(const BitVector &flips, const Circuit &circuit) {
    if (flips.size() != circuit.records.size()) {
        throw ValidationError("record count does not match circuit");
    }
    BitMatrix tmp(1, circuit.spec.detector_count());
    fill_detectors(circuit, [&](int slot) { return flips.get(slot); }, tmp, 0);
    return tmp.row(0);
}

// ---------------------------------------------------------------------------
// Files.

namespace {

constexpr char kMagic[4] = {'R', 'C', 'D', '1'};

template <typename T>
void put(std::ostream &out, T v) {
    unsigned char buf[sizeof(T)];
    for (size_t i = 0; i < sizeof(T); i++) {
        buf[i] = static_cast<unsigned char>((static_cast<uint64_t>(v) >> (8 * i)) & 0xFF);
    }
    out.write(reinterpret_cast<const char *>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream &in) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char *>(buf), sizeof(T))) {
        throw IoError("truncated detection file header");
    }
    uint64_t v = 0;
    for (size_t i = 0; i < sizeof(T); i++) {
        v |= static_cast<uint64_t>(buf[i]) << (8 * i);
    }
    return static_cast<T>(v);
}

void write_rows(std::ostream &out, const BitMatrix &m) {
    size_t nbytes = (m.cols() + 7) / 8;
    std::vector<char> buf(nbytes);
    for (size_t r = 0; r < m.rows(); r++) {
        std::fill(buf.begin(), buf.end(), 0);
        for (size_t c = 0; c < m.cols(); c++) {
            if (m.get(r, c)) {
                buf[c / 8] = static_cast<char>(buf[c / 8] | (1 << (c % 8)));
            }
        }
        out.write(buf.data(), static_cast<std::streamsize>(nbytes));
    }
}

void read_rows(std::istream &in, BitMatrix &m) {
    size_t nbytes = (m.cols() + 7) / 8;
    std::vector<unsigned char> buf(nbytes);
    for (size_t r = 0; r < m.rows(); r++) {
        if (!in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(nbytes))) {
            throw IoError("truncated detection file body");
        }
        for (size_t c = 0; c < m.cols(); c++) {
            if ((buf[c / 8] >> (c % 8)) & 1) {
                m.set(r, c, true);
            }
        }
    }
}

std::filesystem::path meta_path(const std::filesystem::path &path) {
    return path.string() + ".meta.json";
}

}  // namespace

void write_detections(const std::filesystem::path &path, const DetectionMatrix &m, const nlohmann::json &extra_meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    const CodeSpec &spec = m.spec;
    out.write(kMagic, 4);
    put<uint32_t>(out, spec.distance);
    put<uint32_t>(out, spec.rounds);
    put<uint8_t>(out, static_cast<uint8_t>(spec.basis));
    put<uint8_t>(out, static_cast<uint8_t>((spec.initial_state.control ? 2 : 0) | (spec.initial_state.target ? 1 : 0)));
    put<uint16_t>(out, 0);
    put<uint64_t>(out, m.shots());
    put<uint32_t>(out, m.detections.cols());
    put<uint32_t>(out, m.final_data.cols());
    write_rows(out, m.detections);
    write_rows(out, m.final_data);
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
    nlohmann::json meta = {{"format", "RCD1"},
                           {"spec", code_spec_to_json(spec)},
                           {"shots", m.shots()},
                           {"detector_count", m.detections.cols()},
                           {"data_bits", m.final_data.cols()},
                           {"bit_order", "lsb_first"},
                           {"detector_ordering", "block, sr, k"}};
    if (extra_meta.is_object()) {
        meta.update(extra_meta);
    }
    std::ofstream mo(meta_path(path));
    if (!mo) {
        throw IoError("cannot write " + meta_path(path).string());
    }
    mo << meta.dump(2) << '\n';
}

DetectionMatrix read_detections(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError(path.string() + " is not a detection file");
    }
    DetectionMatrix m;
    m.spec.distance = static_cast<int>(get_le<uint32_t>(in));
    m.spec.rounds = static_cast<int>(get_le<uint32_t>(in));
    uint8_t basis = get_le<uint8_t>(in);
    uint8_t state = get_le<uint8_t>(in);
    get_le<uint16_t>(in);
    if (basis > 1) {
        throw IoError("bad basis byte in " + path.string());
    }
    m.spec.basis = static_cast<Basis>(basis);
    m.spec.initial_state = {m.spec.basis, (state & 2) != 0, (state & 1) != 0};
    uint64_t shots = get_le<uint64_t>(in);
    uint32_t detectors = get_le<uint32_t>(in);
    uint32_t data_bits = get_le<uint32_t>(in);
    try {
        m.spec.validate();
    } catch (const ValidationError &e) {
        throw IoError("bad header in " + path.string() + ": " + e.what());
    }
    if (static_cast<int>(detectors) != m.spec.detector_count() || static_cast<int>(data_bits) != 2 * m.spec.distance) {
        throw IoError("inconsistent header in " + path.string());
    }
    m.detections = BitMatrix(shots, detectors);
    m.final_data = BitMatrix(shots, data_bits);
    read_rows(in, m.detections);
    read_rows(in, m.final_data);
    return m;
}

std::string detections_to_csv(const DetectionMatrix &m) {
    std::ostringstream out;
    out << "shot";
    for (size_t i = 0; i < m.detections.cols(); i++) {
        auto l = detector_label(m.spec, static_cast<int>(i));
        out << ",D_" << block_name(l.block) << "_" << l.k << "_" << l.sr;
    }
    int d = m.spec.distance;
    for (size_t i = 0; i < m.final_data.cols(); i++) {
        out << ",data_" << block_name(i < static_cast<size_t>(d) ? Block::Control : Block::Target) << "_" << (i % d);
    }
    out << '\n';
    for (size_t s = 0; s < m.shots(); s++) {
        out << s;
        for (size_t i = 0; i < m.detections.cols(); i++) {
            out << ',' << (m.detections.get(s, i) ? 1 : 0);
        }
        for (size_t i = 0; i < m.final_data.cols(); i++) {
            out << ',' << (m.final_data.get(s, i) ? 1 : 0);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace repcnot
