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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "repcnot/analysis.hpp"
#include "repcnot/pipeline.hpp"

using namespace repcnot;

namespace {

// Pinned thresholds.
constexpr double kTruthTableMaxSeconds = 10.0;
constexpr double kSingleFaultMaxSeconds = 120.0;
constexpr int kOracleRows = 1000;
constexpr int kOracleMaxDefects = 10;
constexpr uint64_t kEstimatorShots = 100000;
constexpr double kEstimatorSigmas = 3.0;
constexpr double kEstimatorBackground = 0.02;
constexpr uint64_t kSuppressionShots = 10000;
constexpr double kSuppressionSigmas = 2.0;
constexpr double kSuppressionMaxSeconds = 600.0;
constexpr uint64_t kGateFlowShots = 100000;
constexpr double kGateFlowMinRatio = 2.0;
constexpr int kNoiselessShots = 256;
constexpr uint64_t kSeed = 20240501;

const std::string kCalib = std::string(REPCNOT_DATA_DIR) + "/calibration/sherbrooke_median.json";

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int threads() {
    return std::max(1u, std::thread::hardware_concurrency());
}

CodeSpec make_spec(int d, int rounds, const LogicalState &state) {
    CodeSpec s;
    s.distance = d;
    s.rounds = rounds;
    s.basis = state.basis;
    s.initial_state = state;
    return s;
}

NoisyCircuit make_noisy(const CodeSpec &spec, const CalibrationTable &calib) {
    return attach_noise(build_memory_experiment(spec, build_layout(spec)), calib);
}

struct Outcome {
    DetectionMatrix detections;
    LogicalResult result;
};

Outcome simulate(const CodeSpec &spec, const CalibrationTable &calib, uint64_t shots, uint64_t seed) {
    NoisyCircuit noisy = make_noisy(spec, calib);
    Decoder decoder(build_syndrome_graph(enumerate_faults(noisy), &noisy));
    SampleOptions opts;
    opts.threads = threads();
    DetectionMatrix m = extract_detectors(sample(noisy, shots, seed, opts), noisy.base);
    DecodedShots decoded = decode_all(decoder, m, threads());
    LogicalResult r = logical_fidelity(decoded.control, decoded.target, spec.initial_state);
    return {std::move(m), r};
}

int failures = 0;

void report(const char *name, bool pass, const std::string &detail) {
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    failures += !pass;
}

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void noiseless_truth_table() {
    auto t0 = Clock::now();
    CalibrationTable zero = uniform_calibration(0, 0, 0, 0);
    int runs = 0, bad = 0;
    for (int d : {3, 5, 7}) {
        for (int rounds : {1, 3, 5}) {
            for (Basis basis : {Basis::Z, Basis::X}) {
                for (const auto &state : LogicalState::all(basis)) {
                    CodeSpec spec = make_spec(d, rounds, state);
                    Outcome o = simulate(spec, zero, kNoiselessShots, kSeed);
                    bool clean = true;
                    for (size_t s = 0; s < o.detections.shots(); s++) {
                        clean &= !o.detections.detections.row_any(s);
                    }
                    bool ok = clean && o.result.p_err == 0.0;
                    if (!ok) {
                        std::printf("  d=%d R=%d %s: detectors %s, p_err %g\n", d, rounds, state.name().c_str(),
                                    clean ? "zero" : "NONZERO", o.result.p_err);
                    }
                    bad += !ok;
                    runs++;
                }
            }
        }
    }
    double secs = since(t0);
    report("noiseless_truth_table", bad == 0 && secs < kTruthTableMaxSeconds,
           fmt("%d/%d runs with p_err=0 and zero detectors, %.2f s (limit %.0f s)", runs - bad, runs, secs,
               kTruthTableMaxSeconds));
}

void single_fault_coverage() {
    auto t0 = Clock::now();
    CalibrationTable calib = load_calibration_file(kCalib);
    size_t total = 0, bad = 0;
    for (int d : {3, 5}) {
        for (Basis basis : {Basis::Z, Basis::X}) {
            for (const auto &state : LogicalState::all(basis)) {
                NoisyCircuit noisy = make_noisy(make_spec(d, 2, state), calib);
                FaultCatalog catalog = enumerate_faults(noisy);
                Decoder decoder(build_syndrome_graph(catalog, &noisy));
                for (const auto &f : catalog.faults) {
                    BitVector row(catalog.spec.detector_count());
                    for (auto det : f.detectors) {
                        row.set(det, true);
                    }
                    total++;
                    if (decoder.decode(row).obs != f.obs) {
                        if (bad < 5) {
                            std::printf("  residual logical error: %s\n", f.describe(noisy).c_str());
                        }
                        bad++;
                    }
                }
            }
        }
    }
    double secs = since(t0);
    report("single_fault_coverage", bad == 0 && secs < kSingleFaultMaxSeconds,
           fmt("%zu/%zu faults decoded without residual error (d=3,5 R=2, 16 states), %.2f s (limit %.0f s)",
               total - bad, total, secs, kSingleFaultMaxSeconds));
}

void matching_oracle() {
    CalibrationTable calib = load_calibration_file(kCalib);
    NoisyCircuit noisy = make_noisy(make_spec(3, 1, LogicalState::parse("00")), calib);
    Decoder decoder(build_syndrome_graph(enumerate_faults(noisy), &noisy));
    int n = noisy.base.spec.detector_count();
    std::mt19937_64 rng(kSeed);
    int agree = 0;
    int defect_hist_max = 0;
    for (int trial = 0; trial < kOracleRows; trial++) {
        BitVector row(n);
        int defects = static_cast<int>(rng() % (kOracleMaxDefects + 1));
        std::vector<int> ids(n);
        for (int i = 0; i < n; i++) {
            ids[i] = i;
        }
        std::shuffle(ids.begin(), ids.end(), rng);
        for (int i = 0; i < defects; i++) {
            row.set(ids[i], true);
        }
        defect_hist_max = std::max(defect_hist_max, defects);
        agree += decoder.decode(row).cost == decoder.decode_brute_force(row).cost;
    }
    report("matching_oracle", agree == kOracleRows,
           fmt("%d/%d random rows (<=%d defects, d=3 R=1) with equal total matching weight", agree, kOracleRows,
               kOracleMaxDefects));
}

void estimator() {
    CodeSpec spec = make_spec(3, 1, LogicalState::parse("00"));
    int a = detector_index(spec, Block::Control, 1, 2);
    int b = detector_index(spec, Block::Target, 1, 2);
    bool pass = true;
    std::string detail;
    uint64_t seed = kSeed;
    for (double p : {0.01, 0.05, 0.1}) {
        DetectionMatrix m;
        m.spec = spec;
        m.detections = BitMatrix(kEstimatorShots, spec.detector_count());
        m.final_data = BitMatrix(kEstimatorShots, 2 * spec.distance);
        std::mt19937_64 rng(seed++);
        std::bernoulli_distribution cause(p), noise(kEstimatorBackground);
        for (size_t s = 0; s < kEstimatorShots; s++) {
            if (cause(rng)) {
                m.detections.flip(s, a);
                m.detections.flip(s, b);
            }
            for (int c = 0; c < spec.detector_count(); c++) {
                if (noise(rng)) {
                    m.detections.flip(s, c);
                }
            }
        }
        CorrelationMatrix corr = correlation_matrix(m, Ordering::SpaceMajor);
        size_t i = corr.position(detector_label(spec, a));
        size_t j = corr.position(detector_label(spec, b));
        double est = corr.at(i, j), se = corr.stderr_at(i, j);
        bool ok = se > 0 && std::abs(est - p) <= kEstimatorSigmas * se;
        pass &= ok;
        detail += fmt("%sp=%.2f est=%.5f se=%.5f (%.2f sigma)", detail.empty() ? "" : "; ", p, est, se,
                      se > 0 ? std::abs(est - p) / se : INFINITY);
    }
    report("pair_estimator", pass, detail + fmt(" [limit %.0f sigma, %llu shots]", kEstimatorSigmas,
                                                 static_cast<unsigned long long>(kEstimatorShots)));
}

void error_suppression() {
    auto t0 = Clock::now();
    CalibrationTable calib = load_calibration_file(kCalib);
    const int rounds = 5;
    bool pass = true;
    std::string detail;
    for (Basis basis : {Basis::Z, Basis::X}) {
        std::vector<double> mean, se;
        for (int d : {3, 5, 7}) {
            std::vector<LogicalResult> results;
            double var = 0;
            for (const auto &state : LogicalState::all(basis)) {
                CodeSpec spec = make_spec(d, rounds, state);
                results.push_back(
                    simulate(spec, calib, kSuppressionShots, derive_seed(kSeed, d, rounds, basis, state)).result);
                var += results.back().std_error * results.back().std_error;
            }
            mean.push_back(aggregate_error_rates(results).mean);
            se.push_back(std::sqrt(var) / 4);
        }
        for (int i = 0; i < 2; i++) {
            double gap = mean[i] - mean[i + 1];
            double combined = std::sqrt(se[i] * se[i] + se[i + 1] * se[i + 1]);
            pass &= gap > kSuppressionSigmas * combined;
        }
        detail += fmt("%s%s: d3=%.5f(%.5f) d5=%.5f(%.5f) d7=%.5f(%.5f)", detail.empty() ? "" : "; ",
                      std::string(basis_name(basis)).c_str(), mean[0], se[0], mean[1], se[1], mean[2], se[2]);
    }
    double secs = since(t0);
    pass &= secs < kSuppressionMaxSeconds;
    report("error_suppression", pass,
           detail + fmt(" [gaps > %.0f combined SE, 2R=10, %llu shots/state, %.1f s, limit %.0f s]",
                        kSuppressionSigmas, static_cast<unsigned long long>(kSuppressionShots), secs,
                        kSuppressionMaxSeconds));
}

void gate_flow_and_detection_jump() {
    CalibrationTable calib = load_calibration_file(kCalib);
    const int d = 5, rounds = 5;
    CodeSpec z = make_spec(d, rounds, LogicalState::parse("00"));
    Outcome oz = simulate(z, calib, kGateFlowShots, derive_seed(kSeed, d, rounds, Basis::Z, z.initial_state));
    GateFlowSignal g = gate_flow_signal(correlation_matrix(oz.detections, Ordering::SpaceMajor));
    report("gate_flow_signature", g.ratio >= kGateFlowMinRatio,
           fmt("signal %.5f over %zu pairs, background %.5f over %zu pairs, ratio %.2f (min %.1f; Z, d=5, 2R=10, "
               "%llu shots)",
               g.signal, g.signal_pairs, g.background, g.background_pairs, g.ratio, kGateFlowMinRatio,
               static_cast<unsigned long long>(kGateFlowShots)));

    CodeSpec x = make_spec(d, rounds, LogicalState::parse("++"));
    Outcome ox = simulate(x, calib, kGateFlowShots, derive_seed(kSeed, d, rounds, Basis::X, x.initial_state));
    auto pz = detection_probabilities(oz.detections);
    auto px = detection_probabilities(ox.detections);
    double zt_before = mean_detection_probability(pz, Block::Target, rounds);
    double zt_after = mean_detection_probability(pz, Block::Target, rounds + 1);
    double xc_before = mean_detection_probability(px, Block::Control, rounds);
    double xc_after = mean_detection_probability(px, Block::Control, rounds + 1);
    report("detection_probability_jump", zt_after > zt_before && xc_after > xc_before,
           fmt("Z target sr=%d: %.4f -> sr=%d: %.4f; X control sr=%d: %.4f -> sr=%d: %.4f", rounds, zt_before,
               rounds + 1, zt_after, rounds, xc_before, rounds + 1, xc_after));
}

void distance_property() {
    CalibrationTable calib = load_calibration_file(kCalib);
    size_t pairs = 0, violations = 0, singles = 0;
    bool weight_three_found = true;
    for (int rounds : {1, 2}) {
        for (Basis basis : {Basis::Z, Basis::X}) {
            for (const auto &state : LogicalState::all(basis)) {
                NoisyCircuit noisy = make_noisy(make_spec(3, rounds, state), calib);
                FaultCatalog catalog = enumerate_faults(noisy);
                const Layout &layout = noisy.base.layout;
                std::vector<const Fault *> data;
                for (const auto &f : catalog.faults) {
                    if (f.qubits[1] < 0 && layout.info(f.qubits[0]).role == Role::Data) {
                        data.push_back(&f);
                    }
                }
                int n = catalog.spec.detector_count();
                std::vector<BitVector> rows;
                for (const auto *f : data) {
                    BitVector r(n);
                    for (auto det : f->detectors) {
                        r.set(det, true);
                    }
                    rows.push_back(std::move(r));
                }
                for (size_t i = 0; i < data.size(); i++) {
                    singles++;
                    violations += !rows[i].any() && data[i]->obs != 0;
                    for (size_t j = i + 1; j < data.size(); j++) {
                        pairs++;
                        if ((data[i]->obs ^ data[j]->obs) != 0 && rows[i] == rows[j]) {
                            violations++;
                        }
                    }
                }
                // A weight-3 chain of initial flips on one block is an undetected logical error.
                std::vector<const Fault *> chain;
                for (const auto &f : catalog.faults) {
                    const auto &ch = noisy.channels[f.channel];
                    if (ch.kind == ChannelKind::FlipX && noisy.base.instructions[ch.instruction].gate == Gate::ResetZ &&
                        layout.info(ch.qubits[0]).role == Role::Data &&
                        layout.info(ch.qubits[0]).block == Block::Control) {
                        chain.push_back(&f);
                    }
                }
                auto [dets, obs] = propagate_faults(noisy, chain);
                weight_three_found &= chain.size() == 3 && !dets.any() && obs != 0;
            }
        }
    }
    report("distance_property", violations == 0 && weight_three_found,
           fmt("%zu single and %zu pair data-qubit fault patterns at d=3 (R=1,2, 8 states): %zu undetected logical "
               "flips; weight-3 undetected flip %s",
               singles, pairs, violations, weight_three_found ? "exists" : "MISSING"));
}

}  // namespace

int main() {
    auto t0 = Clock::now();
    std::vector<std::function<void()>> checks = {noiseless_truth_table, single_fault_coverage, matching_oracle,
                                                 estimator,             error_suppression,     gate_flow_and_detection_jump,
                                                 distance_property};
    for (auto &check : checks) {
        try {
            check();
        } catch (const std::exception &e) {
            report("exception", false, e.what());
        }
    }
    std::printf("%d failing criteria, %.1f s total\n", failures, since(t0));
    return failures == 0 ? 0 : 1;
}
