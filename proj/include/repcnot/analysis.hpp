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
#include "repcnot/decoder.hpp"
#include "repcnot/sampler.hpp"

namespace repcnot {

/// SpaceMajor: block, then sr, then k. TimeMajor: block, then k, then sr.
enum class Ordering : uint8_t { SpaceMajor, TimeMajor };

std::string_view ordering_name(Ordering o);
Ordering parse_ordering(std::string_view text);

/// Pairwise error probability from detection moments <xi>, <xj>, <xi xj>.
/// Undefined or negative values map to 0. Sets *clamped when that happened.
double pair_probability(double xi, double xj, double xij, bool *clamped = nullptr);

struct CorrelationMatrix {
    Ordering ordering = Ordering::SpaceMajor;
    CodeSpec spec;
    std::vector<DetectorLabel> labels;  // row/column labels in matrix order
    std::vector<double> values;         // n x n, row-major
    std::vector<double> stderrs;        // batch-means standard error, n x n
    int clamped = 0;                    // off-diagonal pairs (i < j) mapped to 0

    size_t size() const {
        return labels.size();
    }
    double at(size_t i, size_t j) const {
        return values[i * labels.size() + j];
    }
    double stderr_at(size_t i, size_t j) const {
        return stderrs[i * labels.size() + j];
    }
    /// Matrix position of a detector label.
    size_t position(const DetectorLabel &label) const;
};

/// Throws ValidationError when shots < 2.
CorrelationMatrix correlation_matrix(const DetectionMatrix &m, Ordering ordering, int batches = 20);

struct DetectionProbability {
    DetectorLabel label;
    double p = 0;
};

/// Fraction of shots in which each detector fired, in detector-index order.
std::vector<DetectionProbability> detection_probabilities(const DetectionMatrix &m);

/// Mean detection probability of one block at one syndrome round.
double mean_detection_probability(const std::vector<DetectionProbability> &probs, Block block, int sr);

struct LogicalResult {
    LogicalState initial;
    LogicalState ideal;
    size_t shots = 0;
    double exp_control = 0;  // <Z_C> or <X_C>
    double exp_target = 0;
    double exp_joint = 0;
    double fidelity = 0;
    double p_err = 0;
    double std_error = 0;
};

/// Throws ValidationError on empty or mismatched outcome vectors.
LogicalResult logical_fidelity(const std::vector<uint8_t> &control, const std::vector<uint8_t> &target,
                               const LogicalState &initial);

struct AggregateResult {
    Basis basis = Basis::Z;
    double mean = 0;
    double stddev = 0;  // population standard deviation
};

/// Throws ValidationError unless given exactly 4 same-basis entries.
AggregateResult aggregate_error_rates(const std::vector<LogicalResult> &results);

/// Cross-block correlation at locally corresponding nodes with the receiving
/// block at sr = R+1, versus all other cross-block entries.
struct GateFlowSignal {
    double signal = 0;
    double background = 0;
    double ratio = 0;
    size_t signal_pairs = 0;
    size_t background_pairs = 0;
};

GateFlowSignal gate_flow_signal(const CorrelationMatrix &corr);

std::string correlation_to_csv(const CorrelationMatrix &corr);
nlohmann::json correlation_to_json(const CorrelationMatrix &corr);
std::string detection_probabilities_to_csv(const std::vector<DetectionProbability> &probs);
nlohmann::json detection_probabilities_to_json(const std::vector<DetectionProbability> &probs);

/// One lograte row per state; mean/std are those of the state's (d, rounds, basis) group.
struct LogRateRow {
    int distance = 0;
    int rounds = 0;
    LogicalResult result;
    AggregateResult aggregate;
};

std::string lograte_header();
std::string lograte_to_csv(const std::vector<LogRateRow> &rows, bool header = true);
nlohmann::json lograte_to_json(const std::vector<LogRateRow> &rows);

}  // namespace repcnot
