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

#include "repcnot/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "repcnot/errors.hpp"

namespace repcnot {

namespace {

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<DetectorLabel> ordered_labels(const CodeSpec &spec, Ordering ordering) {
    std::vector<DetectorLabel> out;
    int m = spec.checks_per_block();
    int srs = spec.num_syndrome_rounds();
    for (Block b : {Block::Control, Block::Target}) {
        if (ordering == Ordering::SpaceMajor) {
            for (int sr = 1; sr <= srs; sr++) {
                for (int k = 0; k < m; k++) {
                    out.push_back({b, k, sr});
                }
            }
        } else {
            for (int k = 0; k < m; k++) {
                for (int sr = 1; sr <= srs; sr++) {
                    out.push_back({b, k, sr});
                }
            }
        }
    }
    return out;
}

}  // namespace

std::string_view ordering_name(Ordering o) {
    return o == Ordering::SpaceMajor ? "space_major" : "time_major";
}

Ordering parse_ordering(std::string_view text) {
    if (text == "space_major" || text == "space") {
        return Ordering::SpaceMajor;
    }
    if (text == "time_major" || text == "time") {
        return Ordering::TimeMajor;
    }
    throw ValidationError("unknown ordering '" + std::string(text) + "'");
}

double pair_probability(double xi, double xj, double xij, bool *clamped) {
    double denom = 1 - 2 * xi - 2 * xj + 4 * xij;
    double radicand = 1 - 4 * (xij - xi * xj) / denom;
    double p = 0.5 * (1 - std::sqrt(radicand));
    bool bad = !std::isfinite(p) || p < 0;
    if (clamped) {
        *clamped = bad;
    }
    return bad ? 0.0 : p;
}

size_t CorrelationMatrix::position(const DetectorLabel &label) const {
    for (size_t i = 0; i < labels.size(); i++) {
        if (labels[i] == label) {
            return i;
        }
    }
    throw std::out_of_range("detector label not in matrix");
}

CorrelationMatrix correlation_matrix(const DetectionMatrix &m, Ordering ordering, int batches) {
    size_t shots = m.shots();
    if (shots < 2) {
        throw ValidationError("correlation analysis needs at least 2 shots");
    }
    CorrelationMatrix out;
    out.ordering = ordering;
    out.spec = m.spec;
    out.labels = ordered_labels(m.spec, ordering);
    size_t n = out.labels.size();
    if (n != m.detections.cols()) {
        throw ValidationError("detection matrix width does not match its code spec");
    }
    // Columns as packed shot vectors.
    std::vector<BitVector> cols(n, BitVector(shots));
    for (size_t s = 0; s < shots; s++) {
        for (size_t i = 0; i < n; i++) {
            int idx = detector_index(m.spec, out.labels[i].block, out.labels[i].k, out.labels[i].sr);
            if (m.detections.get(s, idx)) {
                cols[i].set(s, true);
            }
        }
    }
    size_t words = (shots + 63) / 64;
    batches = static_cast<int>(std::clamp<size_t>(batches, 1, words));
    std::vector<size_t> edges(batches + 1);
    for (int b = 0; b <= batches; b++) {
        edges[b] = words * b / batches;
    }
    auto shots_in = [&](size_t w0, size_t w1) { return std::min(shots, w1 * 64) - w0 * 64; };
    auto count = [&](size_t i, size_t j, size_t w0, size_t w1) {
        auto a = cols[i].words();
        auto c = cols[j].words();
        size_t total = 0;
        for (size_t w = w0; w < w1; w++) {
            total += std::popcount(a[w] & c[w]);
        }
        return total;
    };

    out.values.assign(n * n, 0.0);
    out.stderrs.assign(n * n, 0.0);
    std::vector<double> singles(n);
    for (size_t i = 0; i < n; i++) {
        singles[i] = static_cast<double>(cols[i].popcount()) / shots;
    }
    std::vector<std::vector<double>> batch_singles(batches, std::vector<double>(n));
    for (int b = 0; b < batches; b++) {
        double ns = static_cast<double>(shots_in(edges[b], edges[b + 1]));
        for (size_t i = 0; i < n; i++) {
            batch_singles[b][i] = count(i, i, edges[b], edges[b + 1]) / ns;
        }
    }
    for (size_t i = 0; i < n; i++) {
        for (size_t j = i + 1; j < n; j++) {
            double xij = static_cast<double>(count(i, j, 0, words)) / shots;
            bool clamped = false;
            double p = pair_probability(singles[i], singles[j], xij, &clamped);
            out.clamped += clamped;
            out.values[i * n + j] = out.values[j * n + i] = p;
            double se = 0;
            if (batches > 1) {
                double sum = 0, sum2 = 0;
                for (int b = 0; b < batches; b++) {
                    double ns = static_cast<double>(shots_in(edges[b], edges[b + 1]));
                    double pb =
                        pair_probability(batch_singles[b][i], batch_singles[b][j], count(i, j, edges[b], edges[b + 1]) / ns);
                    sum += pb;
                    sum2 += pb * pb;
                }
                double mean = sum / batches;
                double var = std::max(0.0, (sum2 - batches * mean * mean) / (batches - 1));
                se = std::sqrt(var / batches);
            }
            out.stderrs[i * n + j] = out.stderrs[j * n + i] = se;
        }
    }
    return out;
}

std::vector<DetectionProbability> detection_probabilities(const DetectionMatrix &m) {
    size_t n = m.detections.cols();
    std::vector<size_t> counts(n, 0);
    for (size_t s = 0; s < m.shots(); s++) {
        auto row = m.detections.row_words(s);
        for (size_t w = 0; w < row.size(); w++) {
            uint64_t v = row[w];
            while (v) {
                counts[w * 64 + std::countr_zero(v)]++;
                v &= v - 1;
            }
        }
    }
    std::vector<DetectionProbability> out(n);
    double shots = static_cast<double>(std::max<size_t>(1, m.shots()));
    for (size_t i = 0; i < n; i++) {
        out[i].label = detector_label(m.spec, static_cast<int>(i));
        out[i].p = m.shots() ? counts[i] / shots : 0.0;
    }
    return out;
}

double mean_detection_probability(const std::vector<DetectionProbability> &probs, Block block, int sr) {
    double sum = 0;
    int n = 0;
    for (const auto &p : probs) {
        if (p.label.block == block && p.label.sr == sr) {
            sum += p.p;
            n++;
        }
    }
    return n ? sum / n : 0.0;
}

LogicalResult logical_fidelity(const std::vector<uint8_t> &control, const std::vector<uint8_t> &target,
                               const LogicalState &initial) {
    if (control.empty() || control.size() != target.size()) {
        throw ValidationError("logical fidelity needs a non-empty, matched set of outcomes");
    }
    LogicalResult r;
    r.initial = initial;
    r.ideal = ideal_output_state(initial);
    r.shots = control.size();
    double n = static_cast<double>(r.shots);
    size_t flips_c = 0, flips_t = 0, flips_j = 0;
    for (size_t s = 0; s < control.size(); s++) {
        flips_c += control[s] & 1;
        flips_t += target[s] & 1;
        flips_j += (control[s] ^ target[s]) & 1;
    }
    double qc = flips_c / n, qt = flips_t / n, qj = flips_j / n;
    r.exp_control = 1 - 2 * qc;
    r.exp_target = 1 - 2 * qt;
    r.exp_joint = 1 - 2 * qj;
    double sc = r.ideal.control ? -1 : 1;
    double st = r.ideal.target ? -1 : 1;
    r.fidelity = 0.25 * (1 + sc * r.exp_control + st * r.exp_target + sc * st * r.exp_joint);
    r.fidelity = std::clamp(r.fidelity, 0.0, 1.0);
    r.p_err = 1 - r.fidelity;
    // Var of a +-1 mean with flip rate q is 4q(1-q)/n.
    double var = 4 * (qc * (1 - qc) + qt * (1 - qt) + qj * (1 - qj)) / n;
    r.std_error = 0.25 * std::sqrt(var);
    return r;
}

AggregateResult aggregate_error_rates(const std::vector<LogicalResult> &results) {
    if (results.size() != 4) {
        throw ValidationError("aggregation needs exactly 4 states, got " + std::to_string(results.size()));
    }
    AggregateResult a;
    a.basis = results[0].initial.basis;
    for (const auto &r : results) {
        if (r.initial.basis != a.basis) {
            throw ValidationError("aggregation over mixed bases");
        }
        a.mean += r.p_err / 4;
    }
    double var = 0;
    for (const auto &r : results) {
        var += (r.p_err - a.mean) * (r.p_err - a.mean) / 4;
    }
    a.stddev = std::sqrt(var);
    return a;
}

GateFlowSignal gate_flow_signal(const CorrelationMatrix &corr) {
    const CodeSpec &spec = corr.spec;
    int mid = spec.rounds + 1;
    Block sender = spec.basis == Basis::Z ? Block::Control : Block::Target;
    GateFlowSignal g;
    double sig = 0, bg = 0;
    size_t n = corr.size();
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            const auto &a = corr.labels[i];
            const auto &b = corr.labels[j];
            if (a.block != sender || b.block == sender) {
                continue;
            }
            if (a.k == b.k && a.sr <= mid && b.sr == mid) {
                sig += corr.at(i, j);
                g.signal_pairs++;
            } else {
                bg += corr.at(i, j);
                g.background_pairs++;
            }
        }
    }
    g.signal = g.signal_pairs ? sig / g.signal_pairs : 0.0;
    g.background = g.background_pairs ? bg / g.background_pairs : 0.0;
    g.ratio = g.background > 0 ? g.signal / g.background : (g.signal > 0 ? INFINITY : 0.0);
    return g;
}

std::string correlation_to_csv(const CorrelationMatrix &corr) {
    std::ostringstream out;
    size_t n = corr.size();
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            if (j) {
                out << ',';
            }
            out << fmt(corr.at(i, j));
        }
        out << '\n';
    }
    return out.str();
}

nlohmann::json correlation_to_json(const CorrelationMatrix &corr) {
    nlohmann::json labels = nlohmann::json::array();
    for (const auto &l : corr.labels) {
        labels.push_back({{"block", block_name(l.block)}, {"k", l.k}, {"sr", l.sr}});
    }
    size_t n = corr.size();
    nlohmann::json values = nlohmann::json::array();
    nlohmann::json errs = nlohmann::json::array();
    for (size_t i = 0; i < n; i++) {
        values.push_back(std::vector<double>(corr.values.begin() + i * n, corr.values.begin() + (i + 1) * n));
        errs.push_back(std::vector<double>(corr.stderrs.begin() + i * n, corr.stderrs.begin() + (i + 1) * n));
    }
    return {{"spec", code_spec_to_json(corr.spec)},
            {"ordering", ordering_name(corr.ordering)},
            {"labels", labels},
            {"values", values},
            {"stderr", errs},
            {"clamped", corr.clamped}};
}

std::string detection_probabilities_to_csv(const std::vector<DetectionProbability> &probs) {
    std::ostringstream out;
    out << "block,k,sr,p\n";
    for (const auto &p : probs) {
        out << block_name(p.label.block) << ',' << p.label.k << ',' << p.label.sr << ',' << fmt(p.p) << '\n';
    }
    return out.str();
}

nlohmann::json detection_probabilities_to_json(const std::vector<DetectionProbability> &probs) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &p : probs) {
        out.push_back({{"block", block_name(p.label.block)}, {"k", p.label.k}, {"sr", p.label.sr}, {"p", p.p}});
    }
    return out;
}

std::string lograte_header() {
    return "d,rounds,basis,state,p_err,stderr,mean,std\n";
}

std::string lograte_to_csv(const std::vector<LogRateRow> &rows, bool header) {
    std::ostringstream out;
    if (header) {
        out << lograte_header();
    }
    for (const auto &r : rows) {
        out << r.distance << ',' << r.rounds << ',' << basis_name(r.result.initial.basis) << ','
            << r.result.initial.name() << ',' << fmt(r.result.p_err) << ',' << fmt(r.result.std_error) << ','
            << fmt(r.aggregate.mean) << ',' << fmt(r.aggregate.stddev) << '\n';
    }
    return out.str();
}

nlohmann::json lograte_to_json(const std::vector<LogRateRow> &rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &r : rows) {
        out.push_back({{"d", r.distance},
                       {"rounds", r.rounds},
                       {"basis", basis_name(r.result.initial.basis)},
                       {"state", r.result.initial.name()},
                       {"p_err", r.result.p_err},
                       {"stderr", r.result.std_error},
                       {"mean", r.aggregate.mean},
                       {"std", r.aggregate.stddev}});
    }
    return out;
}

}  // namespace repcnot
