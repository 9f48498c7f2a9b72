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

#include "repcnot/pipeline.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "repcnot/errors.hpp"

namespace repcnot {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string decoded_to_csv(const DecodedShots &d) {
    std::ostringstream out;
    out << "shot,control,target\n";
    for (size_t s = 0; s < d.control.size(); s++) {
        out << s << ',' << int(d.control[s]) << ',' << int(d.target[s]) << '\n';
    }
    return out.str();
}

}  // namespace

OutputFormat parse_format(std::string_view text) {
    if (text == "csv") {
        return OutputFormat::Csv;
    }
    if (text == "json") {
        return OutputFormat::Json;
    }
    throw ValidationError("unknown format '" + std::string(text) + "' (expected csv or json)");
}

void RunConfig::validate() const {
    spec.validate();
    if (shots < 1) {
        throw ValidationError("shots must be at least 1");
    }
    if (calib_path.empty()) {
        throw ValidationError("a calibration file is required");
    }
    if (out_dir.empty()) {
        throw ValidationError("an output directory is required");
    }
    if (threads < 1) {
        throw ValidationError("threads must be at least 1");
    }
}

nlohmann::json run_config_to_json(const RunConfig &c) {
    nlohmann::json orderings = nlohmann::json::array();
    for (auto o : c.orderings) {
        orderings.push_back(ordering_name(o));
    }
    return {{"spec", code_spec_to_json(c.spec)},
            {"calib", c.calib_path},
            {"shots", c.shots},
            {"seed", c.seed},
            {"out", c.out_dir},
            {"orderings", orderings},
            {"format", c.format == OutputFormat::Csv ? "csv" : "json"}};
}

RunConfig run_config_from_json(const nlohmann::json &j_in) {
    const nlohmann::json &j = j_in.contains("config") ? j_in.at("config") : j_in;
    RunConfig c;
    try {
        c.spec = code_spec_from_json(j.at("spec"));
        c.calib_path = j.at("calib").get<std::string>();
        c.shots = j.at("shots").get<uint64_t>();
        c.seed = j.at("seed").get<uint64_t>();
        c.out_dir = j.at("out").get<std::string>();
        c.orderings.clear();
        for (const auto &o : j.at("orderings")) {
            c.orderings.push_back(parse_ordering(o.get<std::string>()));
        }
        c.format = parse_format(j.value("format", std::string("csv")));
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed run config: ") + e.what());
    }
    return c;
}

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const RunConfig &c) {
    return hex64(fnv1a64(run_config_to_json(c).dump()));
}

uint64_t derive_seed(uint64_t seed, int distance, int rounds, Basis basis, const LogicalState &state) {
    uint64_t h = splitmix64(seed);
    for (uint64_t v : {uint64_t(distance), uint64_t(rounds), uint64_t(basis),
                       uint64_t((state.control ? 2 : 0) | (state.target ? 1 : 0))}) {
        h = splitmix64(h ^ v);
    }
    return h;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

std::string read_text(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunSummary run_pipeline(const RunConfig &config) {
    config.validate();
    namespace fs = std::filesystem;
    fs::path out(config.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        throw IoError("cannot create " + out.string() + ": " + ec.message());
    }
    std::map<std::string, double> times;
    auto t_all = Clock::now();

    auto t0 = Clock::now();
    CalibrationTable calib = load_calibration_file(config.calib_path);
    Layout layout = build_layout(config.spec);
    ConnectivityReport conn = validate_connectivity(calib, layout);
    if (!conn.usable) {
        std::ostringstream msg;
        msg << "layout uses broken edge(s):";
        for (auto e : conn.broken_in_layout) {
            msg << " (" << e.first << ", " << e.second << ")";
        }
        throw ValidationError(msg.str());
    }
    Circuit circuit = build_memory_experiment(config.spec, layout);
    validate_circuit(circuit);
    NoisyCircuit noisy = attach_noise(circuit, calib);
    write_text(out / "circuit.txt", circuit_to_text(circuit));
    write_text(out / "circuit.json", circuit_sidecar(circuit).dump(2) + "\n");
    times["build"] = seconds_since(t0);

    t0 = Clock::now();
    SampleOptions opts;
    opts.threads = config.threads;
    ShotRecords records = sample(noisy, config.shots, config.seed, opts);
    DetectionMatrix dm = extract_detectors(records, circuit);
    write_detections(out / "detections.rcd", dm, {{"seed", config.seed}, {"calibration", calib.name}});
    times["sample"] = seconds_since(t0);

    t0 = Clock::now();
    SyndromeGraph graph = build_syndrome_graph(enumerate_faults(noisy), &noisy);
    write_text(out / "graph.json", graph_to_json(graph).dump(2) + "\n");
    times["graph"] = seconds_since(t0);

    t0 = Clock::now();
    Decoder decoder(graph);
    DecodedShots decoded = decode_all(decoder, dm, config.threads);
    write_text(out / "decoded.csv", decoded_to_csv(decoded));
    times["decode"] = seconds_since(t0);

    t0 = Clock::now();
    RunSummary summary;
    summary.config = config;
    summary.result = logical_fidelity(decoded.control, decoded.target, config.spec.initial_state);
    bool json = config.format == OutputFormat::Json;
    std::string basis(basis_name(config.spec.basis));
    if (config.shots >= 2) {
        for (auto o : config.orderings) {
            CorrelationMatrix corr = correlation_matrix(dm, o);
            std::string stem = "corr_" + basis + "_" + std::string(ordering_name(o));
            if (json) {
                write_text(out / (stem + ".json"), correlation_to_json(corr).dump() + "\n");
            } else {
                write_text(out / (stem + ".csv"), correlation_to_csv(corr));
            }
            if (o == Ordering::SpaceMajor || config.orderings.size() == 1) {
                summary.gate_flow = gate_flow_signal(corr);
                summary.clamped_correlations = corr.clamped;
            }
        }
    }
    auto probs = detection_probabilities(dm);
    LogRateRow row{config.spec.distance, config.spec.rounds, summary.result, {}};
    // A single-state run is its own group.
    row.aggregate = {config.spec.basis, summary.result.p_err, 0.0};
    if (json) {
        write_text(out / "detprob.json", detection_probabilities_to_json(probs).dump(2) + "\n");
        write_text(out / "lograte.json", lograte_to_json({row}).dump(2) + "\n");
    } else {
        write_text(out / "detprob.csv", detection_probabilities_to_csv(probs));
        write_text(out / "lograte.csv", lograte_to_csv({row}));
    }
    times["analysis"] = seconds_since(t0);
    times["total"] = seconds_since(t_all);

    nlohmann::json warnings = nlohmann::json::array();
    for (const auto &w : conn.warnings) {
        warnings.push_back(w);
    }
    for (const auto &w : graph.warnings) {
        warnings.push_back(w);
    }
    summary.manifest = {{"config", run_config_to_json(config)},
                        {"config_hash", config_hash(config)},
                        {"versions",
                         {{"repcnot", kVersion},
                          {"compiler", __VERSION__},
                          {"nlohmann_json",
                           std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                               std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                               std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
                        {"wall_times_s", times},
                        {"result",
                         {{"p_err", summary.result.p_err},
                          {"stderr", summary.result.std_error},
                          {"gate_flow_ratio", summary.gate_flow.ratio},
                          {"clamped_correlations", summary.clamped_correlations},
                          {"graph_edges", graph.edges.size()},
                          {"decomposed_faults", graph.decomposed_faults}}},
                        {"derived_idle_qubits", noisy.derived_idle_qubits},
                        {"warnings", warnings}};
    write_text(out / "manifest.json", summary.manifest.dump(2) + "\n");
    return summary;
}

std::vector<int> parse_int_list(std::string_view text) {
    std::vector<int> out;
    auto parse = [&](std::string_view s) {
        int v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            throw ValidationError("bad integer '" + std::string(s) + "' in list '" + std::string(text) + "'");
        }
        return v;
    };
    size_t start = 0;
    while (start <= text.size()) {
        size_t comma = text.find(',', start);
        std::string_view item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        size_t dots = item.find("..");
        if (dots != std::string_view::npos) {
            int lo = parse(item.substr(0, dots));
            int hi = parse(item.substr(dots + 2));
            if (hi < lo) {
                throw ValidationError("empty range '" + std::string(item) + "'");
            }
            for (int v = lo; v <= hi; v++) {
                out.push_back(v);
            }
        } else {
            out.push_back(parse(item));
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::vector<LogRateRow> run_sweep(const SweepConfig &config) {
    if (config.distances.empty() || config.rounds.empty() || config.bases.empty()) {
        throw ValidationError("sweep needs at least one distance, round count and basis");
    }
    if (config.jobs < 1) {
        throw ValidationError("jobs must be at least 1");
    }
    struct Job {
        RunConfig run;
        size_t group;
    };
    std::vector<Job> jobs;
    size_t groups = 0;
    for (int d : config.distances) {
        for (int r : config.rounds) {
            for (Basis b : config.bases) {
                std::vector<LogicalState> states;
                if (config.states.empty()) {
                    auto all = LogicalState::all(b);
                    states.assign(all.begin(), all.end());
                } else {
                    for (const auto &s : config.states) {
                        LogicalState st = LogicalState::parse(s);
                        if (st.basis == b) {
                            states.push_back(st);
                        }
                    }
                }
                for (const auto &st : states) {
                    RunConfig rc;
                    rc.spec = {d, r, b, st};
                    rc.calib_path = config.calib_path;
                    rc.shots = config.shots;
                    rc.seed = derive_seed(config.seed, d, r, b, st);
                    rc.orderings = config.orderings;
                    rc.format = config.format;
                    rc.out_dir = (std::filesystem::path(config.out_dir) /
                                  ("d" + std::to_string(d) + "_r" + std::to_string(r) + "_" +
                                   std::string(basis_name(b)) + "_" + st.name()))
                                     .string();
                    rc.validate();
                    jobs.push_back({rc, groups});
                }
                groups++;
            }
        }
    }
    std::vector<RunSummary> results(jobs.size());
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&]() {
        for (size_t i = next++; i < jobs.size(); i = next++) {
            try {
                results[i] = run_pipeline(jobs[i].run);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) {
                    error = std::current_exception();
                }
                next = jobs.size();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::min<int>(config.jobs, static_cast<int>(jobs.size())); t++) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }

    std::vector<LogRateRow> rows;
    for (size_t g = 0; g < groups; g++) {
        std::vector<LogicalResult> members;
        for (size_t i = 0; i < jobs.size(); i++) {
            if (jobs[i].group == g) {
                members.push_back(results[i].result);
            }
        }
        AggregateResult agg{members.empty() ? Basis::Z : members[0].initial.basis, 0, 0};
        if (members.size() == 4) {
            agg = aggregate_error_rates(members);
        } else {
            for (const auto &m : members) {
                agg.mean += m.p_err / members.size();
            }
            double var = 0;
            for (const auto &m : members) {
                var += (m.p_err - agg.mean) * (m.p_err - agg.mean) / members.size();
            }
            agg.stddev = std::sqrt(var);
        }
        for (size_t i = 0; i < jobs.size(); i++) {
            if (jobs[i].group == g) {
                const auto &spec = jobs[i].run.spec;
                rows.push_back({spec.distance, spec.rounds, results[i].result, agg});
            }
        }
    }
    std::filesystem::path out(config.out_dir);
    if (config.format == OutputFormat::Json) {
        write_text(out / "lograte.json", lograte_to_json(rows).dump(2) + "\n");
    } else {
        write_text(out / "lograte.csv", lograte_to_csv(rows));
    }
    return rows;
}

}  // namespace repcnot
