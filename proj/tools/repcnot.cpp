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

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "repcnot/errors.hpp"
#include "repcnot/pipeline.hpp"

using namespace repcnot;

namespace {

enum ExitCode { kOk = 0, kValidation = 2, kDecode = 3, kIo = 4 };

int default_jobs() {
    if (const char *env = std::getenv("REPCNOT_JOBS")) {
        try {
            int v = std::stoi(env);
            if (v >= 1) {
                return v;
            }
        } catch (const std::exception &) {
        }
        throw ValidationError(std::string("REPCNOT_JOBS must be a positive integer, got '") + env + "'");
    }
    return 1;
}

struct SpecOptions {
    int distance = 3;
    int rounds = 1;
    std::string basis = "z";
    std::string state;

    void add(CLI::App *cmd) {
        cmd->add_option("--d,--distance", distance, "code distance (odd, >= 3)");
        cmd->add_option("--rounds", rounds, "extraction rounds R on each side of the CNOT");
        cmd->add_option("--basis", basis, "z or x");
        cmd->add_option("--state", state, "initial logical state: 00, 01, 10, 11, ++, +-, -+, --");
    }
    CodeSpec spec() const {
        CodeSpec s;
        s.distance = distance;
        s.rounds = rounds;
        s.basis = parse_basis(basis);
        s.initial_state = state.empty() ? LogicalState{s.basis, false, false} : LogicalState::parse(state);
        s.validate();
        return s;
    }
};

void emit(const std::string &text, const std::string &out) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_text(out, text);
    }
}

std::vector<Ordering> parse_orderings(const std::string &text) {
    std::vector<Ordering> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_ordering(item));
    }
    if (out.empty()) {
        throw ValidationError("at least one ordering is required");
    }
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Transversal-CNOT repetition-code memory experiment: simulate, decode, analyze"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    int jobs = 0;
    std::string format = "csv";
    std::string out;
    std::string calib;
    std::string in;
    uint64_t shots = 0;
    uint64_t seed = 0;

    // layout
    auto *layout_cmd = app.add_subcommand("layout", "print the qubit layout as JSON");
    SpecOptions layout_spec;
    layout_spec.add(layout_cmd);
    layout_cmd->add_option("--out", out, "output file (default stdout)");

    // validate
    auto *validate_cmd = app.add_subcommand("validate", "build the circuit and check it against a calibration");
    SpecOptions validate_spec;
    validate_spec.add(validate_cmd);
    validate_cmd->add_option("--calib", calib, "calibration JSON")->required();

    // run
    auto *run_cmd = app.add_subcommand("run", "full pipeline for one state");
    SpecOptions run_spec;
    run_spec.add(run_cmd);
    std::string config_path;
    std::string orderings = "space_major,time_major";
    run_cmd->add_option("--calib", calib, "calibration JSON");
    run_cmd->add_option("--shots", shots, "number of shots");
    run_cmd->add_option("--seed", seed, "RNG seed");
    run_cmd->add_option("--out", out, "output directory");
    run_cmd->add_option("--orderings", orderings, "correlation orderings, comma separated");
    run_cmd->add_option("--format", format, "csv or json");
    run_cmd->add_option("--jobs", jobs, "worker threads (default $REPCNOT_JOBS or 1)");
    run_cmd->add_option("--config", config_path, "re-run from a saved config or manifest");

    // sweep
    auto *sweep_cmd = app.add_subcommand("sweep", "run a (d, rounds, basis, state) matrix");
    std::string d_list = "3", r_list = "1", basis_list = "z", state_list;
    sweep_cmd->add_option("--d,--distance", d_list, "distances, e.g. 3,5,7");
    sweep_cmd->add_option("--rounds", r_list, "round counts, e.g. 1..5");
    sweep_cmd->add_option("--basis", basis_list, "bases, e.g. z,x");
    sweep_cmd->add_option("--states", state_list, "states (default: all four per basis)");
    sweep_cmd->add_option("--calib", calib, "calibration JSON")->required();
    sweep_cmd->add_option("--shots", shots, "shots per run")->required();
    sweep_cmd->add_option("--seed", seed, "sweep seed");
    sweep_cmd->add_option("--out", out, "output directory")->required();
    sweep_cmd->add_option("--orderings", orderings, "correlation orderings");
    sweep_cmd->add_option("--format", format, "csv or json");
    sweep_cmd->add_option("--jobs", jobs, "concurrent runs (default $REPCNOT_JOBS or 1)");

    // graph
    auto *graph_cmd = app.add_subcommand("graph", "build and export the syndrome graph");
    SpecOptions graph_spec;
    graph_spec.add(graph_cmd);
    graph_cmd->add_option("--calib", calib, "calibration JSON")->required();
    graph_cmd->add_option("--out", out, "output file (default stdout)");

    // corr
    auto *corr_cmd = app.add_subcommand("corr", "correlation matrix from a detection file");
    std::string ordering = "space_major";
    corr_cmd->add_option("--in", in, "detection file")->required();
    corr_cmd->add_option("--ordering", ordering, "space_major or time_major");
    corr_cmd->add_option("--format", format, "csv or json");
    corr_cmd->add_option("--out", out, "output file (default stdout)");

    // detprob
    auto *detprob_cmd = app.add_subcommand("detprob", "detection probabilities from a detection file");
    detprob_cmd->add_option("--in", in, "detection file")->required();
    detprob_cmd->add_option("--format", format, "csv or json");
    detprob_cmd->add_option("--out", out, "output file (default stdout)");

    // lograte
    auto *lograte_cmd = app.add_subcommand("lograte", "decode detection files and report logical error rates");
    std::vector<std::string> inputs;
    lograte_cmd->add_option("--in", inputs, "detection files (four same-basis states give mean/std)")->required();
    lograte_cmd->add_option("--calib", calib, "calibration JSON")->required();
    lograte_cmd->add_option("--format", format, "csv or json");
    lograte_cmd->add_option("--out", out, "output file (default stdout)");
    lograte_cmd->add_option("--jobs", jobs, "decoder threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (jobs == 0) {
            jobs = default_jobs();
        }
        if (jobs < 1) {
            throw ValidationError("--jobs must be at least 1");
        }
        OutputFormat fmt = parse_format(format);

        if (*layout_cmd) {
            CodeSpec spec = layout_spec.spec();
            emit(layout_to_json(build_layout(spec)).dump(2) + "\n", out);
        } else if (*validate_cmd) {
            CodeSpec spec = validate_spec.spec();
            CalibrationTable table = load_calibration_file(calib);
            Layout layout = build_layout(spec);
            Circuit circuit = build_memory_experiment(spec, layout);
            validate_circuit(circuit);
            ConnectivityReport report = validate_connectivity(table, layout);
            NoisyCircuit noisy = attach_noise(circuit, table);
            for (const auto &w : report.warnings) {
                std::cerr << "warning: " << w << "\n";
            }
            nlohmann::json j = {{"spec", code_spec_to_json(spec)},
                                {"calibration", table.name},
                                {"qubits", layout.qubits().size()},
                                {"instructions", circuit.instructions.size()},
                                {"layers", circuit.num_layers},
                                {"records", circuit.records.size()},
                                {"channels", noisy.channels.size()},
                                {"usable", report.usable}};
            std::cout << j.dump(2) << "\n";
            if (!report.usable) {
                std::cerr << "error: layout uses " << report.broken_in_layout.size() << " broken edge(s)\n";
                return kValidation;
            }
        } else if (*run_cmd) {
            RunConfig config;
            if (!config_path.empty()) {
                config = run_config_from_json(nlohmann::json::parse(read_text(config_path)));
            } else {
                config.spec = run_spec.spec();
                config.calib_path = calib;
                config.shots = shots;
                config.seed = seed;
                config.out_dir = out;
                config.orderings = parse_orderings(orderings);
                config.format = fmt;
            }
            config.threads = jobs;
            RunSummary s = run_pipeline(config);
            std::cout << "p_err " << s.result.p_err << " +- " << s.result.std_error << "  (" << s.config.out_dir
                      << ")\n";
        } else if (*sweep_cmd) {
            SweepConfig sc;
            sc.distances = parse_int_list(d_list);
            sc.rounds = parse_int_list(r_list);
            std::stringstream ss(basis_list);
            for (std::string item; std::getline(ss, item, ',');) {
                sc.bases.push_back(parse_basis(item));
            }
            std::stringstream st(state_list);
            for (std::string item; std::getline(st, item, ',');) {
                sc.states.push_back(item);
            }
            sc.calib_path = calib;
            sc.shots = shots;
            sc.seed = seed;
            sc.out_dir = out;
            sc.orderings = parse_orderings(orderings);
            sc.format = fmt;
            sc.jobs = jobs;
            auto rows = run_sweep(sc);
            std::cout << rows.size() << " runs written to " << out << "\n";
        } else if (*graph_cmd) {
            CodeSpec spec = graph_spec.spec();
            CalibrationTable table = load_calibration_file(calib);
            Circuit circuit = build_memory_experiment(spec, build_layout(spec));
            NoisyCircuit noisy = attach_noise(circuit, table);
            SyndromeGraph g = build_syndrome_graph(enumerate_faults(noisy), &noisy);
            for (const auto &w : g.warnings) {
                std::cerr << "warning: " << w << "\n";
            }
            emit(graph_to_json(g).dump(2) + "\n", out);
        } else if (*corr_cmd) {
            DetectionMatrix m = read_detections(in);
            CorrelationMatrix c = correlation_matrix(m, parse_ordering(ordering));
            emit(fmt == OutputFormat::Json ? correlation_to_json(c).dump() + "\n" : correlation_to_csv(c), out);
            std::cerr << c.clamped << " entries clamped to 0\n";
        } else if (*detprob_cmd) {
            DetectionMatrix m = read_detections(in);
            auto probs = detection_probabilities(m);
            emit(fmt == OutputFormat::Json ? detection_probabilities_to_json(probs).dump(2) + "\n"
                                           : detection_probabilities_to_csv(probs),
                 out);
        } else if (*lograte_cmd) {
            CalibrationTable table = load_calibration_file(calib);
            std::vector<LogRateRow> rows;
            std::vector<LogicalResult> results;
            for (const auto &path : inputs) {
                DetectionMatrix m = read_detections(path);
                Circuit circuit = build_memory_experiment(m.spec, build_layout(m.spec));
                NoisyCircuit noisy = attach_noise(circuit, table);
                Decoder decoder(build_syndrome_graph(enumerate_faults(noisy), &noisy));
                DecodedShots d = decode_all(decoder, m, jobs);
                results.push_back(logical_fidelity(d.control, d.target, m.spec.initial_state));
                rows.push_back({m.spec.distance, m.spec.rounds, results.back(), {}});
            }
            AggregateResult agg{results[0].initial.basis, results[0].p_err, 0.0};
            if (results.size() == 4) {
                agg = aggregate_error_rates(results);
            } else if (results.size() != 1) {
                throw ValidationError("lograte takes one file or four same-basis files");
            }
            for (auto &r : rows) {
                r.aggregate = agg;
            }
            emit(fmt == OutputFormat::Json ? lograte_to_json(rows).dump(2) + "\n" : lograte_to_csv(rows), out);
        }
    } catch (const ValidationError &e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const DecodeError &e) {
        std::cerr << "decode error: " << e.what() << "\n";
        return kDecode;
    } catch (const IoError &e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kOk;
}
