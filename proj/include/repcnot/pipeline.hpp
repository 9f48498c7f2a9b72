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
#include <string>
#include <vector>

#include "json.hpp"
#include "repcnot/analysis.hpp"

namespace repcnot {

inline constexpr const char *kVersion = "0.1.0";

enum class OutputFormat : uint8_t { Csv, Json };

OutputFormat parse_format(std::string_view text);

/// Everything needed to reproduce one run.
struct RunConfig {
    CodeSpec spec;
    std::string calib_path;
    uint64_t shots = 0;
    uint64_t seed = 0;
    std::string out_dir;
    std::vector<Ordering> orderings{Ordering::SpaceMajor, Ordering::TimeMajor};
    OutputFormat format = OutputFormat::Csv;
    int threads = 1;  // not part of the hash: results do not depend on it

    /// Throws ValidationError.
    void validate() const;
};

nlohmann::json run_config_to_json(const RunConfig &c);
/// Accepts a bare config or a manifest with a "config" member.
RunConfig run_config_from_json(const nlohmann::json &j);

/// 64-bit FNV-1a.
uint64_t fnv1a64(std::string_view data);
/// Hex FNV-1a of the canonical config dump.
std::string config_hash(const RunConfig &c);

/// Seed of one sweep member, derived by hashing the sweep seed with the run coordinates.
uint64_t derive_seed(uint64_t seed, int distance, int rounds, Basis basis, const LogicalState &state);

struct RunSummary {
    RunConfig config;
    LogicalResult result;
    GateFlowSignal gate_flow;
    int clamped_correlations = 0;
    nlohmann::json manifest;
};

/// Full pipeline for one state: build, sample, graph, decode, analyze, write.
/// Throws ValidationError, DecodeError or IoError.
RunSummary run_pipeline(const RunConfig &config);

/// Parses "3,5,7" or "1..5" (or a mix, e.g. "1..3,5").
std::vector<int> parse_int_list(std::string_view text);

struct SweepConfig {
    std::vector<int> distances;
    std::vector<int> rounds;
    std::vector<Basis> bases;
    std::vector<std::string> states;  // empty: all four of each basis
    std::string calib_path;
    uint64_t shots = 0;
    uint64_t seed = 0;
    std::string out_dir;
    std::vector<Ordering> orderings{Ordering::SpaceMajor};
    OutputFormat format = OutputFormat::Csv;
    int jobs = 1;
};

/// Runs every (d, rounds, basis, state) combination into `<out>/d<d>_r<R>_<basis>_<state>/`
/// and writes the combined `<out>/lograte.csv`. Returns the combined rows.
std::vector<LogRateRow> run_sweep(const SweepConfig &config);

/// Writes text to a file, throwing IoError on failure.
void write_text(const std::filesystem::path &path, const std::string &text);
std::string read_text(const std::filesystem::path &path);

}  // namespace repcnot
