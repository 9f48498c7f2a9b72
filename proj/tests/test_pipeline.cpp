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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "repcnot/errors.hpp"
#include "repcnot/pipeline.hpp"

using namespace repcnot;
namespace fs = std::filesystem;

namespace {

const std::string kData = REPCNOT_DATA_DIR;
const std::string kCli = REPCNOT_CLI;
const std::string kCalib = kData + "/calibration/sherbrooke_median.json";

fs::path scratch(const std::string &name) {
    fs::path dir = fs::temp_directory_path() / "repcnot_test_pipeline" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunConfig small_config(const fs::path &out) {
    RunConfig c;
    c.spec.distance = 3;
    c.spec.rounds = 2;
    c.spec.initial_state = LogicalState::parse("10");
    c.calib_path = kCalib;
    c.shots = 3000;
    c.seed = 7;
    c.out_dir = out.string();
    return c;
}

int run_cli(const std::string &args, const std::string &env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + kCli + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
    return read_text(p);
}

}  // namespace

TEST(Config, JsonRoundTripAndHash) {
    RunConfig c = small_config("/tmp/x");
    c.format = OutputFormat::Json;
    c.orderings = {Ordering::TimeMajor};
    RunConfig back = run_config_from_json(run_config_to_json(c));
    EXPECT_EQ(run_config_to_json(back), run_config_to_json(c));
    EXPECT_EQ(config_hash(back), config_hash(c));
    back.threads = 8;
    EXPECT_EQ(config_hash(back), config_hash(c));
    back.seed = 8;
    EXPECT_NE(config_hash(back), config_hash(c));
    nlohmann::json manifest = {{"config", run_config_to_json(c)}, {"config_hash", config_hash(c)}};
    EXPECT_EQ(run_config_to_json(run_config_from_json(manifest)), run_config_to_json(c));
}

TEST(Config, Validation) {
    RunConfig c = small_config("/tmp/x");
    EXPECT_NO_THROW(c.validate());
    c.shots = 0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = small_config("/tmp/x");
    c.calib_path.clear();
    EXPECT_THROW(c.validate(), ValidationError);
    c = small_config("/tmp/x");
    c.spec.distance = 4;
    EXPECT_THROW(c.validate(), ValidationError);
    EXPECT_THROW(parse_format("xml"), ValidationError);
}

TEST(Config, Fnv1a) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Config, IntLists) {
    EXPECT_EQ(parse_int_list("3,5,7"), (std::vector<int>{3, 5, 7}));
    EXPECT_EQ(parse_int_list("1..5"), (std::vector<int>{1, 2, 3, 4, 5}));
    EXPECT_EQ(parse_int_list("1..3,5"), (std::vector<int>{1, 2, 3, 5}));
    EXPECT_THROW(parse_int_list(""), ValidationError);
    EXPECT_THROW(parse_int_list("5..1"), ValidationError);
    EXPECT_THROW(parse_int_list("a"), ValidationError);
}

TEST(Config, DerivedSeedsAreDistinct) {
    std::set<uint64_t> seeds;
    for (int d : {3, 5, 7}) {
        for (int r = 1; r <= 5; r++) {
            for (Basis b : {Basis::Z, Basis::X}) {
                for (const auto &s : LogicalState::all(b)) {
                    seeds.insert(derive_seed(7, d, r, b, s));
                }
            }
        }
    }
    EXPECT_EQ(seeds.size(), 120u);
    EXPECT_EQ(derive_seed(7, 3, 1, Basis::Z, LogicalState::parse("00")),
              derive_seed(7, 3, 1, Basis::Z, LogicalState::parse("00")));
}

TEST(Pipeline, WritesArtifactSet) {
    fs::path out = scratch("artifacts");
    RunSummary s = run_pipeline(small_config(out));
    for (const char *f : {"circuit.txt", "circuit.json", "detections.rcd", "detections.rcd.meta.json", "graph.json",
                          "decoded.csv", "corr_z_space_major.csv", "corr_z_time_major.csv", "detprob.csv",
                          "lograte.csv", "manifest.json"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
    }
    EXPECT_GT(s.result.p_err, 0.0);
    EXPECT_LT(s.result.p_err, 0.2);
    auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(manifest["config_hash"], config_hash(s.config));
    EXPECT_TRUE(manifest.contains("versions"));
    EXPECT_TRUE(manifest.contains("wall_times_s"));
    EXPECT_EQ(manifest["result"]["p_err"].get<double>(), s.result.p_err);
    std::string decoded = slurp(out / "decoded.csv");
    EXPECT_EQ(decoded.rfind("shot,control,target\n", 0), 0u);
    EXPECT_EQ(std::count(decoded.begin(), decoded.end(), '\n'), 3001);
    std::string lograte = slurp(out / "lograte.csv");
    EXPECT_EQ(lograte.rfind(lograte_header(), 0), 0u);
    DetectionMatrix m = read_detections(out / "detections.rcd");
    EXPECT_EQ(m.shots(), 3000u);
    EXPECT_EQ(m.spec, s.config.spec);
}

TEST(Pipeline, JsonFormat) {
    fs::path out = scratch("json");
    RunConfig c = small_config(out);
    c.format = OutputFormat::Json;
    c.orderings = {Ordering::SpaceMajor};
    c.shots = 200;
    run_pipeline(c);
    EXPECT_TRUE(fs::exists(out / "corr_z_space_major.json"));
    EXPECT_FALSE(fs::exists(out / "corr_z_time_major.json"));
    EXPECT_TRUE(fs::exists(out / "detprob.json"));
    EXPECT_TRUE(fs::exists(out / "lograte.json"));
    EXPECT_NO_THROW(nlohmann::json::parse(slurp(out / "lograte.json")));
}

TEST(Pipeline, ZeroShotsRejected) {
    RunConfig c = small_config(scratch("zero"));
    c.shots = 0;
    EXPECT_THROW(run_pipeline(c), ValidationError);
}

TEST(Pipeline, BrokenLayoutEdgeRejected) {
    fs::path out = scratch("broken");
    auto calib = nlohmann::json::parse(slurp(kData + "/calibration/sherbrooke_d3.json"));
    calib["edges"][0]["tq_err"] = 1.0;
    write_text(out / "calib.json", calib.dump());
    RunConfig c = small_config(out / "run");
    c.calib_path = (out / "calib.json").string();
    EXPECT_THROW(run_pipeline(c), ValidationError);
}

TEST(Pipeline, MissingCalibrationIsIoError) {
    RunConfig c = small_config(scratch("missing"));
    c.calib_path = "/nonexistent/calib.json";
    EXPECT_THROW(run_pipeline(c), IoError);
}

TEST(Pipeline, ManifestRerunIsByteIdentical) {
    fs::path out = scratch("rerun");
    RunConfig c = small_config(out);
    c.threads = 1;
    run_pipeline(c);
    std::map<std::string, std::string> first;
    for (const char *f : {"detections.rcd", "decoded.csv", "corr_z_space_major.csv", "corr_z_time_major.csv",
                          "detprob.csv", "lograte.csv", "graph.json", "circuit.txt"}) {
        first[f] = slurp(out / f);
    }
    RunConfig again = run_config_from_json(nlohmann::json::parse(slurp(out / "manifest.json")));
    again.threads = 3;
    run_pipeline(again);
    for (const auto &[name, bytes] : first) {
        EXPECT_EQ(slurp(out / name), bytes) << name;
    }
}

TEST(Sweep, FourStateGroupAggregates) {
    fs::path out = scratch("sweep");
    SweepConfig sc;
    sc.distances = {3};
    sc.rounds = {1};
    sc.bases = {Basis::Z};
    sc.calib_path = kCalib;
    sc.shots = 500;
    sc.seed = 3;
    sc.out_dir = out.string();
    sc.jobs = 2;
    auto rows = run_sweep(sc);
    ASSERT_EQ(rows.size(), 4u);
    std::vector<LogicalResult> results;
    for (const auto &r : rows) {
        results.push_back(r.result);
        EXPECT_TRUE(fs::exists(out / ("d3_r1_z_" + r.result.initial.name()) / "manifest.json"));
    }
    AggregateResult agg = aggregate_error_rates(results);
    for (const auto &r : rows) {
        EXPECT_DOUBLE_EQ(r.aggregate.mean, agg.mean);
        EXPECT_DOUBLE_EQ(r.aggregate.stddev, agg.stddev);
    }
    std::string csv = slurp(out / "lograte.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);

    fs::path serial = scratch("sweep_serial");
    sc.out_dir = serial.string();
    sc.jobs = 1;
    run_sweep(sc);
    EXPECT_EQ(slurp(serial / "lograte.csv"), csv);
}

TEST(Cli, ExitCodes) {
    fs::path out = scratch("cli");
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli("layout --d 5 --out " + (out / "layout.json").string()), 0);
    auto layout = nlohmann::json::parse(slurp(out / "layout.json"));
    EXPECT_EQ(layout["qubits"].size(), 39u);
    EXPECT_EQ(run_cli("validate --d 3 --calib " + kCalib), 0);
    EXPECT_EQ(run_cli("run --d 3 --rounds 1 --calib " + kCalib + " --shots 0 --out " + out.string()), 2);
    EXPECT_EQ(run_cli("run --d 4 --calib " + kCalib + " --shots 10 --out " + out.string()), 2);
    EXPECT_EQ(run_cli("layout --d"), 2);
    EXPECT_EQ(run_cli("corr --in /nonexistent.rcd"), 4);
    EXPECT_EQ(run_cli("validate --d 3 --calib /nonexistent.json"), 4);
    EXPECT_EQ(run_cli("detprob --in x.rcd", "REPCNOT_JOBS=zero"), 2);

    auto calib = nlohmann::json::parse(slurp(kData + "/calibration/sherbrooke_d3.json"));
    calib["edges"][0]["tq_err"] = 1.0;
    write_text(out / "broken.json", calib.dump());
    EXPECT_EQ(run_cli("validate --d 3 --calib " + (out / "broken.json").string()), 2);
}

TEST(Cli, RunThenAnalysisCommands) {
    fs::path out = scratch("cli_run");
    fs::path run = out / "run";
    ASSERT_EQ(run_cli("run --d 3 --rounds 1 --basis x --state=-- --calib " + kCalib +
                          " --shots 2000 --seed 5 --out " + run.string(),
                      "REPCNOT_JOBS=2"),
              0);
    EXPECT_TRUE(fs::exists(run / "corr_x_space_major.csv"));
    fs::path rcd = run / "detections.rcd";
    EXPECT_EQ(run_cli("corr --in " + rcd.string() + " --ordering time_major --out " + (out / "c.csv").string()), 0);
    EXPECT_EQ(slurp(out / "c.csv"), slurp(run / "corr_x_time_major.csv"));
    EXPECT_EQ(run_cli("detprob --in " + rcd.string() + " --out " + (out / "p.csv").string()), 0);
    EXPECT_EQ(slurp(out / "p.csv"), slurp(run / "detprob.csv"));
    EXPECT_EQ(run_cli("lograte --in " + rcd.string() + " --calib " + kCalib + " --out " + (out / "l.csv").string()),
              0);
    EXPECT_EQ(slurp(out / "l.csv"), slurp(run / "lograte.csv"));
    EXPECT_EQ(run_cli("graph --d 3 --rounds 1 --basis x --state=-- --calib " + kCalib + " --out " + (out / "g.json").string()),
              0);
    EXPECT_EQ(slurp(out / "g.json"), slurp(run / "graph.json"));

    fs::path rerun = out / "rerun";
    fs::copy(run, rerun);
    EXPECT_EQ(run_cli("run --config " + (rerun / "manifest.json").string()), 0);
    EXPECT_EQ(slurp(rcd), slurp(rerun / "detections.rcd"));
}
