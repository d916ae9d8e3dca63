// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ramec/harness.hpp"
#include "test_util.hpp"

using namespace ramec;
using testutil::kPi;

TEST_CASE("config: json round trip preserves every field") {
    ExperimentConfig cfg = testutil::small_config();
    cfg.array.theta_max_deg = 45;
    cfg.channel.directivity_p = 6;
    cfg.task.weights = {1.0, 2.0};
    cfg.run.seeds = {3, 1, 4};
    cfg.sweep = ExperimentConfig::Sweep{"theta_max_deg", {30, 60}};

    const ExperimentConfig back = config_from_json_text(config_to_json_text(cfg));
    CHECK(back.array.theta_max_deg == 45);
    CHECK(back.channel.directivity_p == 6);
    CHECK(back.task.weights == std::vector<double>{1.0, 2.0});
    CHECK(back.run.seeds == std::vector<std::uint64_t>{3, 1, 4});
    REQUIRE(back.sweep.has_value());
    CHECK(back.sweep->parameter == "theta_max_deg");
    CHECK(config_to_json_text(back) == config_to_json_text(cfg));
}

TEST_CASE("config: unknown keys are rejected at any level") {
    CHECK_THROWS_AS(config_from_json_text(R"({"bogus": 1})"), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json_text(R"({"array": {"kx": 2, "shape": "L"}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json_text(R"({"run": {"mode": "static"}})"),
                    std::invalid_argument);
}

TEST_CASE("config: validation catches bad values") {
    CHECK_THROWS_AS(config_from_json_text(R"({"array": {"theta_max_deg": 120}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json_text(R"({"users": {"count": 0}})"), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json_text(R"({"task": {"overhead_v": 1.0}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json_text(R"({"users": {"count": 3}, "task": {"weights": [1]}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json_text(R"({"run": {"modes": []}})"), std::invalid_argument);
    CHECK_THROWS_AS(
        config_from_json_text(R"({"sweep": {"parameter": "bandwidth", "values": [1]}})"),
        std::invalid_argument);
    CHECK_THROWS_AS(
        config_from_json_text(R"({"sweep": {"parameter": "antenna_count", "values": [3]}})"),
        std::invalid_argument);
}

TEST_CASE("seed_list: explicit list wins, else derived from the master seed") {
    ExperimentConfig cfg;
    cfg.run.seeds = {42, 43};
    CHECK(cfg.seed_list() == std::vector<std::uint64_t>{42, 43});

    cfg.run.seeds.clear();
    cfg.run.seed_count = 4;
    cfg.run.master_seed = 9;
    const auto seeds = cfg.seed_list();
    CHECK(seeds.size() == 4);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        CHECK(seeds[i] == derive_seed(9, i));
        for (std::size_t j = i + 1; j < seeds.size(); ++j) CHECK(seeds[i] != seeds[j]);
    }
}

TEST_CASE("generate_scenario: deterministic and inside the configured ranges") {
    ExperimentConfig cfg; // defaults: 4 users, [20,50] x [10,30]
    const Scenario a = generate_scenario(cfg, 77);
    const Scenario b = generate_scenario(cfg, 77);
    REQUIRE(a.users.size() == 4);
    for (std::size_t m = 0; m < a.users.size(); ++m) {
        CHECK(a.users[m].position == b.users[m].position);
        const double rho = std::hypot(a.users[m].position.x(), a.users[m].position.y());
        const double height = a.users[m].position.z();
        CHECK(rho >= 20.0);
        CHECK(rho <= 50.0);
        CHECK(height >= 10.0);
        CHECK(height <= 30.0);
    }
    for (std::size_t i = 0; i < a.channels.links.size(); ++i) {
        CHECK(a.channels.links[i].beta == b.channels.links[i].beta);
    }
    // paper defaults materialize in the scenario
    CHECK(a.array.positions.size() == 9);
    CHECK(a.array.spacing == doctest::Approx(0.0625));
    CHECK(a.channel.g0 == doctest::Approx(18.0)); // 2(2p+1), p = 4
    CHECK(a.channel.noise_power == doctest::Approx(1e-13));
    CHECK(a.tasks[0].e_max == 10.0);
}

TEST_CASE("generate_scenario: degenerate ranges pin users to a circle") {
    ExperimentConfig cfg;
    cfg.users.horiz_dist_range_m[0] = cfg.users.horiz_dist_range_m[1] = 30.0;
    cfg.users.height_range_m[0] = cfg.users.height_range_m[1] = 20.0;
    const Scenario s = generate_scenario(cfg, 5);
    for (const UserGeometry& u : s.users) {
        CHECK(std::hypot(u.position.x(), u.position.y()) == doctest::Approx(30.0).epsilon(1e-12));
        CHECK(u.position.z() == doctest::Approx(20.0).epsilon(1e-12));
    }
}

TEST_CASE("generate_scenario: user draws are paired across array sizes") {
    ExperimentConfig small = testutil::small_config();
    ExperimentConfig large = small;
    large.array.kx = large.array.ky = 4;
    const Scenario a = generate_scenario(small, 13);
    const Scenario b = generate_scenario(large, 13);
    for (std::size_t m = 0; m < a.users.size(); ++m) {
        CHECK(a.users[m].position == b.users[m].position);
    }
}

TEST_CASE("apply_sweep_value covers the three supported parameters") {
    const ExperimentConfig cfg;
    CHECK(apply_sweep_value(cfg, "directivity_p", 8).channel.directivity_p == 8);
    CHECK(apply_sweep_value(cfg, "theta_max_deg", 30).array.theta_max_deg == 30);
    const ExperimentConfig k16 = apply_sweep_value(cfg, "antenna_count", 16);
    CHECK(k16.array.kx == 4);
    CHECK(k16.array.ky == 4);
    CHECK_THROWS_AS(apply_sweep_value(cfg, "antenna_count", 5), std::invalid_argument);
    CHECK_THROWS_AS(apply_sweep_value(cfg, "directivity_p", 2.5), std::invalid_argument);
}

TEST_CASE("run_batch: canonical order and aggregation consistency") {
    ExperimentConfig cfg = testutil::small_config();
    cfg.run.modes = {SolveMode::Static, SolveMode::Fixed};
    cfg.run.seed_count = 3;
    const std::vector<TrialRecord> trials = run_batch(cfg);
    REQUIRE(trials.size() == 6);
    for (const TrialRecord& t : trials) {
        CHECK_FALSE(t.failed);
        CHECK(t.max_residual <= 1e-6);
    }

    const auto points = aggregate_trials(trials);
    REQUIRE(points.size() == 2);
    for (const SweepPoint& p : points) {
        double sum = 0;
        int count = 0;
        for (const TrialRecord& t : trials) {
            if (t.mode == p.mode) {
                sum += t.objective_bits;
                ++count;
            }
        }
        CHECK(p.num_trials == count);
        CHECK(p.mean_objective == doctest::Approx(sum / count).epsilon(1e-15));
    }
}

TEST_CASE("csv: header-only for empty record lists, sorted rows otherwise") {
    const std::string empty_csv = trials_to_csv({}, 2);
    CHECK(empty_csv.find("seed,mode,") == 0);
    CHECK(std::count(empty_csv.begin(), empty_csv.end(), '\n') == 1);

    ExperimentConfig cfg = testutil::small_config();
    cfg.run.modes = {SolveMode::Fixed, SolveMode::Static};
    cfg.run.seed_count = 3;
    const std::vector<TrialRecord> trials = run_batch(cfg);
    const std::string csv = trials_to_csv(trials, cfg.users.count);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7); // header + 6 rows

    // rows sorted by seed then mode (dynamic < static < fixed)
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line); // header
    std::uint64_t prev_seed = 0;
    while (std::getline(lines, line)) {
        const std::uint64_t seed = std::stoull(line.substr(0, line.find(',')));
        CHECK(seed >= prev_seed);
        prev_seed = seed;
    }
}

TEST_CASE("run_sweep: common random numbers and deterministic output bytes") {
    ExperimentConfig cfg = testutil::small_config();
    cfg.run.modes = {SolveMode::Static, SolveMode::Fixed};
    cfg.run.seed_count = 2;
    cfg.sweep = ExperimentConfig::Sweep{"theta_max_deg", {30, 60}};

    setenv("RA_MEC_THREADS", "1", 1);
    const SweepResult serial = run_sweep(cfg);
    setenv("RA_MEC_THREADS", "4", 1);
    const SweepResult parallel = run_sweep(cfg);
    unsetenv("RA_MEC_THREADS");

    CHECK(sweep_to_csv(serial.points) == sweep_to_csv(parallel.points));
    REQUIRE(serial.trials.size() == parallel.trials.size());
    // trials identical except wall-clock timing
    for (std::size_t i = 0; i < serial.trials.size(); ++i) {
        CHECK(serial.trials[i].objective_bits == parallel.trials[i].objective_bits);
        CHECK(serial.trials[i].seed == parallel.trials[i].seed);
    }

    // every (value, mode) cell saw the same seed list
    for (double value : {30.0, 60.0}) {
        std::vector<std::uint64_t> static_seeds, fixed_seeds;
        for (const TrialRecord& t : serial.trials) {
            if (t.sweep_value != value) continue;
            (t.mode == SolveMode::Static ? static_seeds : fixed_seeds).push_back(t.seed);
        }
        std::sort(static_seeds.begin(), static_seeds.end());
        std::sort(fixed_seeds.begin(), fixed_seeds.end());
        CHECK(static_seeds == fixed_seeds);
        CHECK(static_seeds.size() == 2);
    }
}

TEST_CASE("emit_results: files land on disk and run.json echoes the config") {
    ExperimentConfig cfg = testutil::small_config();
    cfg.run.modes = {SolveMode::Fixed};
    cfg.run.seed_count = 2;
    const std::vector<TrialRecord> trials = run_batch(cfg);
    const auto points = aggregate_trials(trials);

    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "ramec_emit_test";
    std::filesystem::remove_all(dir);
    const auto files = emit_results(trials, points, cfg, dir);
    REQUIRE(files.size() == 3);
    CHECK(std::filesystem::exists(dir / "trials.csv"));
    CHECK(std::filesystem::exists(dir / "sweep.csv"));
    CHECK(std::filesystem::exists(dir / "run.json"));

    std::ifstream in(dir / "run.json");
    nlohmann::json run;
    in >> run;
    CHECK(run["artifact_version"].is_string());
    CHECK(run["config"]["users"]["count"] == 2);
    REQUIRE(run["trials"].size() == 2);

    // re-aggregating the emitted records reproduces the table exactly
    double sum = 0;
    for (const auto& t : run["trials"]) sum += t["objective_bits"].get<double>();
    CHECK(sum / 2 == points[0].mean_objective);

    std::filesystem::remove_all(dir);
}

TEST_CASE("trace csv lists one row per outer iteration") {
    ExperimentConfig cfg = testutil::small_config();
    const Scenario scenario = generate_scenario(cfg, 2);
    const TrialRecord record = run_trial(scenario, SolveMode::Static, cfg.ao_settings());
    const std::string csv = trace_to_csv(record);
    CHECK(csv.find("iteration,objective_bits\n") == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) ==
          record.objective_trace.size() + 1);
}

TEST_CASE("channels_to_json exposes the trial-dump schema") {
    ExperimentConfig cfg = testutil::small_config();
    const Scenario scenario = generate_scenario(cfg, 2);
    const nlohmann::json dump = nlohmann::json::parse(channels_to_json(scenario.channels));
    CHECK(dump["num_antennas"] == 4);
    CHECK(dump["num_users"] == 2);
    REQUIRE(dump["links"].size() == 8);
    const auto& first = dump["links"][0];
    for (const char* key : {"k", "m", "distance", "direction", "beta_re", "beta_im"}) {
        CHECK(first.contains(key));
    }
    CHECK(first["direction"].size() == 3);
}

TEST_CASE("failed trials are recorded, not thrown") {
    ExperimentConfig cfg = testutil::small_config();
    cfg.task.r_min_bits = 1e15; // unreachable target
    const Scenario scenario = generate_scenario(cfg, 1);
    const TrialRecord record = run_trial(scenario, SolveMode::Fixed, cfg.ao_settings());
    // infeasibility is reported through the record, and the run continues
    CHECK((record.failed || !record.converged));
}
