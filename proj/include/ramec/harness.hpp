// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ramec/saho.hpp"

namespace ramec {

/// Experiment description, loaded from a JSON config file. Unknown keys are
/// rejected at parse time.
struct ExperimentConfig {
    struct Array {
        int kx = 3;
        int ky = 3;
        double spacing_wavelengths = 0.5;
        double theta_max_deg = 60.0;
    } array;

    struct Channel {
        double carrier_hz = 2.4e9;
        int directivity_p = 4;
        std::string g0_mode = "normalized"; ///< "normalized" or "explicit"
        double g0_value = 0.0;              ///< used when g0_mode == "explicit"
        double a0_db = -46.4;
        double pathloss_exp = 2.8;
        double rician_k = 1.0;
        double noise_dbm = -100.0;
    } channel;

    struct Users {
        int count = 4;
        double horiz_dist_range_m[2] = {20.0, 50.0};
        double height_range_m[2] = {10.0, 30.0};
        bool area_uniform = false;     ///< draw rho with area-uniform density
        bool azimuth_halfspace = false;///< restrict azimuth to [-pi/2, pi/2]
    } users;

    struct Task {
        double frame_s = 1.0;
        double bandwidth_hz = 1.0e7;
        double overhead_v = 1.1;
        double cycles_per_bit = 1000.0;
        double e_max_j = 10.0;
        double circuit_power_w = 0.1;
        double capacitance_rc = 1e-28;
        double r_min_bits = 0.0;
        std::vector<double> weights; ///< empty = all ones
    } task;

    struct Run {
        std::vector<SolveMode> modes = {SolveMode::Dynamic, SolveMode::Static, SolveMode::Fixed};
        std::vector<std::uint64_t> seeds; ///< explicit list; else derived
        int seed_count = 100;
        std::uint64_t master_seed = 1;
        double ao_tol = 1e-3;
        double kkt_tol = 1e-6;
        int max_outer_iters = 30;
        std::string init = "fa";
    } run;

    struct Sweep {
        std::string parameter; ///< directivity_p | theta_max_deg | antenna_count
        std::vector<double> values;
    };
    std::optional<Sweep> sweep;

    /// Effective seed list: explicit seeds, or seed_count seeds derived from
    /// master_seed.
    std::vector<std::uint64_t> seed_list() const;

    AoSettings ao_settings() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& config);

/// Validates ranges and cross-field consistency; throws std::invalid_argument
/// with a descriptive message on the first violation.
void validate_config(const ExperimentConfig& config);

/// Applies one sweep value to a copy of the config.
ExperimentConfig apply_sweep_value(const ExperimentConfig& config, const std::string& parameter,
                                   double value);

/// Draws user placements and per-link fading for one trial. Deterministic in
/// (config, seed); placements are drawn before fading, so user positions stay
/// identical across array-size sweeps at the same seed.
Scenario generate_scenario(const ExperimentConfig& config, std::uint64_t seed);

/// Flattened result of one (scenario, mode) solve.
struct TrialRecord {
    std::uint64_t seed = 0;
    SolveMode mode = SolveMode::Fixed;
    std::string sweep_parameter; ///< empty outside sweeps
    double sweep_value = 0;
    double objective_bits = 0;
    int outer_iterations = 0;
    bool converged = false;
    double wall_time_s = 0;
    double max_residual = 0;
    std::vector<double> tau_s, y_j, p_w, f_hz, r_loc_bits, r_off_bits;
    std::vector<double> objective_trace;
    bool failed = false;
    std::string error;
};

TrialRecord run_trial(const Scenario& scenario, SolveMode mode, const AoSettings& settings);

/// Aggregate of one (sweep value, mode) cell.
struct SweepPoint {
    std::string parameter;
    double value = 0;
    SolveMode mode = SolveMode::Fixed;
    int num_trials = 0;
    double mean_objective = 0;
    double std_objective = 0;
    int failures = 0;
};

/// Runs every seed for every configured mode (no sweep block needed).
/// Trials run in parallel, capped by RA_MEC_THREADS; output order is
/// canonical (seed, then mode) regardless of scheduling.
std::vector<TrialRecord> run_batch(const ExperimentConfig& config);

struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<TrialRecord> trials;
};

/// Full sweep with common random numbers: the same seed list is used for
/// every (value, mode) cell.
SweepResult run_sweep(const ExperimentConfig& config);

/// Mean/std aggregation of trial records into sweep points.
std::vector<SweepPoint> aggregate_trials(const std::vector<TrialRecord>& trials);

// --- structured emission ------------------------------------------------

std::string trials_to_csv(const std::vector<TrialRecord>& trials, int num_users);
std::string sweep_to_csv(const std::vector<SweepPoint>& points);
std::string trace_to_csv(const TrialRecord& trial);

/// Writes trials.csv (plus sweep.csv when points are given) and run.json
/// under `out_dir`. Returns the list of files written.
std::vector<std::filesystem::path> emit_results(const std::vector<TrialRecord>& trials,
                                                const std::vector<SweepPoint>& points,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& out_dir);

/// Debug dump of a ChannelSet (fields k, m, distance, direction, beta_re,
/// beta_im per link).
std::string channels_to_json(const ChannelSet& channels);

/// Worker cap from RA_MEC_THREADS (machine default when unset).
int worker_count(int num_jobs);

} // namespace ramec
