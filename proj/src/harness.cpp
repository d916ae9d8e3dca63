// SPDX-License-Identifier: Apache-2.0
#include "ramec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "ramec/rng.hpp"
#include "ramec/version.hpp"

namespace ramec {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;
constexpr double kSpeedOfLight = 3.0e8; // matches the 0.125 m wavelength at 2.4 GHz

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw std::invalid_argument("config: unknown key \"" + item.key() + "\" in " + where);
        }
    }
}

template <typename T>
void read_if(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_range(const json& obj, const char* key, double (&out)[2]) {
    if (!obj.contains(key)) return;
    const auto& arr = obj.at(key);
    if (!arr.is_array() || arr.size() != 2) {
        throw std::invalid_argument(std::string("config: ") + key + " must be [lo, hi]");
    }
    out[0] = arr[0].get<double>();
    out[1] = arr[1].get<double>();
}

// Fixed 17-significant-digit float formatting for stable CSV bytes.
std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

int mode_order(SolveMode mode) {
    switch (mode) {
        case SolveMode::Dynamic: return 0;
        case SolveMode::Static: return 1;
        case SolveMode::Fixed: return 2;
    }
    return 3;
}

} // namespace

std::vector<std::uint64_t> ExperimentConfig::seed_list() const {
    if (!run.seeds.empty()) return run.seeds;
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(run.seed_count));
    for (int i = 0; i < run.seed_count; ++i) {
        seeds[i] = derive_seed(run.master_seed, static_cast<std::uint64_t>(i));
    }
    return seeds;
}

AoSettings ExperimentConfig::ao_settings() const {
    AoSettings settings;
    settings.ao_tol = run.ao_tol;
    settings.max_outer_iters = run.max_outer_iters;
    settings.init = run.init;
    settings.resource.kkt_tol = run.kkt_tol;
    return settings;
}

ExperimentConfig config_from_json_text(const std::string& text) {
    const json root = json::parse(text);
    reject_unknown_keys(root, {"array", "channel", "users", "task", "run", "sweep"}, "top level");

    ExperimentConfig cfg;
    if (root.contains("array")) {
        const json& j = root.at("array");
        reject_unknown_keys(j, {"kx", "ky", "spacing_wavelengths", "theta_max_deg"}, "array");
        read_if(j, "kx", cfg.array.kx);
        read_if(j, "ky", cfg.array.ky);
        read_if(j, "spacing_wavelengths", cfg.array.spacing_wavelengths);
        read_if(j, "theta_max_deg", cfg.array.theta_max_deg);
    }
    if (root.contains("channel")) {
        const json& j = root.at("channel");
        reject_unknown_keys(j,
                            {"carrier_hz", "directivity_p", "g0_mode", "g0_value", "a0_db",
                             "pathloss_exp", "rician_k", "noise_dbm"},
                            "channel");
        read_if(j, "carrier_hz", cfg.channel.carrier_hz);
        read_if(j, "directivity_p", cfg.channel.directivity_p);
        read_if(j, "g0_mode", cfg.channel.g0_mode);
        read_if(j, "g0_value", cfg.channel.g0_value);
        read_if(j, "a0_db", cfg.channel.a0_db);
        read_if(j, "pathloss_exp", cfg.channel.pathloss_exp);
        read_if(j, "rician_k", cfg.channel.rician_k);
        read_if(j, "noise_dbm", cfg.channel.noise_dbm);
    }
    if (root.contains("users")) {
        const json& j = root.at("users");
        reject_unknown_keys(j,
                            {"count", "horiz_dist_range_m", "height_range_m", "area_uniform",
                             "azimuth_halfspace"},
                            "users");
        read_if(j, "count", cfg.users.count);
        read_range(j, "horiz_dist_range_m", cfg.users.horiz_dist_range_m);
        read_range(j, "height_range_m", cfg.users.height_range_m);
        read_if(j, "area_uniform", cfg.users.area_uniform);
        read_if(j, "azimuth_halfspace", cfg.users.azimuth_halfspace);
    }
    if (root.contains("task")) {
        const json& j = root.at("task");
        reject_unknown_keys(j,
                            {"frame_s", "bandwidth_hz", "overhead_v", "cycles_per_bit", "e_max_j",
                             "circuit_power_w", "capacitance_rc", "r_min_bits", "weights"},
                            "task");
        read_if(j, "frame_s", cfg.task.frame_s);
        read_if(j, "bandwidth_hz", cfg.task.bandwidth_hz);
        read_if(j, "overhead_v", cfg.task.overhead_v);
        read_if(j, "cycles_per_bit", cfg.task.cycles_per_bit);
        read_if(j, "e_max_j", cfg.task.e_max_j);
        read_if(j, "circuit_power_w", cfg.task.circuit_power_w);
        read_if(j, "capacitance_rc", cfg.task.capacitance_rc);
        read_if(j, "r_min_bits", cfg.task.r_min_bits);
        read_if(j, "weights", cfg.task.weights);
    }
    if (root.contains("run")) {
        const json& j = root.at("run");
        reject_unknown_keys(j,
                            {"modes", "seeds", "seed_count", "master_seed", "ao_tol", "kkt_tol",
                             "max_outer_iters", "init"},
                            "run");
        if (j.contains("modes")) {
            cfg.run.modes.clear();
            for (const auto& name : j.at("modes")) {
                cfg.run.modes.push_back(solve_mode_from_string(name.get<std::string>()));
            }
        }
        read_if(j, "seeds", cfg.run.seeds);
        read_if(j, "seed_count", cfg.run.seed_count);
        read_if(j, "master_seed", cfg.run.master_seed);
        read_if(j, "ao_tol", cfg.run.ao_tol);
        read_if(j, "kkt_tol", cfg.run.kkt_tol);
        read_if(j, "max_outer_iters", cfg.run.max_outer_iters);
        read_if(j, "init", cfg.run.init);
    }
    if (root.contains("sweep") && !root.at("sweep").is_null()) {
        const json& j = root.at("sweep");
        reject_unknown_keys(j, {"parameter", "values"}, "sweep");
        ExperimentConfig::Sweep sweep;
        sweep.parameter = j.at("parameter").get<std::string>();
        sweep.values = j.at("values").get<std::vector<double>>();
        cfg.sweep = std::move(sweep);
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return config_from_json_text(buffer.str());
    } catch (const json::parse_error& err) {
        throw std::invalid_argument("config " + path.string() + ": " + err.what());
    }
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    json root;
    root["array"] = {{"kx", cfg.array.kx},
                     {"ky", cfg.array.ky},
                     {"spacing_wavelengths", cfg.array.spacing_wavelengths},
                     {"theta_max_deg", cfg.array.theta_max_deg}};
    root["channel"] = {{"carrier_hz", cfg.channel.carrier_hz},
                       {"directivity_p", cfg.channel.directivity_p},
                       {"g0_mode", cfg.channel.g0_mode},
                       {"g0_value", cfg.channel.g0_value},
                       {"a0_db", cfg.channel.a0_db},
                       {"pathloss_exp", cfg.channel.pathloss_exp},
                       {"rician_k", cfg.channel.rician_k},
                       {"noise_dbm", cfg.channel.noise_dbm}};
    root["users"] = {{"count", cfg.users.count},
                     {"horiz_dist_range_m",
                      {cfg.users.horiz_dist_range_m[0], cfg.users.horiz_dist_range_m[1]}},
                     {"height_range_m", {cfg.users.height_range_m[0], cfg.users.height_range_m[1]}},
                     {"area_uniform", cfg.users.area_uniform},
                     {"azimuth_halfspace", cfg.users.azimuth_halfspace}};
    root["task"] = {{"frame_s", cfg.task.frame_s},
                    {"bandwidth_hz", cfg.task.bandwidth_hz},
                    {"overhead_v", cfg.task.overhead_v},
                    {"cycles_per_bit", cfg.task.cycles_per_bit},
                    {"e_max_j", cfg.task.e_max_j},
                    {"circuit_power_w", cfg.task.circuit_power_w},
                    {"capacitance_rc", cfg.task.capacitance_rc},
                    {"r_min_bits", cfg.task.r_min_bits},
                    {"weights", cfg.task.weights}};
    json modes = json::array();
    for (SolveMode mode : cfg.run.modes) modes.push_back(to_string(mode));
    root["run"] = {{"modes", modes},
                   {"seeds", cfg.run.seeds},
                   {"seed_count", cfg.run.seed_count},
                   {"master_seed", cfg.run.master_seed},
                   {"ao_tol", cfg.run.ao_tol},
                   {"kkt_tol", cfg.run.kkt_tol},
                   {"max_outer_iters", cfg.run.max_outer_iters},
                   {"init", cfg.run.init}};
    if (cfg.sweep) {
        root["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
    }
    return root.dump(2);
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.array.kx < 1 || cfg.array.ky < 1) {
        throw std::invalid_argument("config: array counts must be >= 1");
    }
    if (!(cfg.array.spacing_wavelengths > 0)) {
        throw std::invalid_argument("config: spacing_wavelengths must be positive");
    }
    if (cfg.array.theta_max_deg < 0 || cfg.array.theta_max_deg > 90) {
        throw std::invalid_argument("config: theta_max_deg must lie in [0, 90]");
    }
    if (!(cfg.channel.carrier_hz > 0)) {
        throw std::invalid_argument("config: carrier_hz must be positive");
    }
    if (cfg.channel.directivity_p < 1) {
        throw std::invalid_argument("config: directivity_p must be >= 1");
    }
    if (cfg.channel.g0_mode != "normalized" && cfg.channel.g0_mode != "explicit") {
        throw std::invalid_argument("config: g0_mode must be \"normalized\" or \"explicit\"");
    }
    if (cfg.channel.g0_mode == "explicit" && !(cfg.channel.g0_value > 0)) {
        throw std::invalid_argument("config: explicit g0_value must be positive");
    }
    if (!(cfg.channel.pathloss_exp >= 2.0)) {
        throw std::invalid_argument("config: pathloss_exp must be >= 2");
    }
    if (!(cfg.channel.rician_k >= 0)) {
        throw std::invalid_argument("config: rician_k must be >= 0");
    }
    if (cfg.users.count < 1) {
        throw std::invalid_argument("config: users.count must be >= 1");
    }
    if (!(cfg.users.horiz_dist_range_m[0] > 0) ||
        cfg.users.horiz_dist_range_m[1] < cfg.users.horiz_dist_range_m[0]) {
        throw std::invalid_argument("config: horiz_dist_range_m must be ordered and positive");
    }
    if (!(cfg.users.height_range_m[0] > 0) ||
        cfg.users.height_range_m[1] < cfg.users.height_range_m[0]) {
        throw std::invalid_argument("config: height_range_m must be ordered and positive");
    }
    if (!(cfg.task.frame_s > 0) || !(cfg.task.bandwidth_hz > 0) || !(cfg.task.overhead_v > 1) ||
        !(cfg.task.cycles_per_bit > 0) || !(cfg.task.e_max_j >= 0) ||
        !(cfg.task.circuit_power_w >= 0) || !(cfg.task.capacitance_rc > 0) ||
        !(cfg.task.r_min_bits >= 0)) {
        throw std::invalid_argument("config: invalid task block");
    }
    if (!cfg.task.weights.empty() &&
        static_cast<int>(cfg.task.weights.size()) != cfg.users.count) {
        throw std::invalid_argument("config: weights must be empty or one per user");
    }
    for (double w : cfg.task.weights) {
        if (!(w > 0)) throw std::invalid_argument("config: weights must be positive");
    }
    if (cfg.run.modes.empty()) {
        throw std::invalid_argument("config: run.modes must not be empty");
    }
    if (cfg.run.seeds.empty() && cfg.run.seed_count < 1) {
        throw std::invalid_argument("config: need seeds or seed_count >= 1");
    }
    if (!(cfg.run.ao_tol > 0) || !(cfg.run.kkt_tol > 0) || cfg.run.max_outer_iters < 1) {
        throw std::invalid_argument("config: invalid run block");
    }
    if (cfg.run.init != "fa" && cfg.run.init != "centroid") {
        throw std::invalid_argument("config: run.init must be \"fa\" or \"centroid\"");
    }
    if (cfg.sweep) {
        const std::string& p = cfg.sweep->parameter;
        if (p != "directivity_p" && p != "theta_max_deg" && p != "antenna_count") {
            throw std::invalid_argument("config: unsupported sweep parameter \"" + p + "\"");
        }
        if (cfg.sweep->values.empty()) {
            throw std::invalid_argument("config: sweep.values must not be empty");
        }
        for (double v : cfg.sweep->values) {
            ExperimentConfig probe = cfg;
            probe.sweep.reset();
            validate_config(apply_sweep_value(probe, p, v));
        }
    }
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& config, const std::string& parameter,
                                   double value) {
    ExperimentConfig out = config;
    out.sweep.reset();
    if (parameter == "directivity_p") {
        const int p = static_cast<int>(std::lround(value));
        if (std::abs(value - p) > 1e-9 || p < 1) {
            throw std::invalid_argument("sweep: directivity_p values must be positive integers");
        }
        out.channel.directivity_p = p;
    } else if (parameter == "theta_max_deg") {
        out.array.theta_max_deg = value;
    } else if (parameter == "antenna_count") {
        const int count = static_cast<int>(std::lround(value));
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
        if (count < 1 || side * side != count) {
            throw std::invalid_argument("sweep: antenna_count values must be perfect squares");
        }
        out.array.kx = side;
        out.array.ky = side;
    } else {
        throw std::invalid_argument("sweep: unsupported parameter \"" + parameter + "\"");
    }
    return out;
}

Scenario generate_scenario(const ExperimentConfig& cfg, std::uint64_t seed) {
    validate_config(cfg);
    Scenario scenario;
    scenario.seed = seed;

    const double wavelength = kSpeedOfLight / cfg.channel.carrier_hz;
    const double theta_max = cfg.array.theta_max_deg * kPi / 180.0;
    scenario.array = build_array(cfg.array.kx, cfg.array.ky,
                                 cfg.array.spacing_wavelengths * wavelength, theta_max);

    scenario.channel.directivity = cfg.channel.directivity_p;
    scenario.channel.g0 = cfg.channel.g0_mode == "normalized"
                              ? normalized_peak_gain(cfg.channel.directivity_p)
                              : cfg.channel.g0_value;
    scenario.channel.ref_gain = db_to_linear(cfg.channel.a0_db);
    scenario.channel.pathloss_exp = cfg.channel.pathloss_exp;
    scenario.channel.rician_k = cfg.channel.rician_k;
    scenario.channel.wavelength = wavelength;
    scenario.channel.noise_power = dbm_to_watts(cfg.channel.noise_dbm);

    RngStream rng(seed);
    // Users are drawn before fading so placements pair up across array sizes.
    scenario.users.reserve(static_cast<std::size_t>(cfg.users.count));
    for (int m = 0; m < cfg.users.count; ++m) {
        const double lo = cfg.users.horiz_dist_range_m[0];
        const double hi = cfg.users.horiz_dist_range_m[1];
        double rho;
        if (cfg.users.area_uniform) {
            rho = std::sqrt(rng.uniform(lo * lo, hi * hi));
        } else {
            rho = rng.uniform(lo, hi);
        }
        const double azimuth = cfg.users.azimuth_halfspace ? rng.uniform(-kPi / 2, kPi / 2)
                                                           : kPi - rng.uniform() * 2.0 * kPi;
        const double height =
            rng.uniform(cfg.users.height_range_m[0], cfg.users.height_range_m[1]);
        const double r = std::hypot(rho, height);
        const double zenith = std::acos(std::clamp(height / r, -1.0, 1.0));
        scenario.users.push_back(user_position(r, zenith, azimuth));
    }

    scenario.channels = build_channels(scenario.array, scenario.users, scenario.channel, rng);

    UserTaskParams task;
    task.bandwidth = cfg.task.bandwidth_hz;
    task.overhead = cfg.task.overhead_v;
    task.cycles_per_bit = cfg.task.cycles_per_bit;
    task.frame = cfg.task.frame_s;
    task.e_max = cfg.task.e_max_j;
    task.circuit_power = cfg.task.circuit_power_w;
    task.capacitance = cfg.task.capacitance_rc;
    task.r_min = cfg.task.r_min_bits;
    scenario.tasks.assign(static_cast<std::size_t>(cfg.users.count), task);
    for (std::size_t m = 0; m < cfg.task.weights.size(); ++m) {
        scenario.tasks[m].weight = cfg.task.weights[m];
    }
    return scenario;
}

TrialRecord run_trial(const Scenario& scenario, SolveMode mode, const AoSettings& settings) {
    TrialRecord record;
    record.seed = scenario.seed;
    record.mode = mode;
    try {
        const Solution sol = solve_with_mode(scenario, mode, settings);
        record.objective_bits = sol.objective;
        record.outer_iterations = sol.report.outer_iterations;
        record.converged = sol.report.converged && sol.resource_report.converged;
        record.wall_time_s = sol.report.wall_time;
        record.max_residual = sol.report.max_constraint_residual;
        record.objective_trace = sol.report.objective_trace;
        record.tau_s = sol.allocation.slot;
        record.y_j = sol.allocation.offload_energy;
        record.p_w = sol.allocation.transmit_power;
        record.f_hz = sol.allocation.cpu_freq;
        record.r_loc_bits = sol.allocation.r_loc;
        record.r_off_bits = sol.allocation.r_off;
    } catch (const std::exception& err) {
        record.failed = true;
        record.error = err.what();
    }
    return record;
}

int worker_count(int num_jobs) {
    int cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap < 1) cap = 1;
    if (const char* env = std::getenv("RA_MEC_THREADS")) {
        const int requested = std::atoi(env);
        if (requested >= 1) cap = requested;
    }
    return std::max(1, std::min(cap, num_jobs));
}

namespace {

// Runs f(i) for i in [0, n) on the worker pool; each job writes only its own
// output slot, so scheduling never affects results.
void parallel_for(int n, const std::function<void(int)>& f) {
    const int workers = worker_count(n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n) break;
                f(i);
            }
        });
    }
    for (std::thread& t : pool) t.join();
}

struct Job {
    ExperimentConfig config; // sweep value applied
    std::uint64_t seed = 0;
    SolveMode mode = SolveMode::Fixed;
    std::string sweep_parameter;
    double sweep_value = 0;
};

std::vector<TrialRecord> run_jobs(const std::vector<Job>& jobs) {
    std::vector<TrialRecord> records(jobs.size());
    parallel_for(static_cast<int>(jobs.size()), [&](int i) {
        const Job& job = jobs[static_cast<std::size_t>(i)];
        TrialRecord record;
        try {
            const Scenario scenario = generate_scenario(job.config, job.seed);
            record = run_trial(scenario, job.mode, job.config.ao_settings());
        } catch (const std::exception& err) {
            record.seed = job.seed;
            record.mode = job.mode;
            record.failed = true;
            record.error = err.what();
        }
        record.sweep_parameter = job.sweep_parameter;
        record.sweep_value = job.sweep_value;
        records[static_cast<std::size_t>(i)] = std::move(record);
    });
    return records;
}

} // namespace

std::vector<TrialRecord> run_batch(const ExperimentConfig& config) {
    validate_config(config);
    std::vector<Job> jobs;
    // canonical order: seed, then mode
    for (std::uint64_t seed : config.seed_list()) {
        for (SolveMode mode : config.run.modes) {
            jobs.push_back(Job{config, seed, mode, "", 0.0});
        }
    }
    return run_jobs(jobs);
}

SweepResult run_sweep(const ExperimentConfig& config) {
    validate_config(config);
    if (!config.sweep) {
        throw std::invalid_argument("run_sweep: config has no sweep block");
    }
    const std::vector<std::uint64_t> seeds = config.seed_list(); // common random numbers
    std::vector<Job> jobs;
    for (std::uint64_t seed : seeds) {
        for (SolveMode mode : config.run.modes) {
            for (double value : config.sweep->values) {
                Job job;
                job.config = apply_sweep_value(config, config.sweep->parameter, value);
                job.seed = seed;
                job.mode = mode;
                job.sweep_parameter = config.sweep->parameter;
                job.sweep_value = value;
                jobs.push_back(std::move(job));
            }
        }
    }
    SweepResult result;
    result.trials = run_jobs(jobs);
    result.points = aggregate_trials(result.trials);
    return result;
}

std::vector<SweepPoint> aggregate_trials(const std::vector<TrialRecord>& trials) {
    // group by (parameter, value, mode), preserving value order of appearance
    std::vector<SweepPoint> points;
    for (const TrialRecord& t : trials) {
        SweepPoint* point = nullptr;
        for (SweepPoint& p : points) {
            if (p.parameter == t.sweep_parameter && p.value == t.sweep_value && p.mode == t.mode) {
                point = &p;
                break;
            }
        }
        if (!point) {
            points.push_back(SweepPoint{t.sweep_parameter, t.sweep_value, t.mode, 0, 0.0, 0.0, 0});
            point = &points.back();
        }
        if (t.failed) {
            ++point->failures;
        } else {
            ++point->num_trials;
            point->mean_objective += t.objective_bits;
            point->std_objective += t.objective_bits * t.objective_bits;
        }
    }
    for (SweepPoint& p : points) {
        if (p.num_trials > 0) {
            p.mean_objective /= p.num_trials;
            const double var =
                std::max(0.0, p.std_objective / p.num_trials - p.mean_objective * p.mean_objective);
            p.std_objective = std::sqrt(var);
        } else {
            p.mean_objective = 0;
            p.std_objective = 0;
        }
    }
    std::sort(points.begin(), points.end(), [](const SweepPoint& a, const SweepPoint& b) {
        if (a.value != b.value) return a.value < b.value;
        return mode_order(a.mode) < mode_order(b.mode);
    });
    return points;
}

std::string trials_to_csv(const std::vector<TrialRecord>& trials, int num_users) {
    std::vector<TrialRecord> sorted = trials;
    std::sort(sorted.begin(), sorted.end(), [](const TrialRecord& a, const TrialRecord& b) {
        if (a.seed != b.seed) return a.seed < b.seed;
        if (mode_order(a.mode) != mode_order(b.mode)) return mode_order(a.mode) < mode_order(b.mode);
        return a.sweep_value < b.sweep_value;
    });

    std::ostringstream out;
    out << "seed,mode,sweep_parameter,sweep_value,objective_bits,outer_iterations,converged,"
           "wall_time_s,max_residual,failed";
    for (int m = 0; m < num_users; ++m) {
        out << ",u" << m << "_tau_s,u" << m << "_y_j,u" << m << "_p_w,u" << m << "_f_hz,u" << m
            << "_r_loc_bits,u" << m << "_r_off_bits";
    }
    out << "\n";
    auto field = [](const std::vector<double>& v, int i) {
        return i < static_cast<int>(v.size()) ? v[static_cast<std::size_t>(i)] : 0.0;
    };
    for (const TrialRecord& t : sorted) {
        out << t.seed << ',' << to_string(t.mode) << ',' << t.sweep_parameter << ','
            << fmt_double(t.sweep_value) << ',' << fmt_double(t.objective_bits) << ','
            << t.outer_iterations << ',' << (t.converged ? 1 : 0) << ','
            << fmt_double(t.wall_time_s) << ',' << fmt_double(t.max_residual) << ','
            << (t.failed ? 1 : 0);
        for (int m = 0; m < num_users; ++m) {
            out << ',' << fmt_double(field(t.tau_s, m)) << ',' << fmt_double(field(t.y_j, m)) << ','
                << fmt_double(field(t.p_w, m)) << ',' << fmt_double(field(t.f_hz, m)) << ','
                << fmt_double(field(t.r_loc_bits, m)) << ',' << fmt_double(field(t.r_off_bits, m));
        }
        out << "\n";
    }
    return out.str();
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points) {
    std::ostringstream out;
    out << "parameter,value,mode,num_trials,mean_objective_bits,std_objective_bits,failures\n";
    for (const SweepPoint& p : points) {
        out << p.parameter << ',' << fmt_double(p.value) << ',' << to_string(p.mode) << ','
            << p.num_trials << ',' << fmt_double(p.mean_objective) << ','
            << fmt_double(p.std_objective) << ',' << p.failures << "\n";
    }
    return out.str();
}

std::string trace_to_csv(const TrialRecord& trial) {
    std::ostringstream out;
    out << "iteration,objective_bits\n";
    for (std::size_t i = 0; i < trial.objective_trace.size(); ++i) {
        out << i << ',' << fmt_double(trial.objective_trace[i]) << "\n";
    }
    return out.str();
}

std::vector<std::filesystem::path> emit_results(const std::vector<TrialRecord>& trials,
                                                const std::vector<SweepPoint>& points,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " +
                                 ec.message());
    }
    std::vector<std::filesystem::path> written;

    const auto trials_path = out_dir / "trials.csv";
    write_file(trials_path, trials_to_csv(trials, config.users.count));
    written.push_back(trials_path);

    if (!points.empty()) {
        const auto sweep_path = out_dir / "sweep.csv";
        write_file(sweep_path, sweep_to_csv(points));
        written.push_back(sweep_path);
    }

    json run;
    run["artifact_version"] = kVersion;
    run["config"] = json::parse(config_to_json_text(config));
    run["num_trials"] = trials.size();
    json jtrials = json::array();
    for (const TrialRecord& t : trials) {
        json jt;
        jt["seed"] = t.seed;
        jt["mode"] = to_string(t.mode);
        jt["sweep_parameter"] = t.sweep_parameter;
        jt["sweep_value"] = t.sweep_value;
        jt["objective_bits"] = t.objective_bits;
        jt["outer_iterations"] = t.outer_iterations;
        jt["converged"] = t.converged;
        jt["wall_time_s"] = t.wall_time_s;
        jt["max_residual"] = t.max_residual;
        jt["failed"] = t.failed;
        if (t.failed) jt["error"] = t.error;
        jt["tau_s"] = t.tau_s;
        jt["y_j"] = t.y_j;
        jt["p_w"] = t.p_w;
        jt["f_hz"] = t.f_hz;
        jt["r_loc_bits"] = t.r_loc_bits;
        jt["r_off_bits"] = t.r_off_bits;
        jt["objective_trace"] = t.objective_trace;
        jtrials.push_back(std::move(jt));
    }
    run["trials"] = std::move(jtrials);
    const auto run_path = out_dir / "run.json";
    write_file(run_path, run.dump(2));
    written.push_back(run_path);
    return written;
}

std::string channels_to_json(const ChannelSet& channels) {
    json links = json::array();
    for (int m = 0; m < channels.num_users; ++m) {
        for (int k = 0; k < channels.num_antennas; ++k) {
            const ChannelLink& link = channels.at(k, m);
            links.push_back({{"k", k},
                             {"m", m},
                             {"distance", link.link.distance},
                             {"direction",
                              {link.link.direction.x(), link.link.direction.y(),
                               link.link.direction.z()}},
                             {"beta_re", link.beta.real()},
                             {"beta_im", link.beta.imag()}});
        }
    }
    json root;
    root["num_antennas"] = channels.num_antennas;
    root["num_users"] = channels.num_users;
    root["links"] = std::move(links);
    return root.dump(2);
}

} // namespace ramec
