#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dce/config.hpp"
#include "dce/report.hpp"

namespace dce {

enum class RunStatus : int {
    Ok = 0,
    ConfigError = 2,
    TruncationFailure = 3, ///< TruncationOverflow persisted through the retry cap
    NormFailure = 4,
};

/// Output path resolution: explicit path wins; otherwise "<stem>.csv" in
/// $DCE_OUTPUT_DIR (or the working directory).
inline std::string resolve_output(const RunConfig& cfg, const std::string& stem) {
    if (!cfg.output.empty()) return cfg.output;
    std::string name = stem + ".csv";
    if (const char* dir = std::getenv("DCE_OUTPUT_DIR"))
        return (std::filesystem::path(dir) / name).string();
    return name;
}

struct RunResult {
    RunStatus status = RunStatus::Ok;
    std::string message;
    std::vector<std::string> outputs;
    SystemSpec effective_spec;  ///< after cutoff resolution and doubling
    StepStats stats;
};

namespace detail {

/// Simulation core shared by simulate/preset/compare/check: resolves the
/// cutoff, integrates, retries with a doubled cutoff on TruncationOverflow.
inline Trajectory simulate_with_retry(RunConfig& cfg, RunResult& result) {
    if (cfg.cutoff_is_auto) cfg.spec.fock_cutoff = auto_cutoff(cfg.spec);
    int attempts = 0;
    for (;;) {
        cfg.spec.validate();
        GeneratorSpec gen = GeneratorSpec::from_spec(cfg.spec);
        auto grid = uniform_grid(cfg.spec.t_final, std::max(1, cfg.sample_count));
        try {
            Trajectory traj = integrate_adaptive(StateVector::vacuum(cfg.spec), gen,
                                                 cfg.spec.t_final, cfg.spec.tol, grid);
            result.effective_spec = cfg.spec;
            result.stats = traj.step_stats;
            return traj;
        } catch (const TruncationOverflow&) {
            if (attempts++ >= cfg.retry_cap) throw;
            cfg.spec.fock_cutoff *= 2;
        }
    }
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << content;
}

} // namespace detail

inline RunResult run_simulate(RunConfig cfg) {
    RunResult result;
    std::ostringstream buf;
    Trajectory traj = detail::simulate_with_retry(cfg, result);
    write_trajectory_csv(buf, traj, cfg.spec.epsilon, cfg.spec.levels, cfg.effective_k_report());
    std::string path = resolve_output(cfg, "simulate");
    detail::write_file(path, buf.str());
    result.outputs.push_back(path);
    return result;
}

inline RunResult run_empty_cavity(const RunConfig& cfg) {
    RunResult result;
    result.effective_spec = cfg.spec;
    auto grid = uniform_grid(cfg.spec.t_final, std::max(1, cfg.sample_count));
    std::ostringstream buf;
    write_empty_cavity_csv(buf, cfg.spec.epsilon, grid);
    std::string path = resolve_output(cfg, "empty_cavity");
    detail::write_file(path, buf.str());
    result.outputs.push_back(path);
    return result;
}

inline RunResult run_analytic_ho(const RunConfig& cfg) {
    RunResult result;
    result.effective_spec = cfg.spec;
    auto grid = uniform_grid(cfg.spec.t_final, std::max(1, cfg.sample_count));
    std::ostringstream buf;
    write_ho_csv(buf, HOParams(cfg.spec.beta(), cfg.spec.g), cfg.spec.epsilon, grid);
    std::string path = resolve_output(cfg, "analytic_ho");
    detail::write_file(path, buf.str());
    result.outputs.push_back(path);
    return result;
}

inline RunResult run_spectral(const RunConfig& cfg) {
    RunResult result;
    result.effective_spec = cfg.spec;
    auto profile = coupling_profile(cfg.spec);
    std::ostringstream buf;
    write_spectral_report(buf, profile, cfg.spec.levels, cfg.max_excitation);
    std::string path = resolve_output(cfg, "spectral");
    detail::write_file(path, buf.str());
    result.outputs.push_back(path);
    return result;
}

inline RunResult run_compare(RunConfig cfg) {
    if (cfg.compare_model != "ho" && cfg.compare_model != "empty")
        throw std::invalid_argument("compare_model must be 'ho' or 'empty'");
    RunResult result;
    std::ostringstream buf;
    Trajectory traj = detail::simulate_with_retry(cfg, result);
    CompareSummary summary;
    write_compare_csv(buf, traj, HOParams(cfg.spec.beta(), cfg.spec.g), cfg.spec.epsilon,
                      cfg.compare_model == "ho", summary);
    std::string path = resolve_output(cfg, "compare");
    detail::write_file(path, buf.str());
    result.outputs.push_back(path);
    std::ostringstream msg;
    msg << "max_rel_n=" << csv::num(summary.max_rel_n);
    result.message = msg.str();
    return result;
}

/// Figure presets pin the paper's parameters g = 1e-2, epsilon = 1e-3 on an
/// eps*t in [0,3] grid; fig1/fig2 take N from the config (default 5),
/// fig3a/fig3b are the N = 12 photon-distribution runs.
inline RunConfig expand_preset(RunConfig cfg) {
    if (cfg.mode != RunMode::Preset)
        throw std::invalid_argument("expand_preset requires preset mode");
    cfg.spec.g = 1e-2;
    cfg.spec.epsilon = 1e-3;
    cfg.spec.t_final = 3.0 / cfg.spec.epsilon;
    if (cfg.preset_id == "fig1") {
        cfg.spec.detector_kind = DetectorKind::Ladder;
    } else if (cfg.preset_id == "fig2") {
        cfg.spec.detector_kind = DetectorKind::TwoLevelEnsemble;
    } else if (cfg.preset_id == "fig3a") {
        cfg.spec.detector_kind = DetectorKind::Ladder;
        cfg.spec.levels = 12;
    } else if (cfg.preset_id == "fig3b") {
        cfg.spec.detector_kind = DetectorKind::TwoLevelEnsemble;
        cfg.spec.levels = 12;
    } else {
        throw std::invalid_argument("unknown preset '" + cfg.preset_id + "'");
    }
    cfg.mode = RunMode::Simulate;
    return cfg;
}

inline RunResult run_preset(const RunConfig& cfg) { return run_simulate(expand_preset(cfg)); }

/// Convergence check: rerun with the cutoff doubled and rel_tol/10 and
/// report the largest relative deviation of the mean photon number.
struct ConvergenceReport {
    bool pass = false;
    double max_rel_deviation_n = 0.0;
    int base_cutoff = 0;
    int check_cutoff = 0;
};

inline ConvergenceReport convergence_check(RunConfig cfg) {
    RunResult scratch;
    RunConfig base = cfg;
    Trajectory traj_a = detail::simulate_with_retry(base, scratch);

    RunConfig doubled = base; // inherits any retry doubling from the base run
    doubled.spec = scratch.effective_spec;
    doubled.cutoff_is_auto = false;
    doubled.spec.fock_cutoff *= 2;
    doubled.spec.tol.rel_tol /= 10.0;
    Trajectory traj_b = detail::simulate_with_retry(doubled, scratch);

    ConvergenceReport report;
    report.base_cutoff = base.spec.fock_cutoff;
    report.check_cutoff = doubled.spec.fock_cutoff;
    for (std::size_t i = 0; i < traj_a.samples.size(); ++i) {
        double na = traj_a.samples[i].record.n_mean;
        double nb = traj_b.samples[i].record.n_mean;
        double rel = std::abs(na - nb) / std::max(std::abs(nb), 1e-9);
        report.max_rel_deviation_n = std::max(report.max_rel_deviation_n, rel);
    }
    report.pass = report.max_rel_deviation_n < 1e-6;
    return report;
}

/// Independent runs fanned out over a worker pool, one output file per
/// value; no shared mutable state between workers.
struct SweepOutcome {
    std::string value;
    RunStatus status = RunStatus::Ok;
    std::string output;
    std::string error;
};

inline std::vector<SweepOutcome> run_sweep(const RunConfig& base, const std::string& param,
                                           const std::vector<std::string>& values, int jobs) {
    if (param != "levels" && param != "g" && param != "epsilon")
        throw std::invalid_argument("sweep parameter must be levels, g or epsilon");
    std::vector<SweepOutcome> outcomes(values.size());
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mtx;
    int workers = std::max(1, std::min<int>(jobs, static_cast<int>(values.size())));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lock(mtx);
                    if (next >= values.size()) return;
                    i = next++;
                }
                SweepOutcome& out = outcomes[i];
                out.value = values[i];
                RunConfig cfg = base;
                try {
                    if (param == "levels") cfg.spec.levels = detail::parse_int(param, values[i]);
                    else if (param == "g") cfg.spec.g = detail::parse_double(param, values[i]);
                    else cfg.spec.epsilon = detail::parse_double(param, values[i]);
                    std::string stem = "sweep_" + param + "_" + values[i];
                    if (cfg.output.empty()) cfg.output = resolve_output(cfg, stem);
                    else cfg.output += "." + param + "_" + values[i] + ".csv";
                    RunResult r = run_simulate(cfg);
                    out.output = r.outputs.front();
                } catch (const TruncationOverflow& e) {
                    out.status = RunStatus::TruncationFailure;
                    out.error = e.what();
                } catch (const NormDriftExceeded& e) {
                    out.status = RunStatus::NormFailure;
                    out.error = e.what();
                } catch (const std::exception& e) {
                    out.status = RunStatus::ConfigError;
                    out.error = e.what();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    return outcomes;
}

} // namespace dce
