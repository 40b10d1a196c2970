// Batch front-end: parses run configurations from flags and key=value
// config files (flags override the file), executes the selected mode and
// writes CSV series / text reports.

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "dce/runner.hpp"

namespace {

struct CliBinding {
    dce::RunConfig values;
    std::string config_path;
    std::string write_config_path;
    std::string kind_name;
    std::vector<std::pair<CLI::Option*,
                          std::function<void(dce::RunConfig&, const CliBinding&)>>>
        appliers;

    void bind_common(CLI::App* cmd) {
        auto track = [this](CLI::Option* opt,
                            std::function<void(dce::RunConfig&, const CliBinding&)> fn) {
            appliers.emplace_back(opt, std::move(fn));
        };
        cmd->add_option("--config", config_path, "key=value config file (flags override it)");
        cmd->add_option("--write-config", write_config_path,
                        "write the effective configuration to this path");
        track(cmd->add_option("-o,--output", values.output, "output file path"),
              [](dce::RunConfig& c, const CliBinding& b) { c.output = b.values.output; });
        track(cmd->add_option("--samples", values.sample_count,
                              "uniform sample intervals over [0, t_final]"),
              [](dce::RunConfig& c, const CliBinding& b) { c.sample_count = b.values.sample_count; });
        track(cmd->add_option("-N,--levels", values.spec.levels, "detector levels N"),
              [](dce::RunConfig& c, const CliBinding& b) { c.spec.levels = b.values.spec.levels; });
        track(cmd->add_option("-g,--coupling", values.spec.g, "base coupling g"),
              [](dce::RunConfig& c, const CliBinding& b) { c.spec.g = b.values.spec.g; });
        track(cmd->add_option("-e,--epsilon", values.spec.epsilon, "modulation depth epsilon"),
              [](dce::RunConfig& c, const CliBinding& b) { c.spec.epsilon = b.values.spec.epsilon; });
        track(cmd->add_option("-T,--t-final", values.spec.t_final, "final time (units of 1/omega0)"),
              [](dce::RunConfig& c, const CliBinding& b) { c.spec.t_final = b.values.spec.t_final; });
        track(cmd->add_option("-K,--fock-cutoff", values.spec.fock_cutoff,
                              "photon cutoff K_max (omit to size it automatically)"),
              [](dce::RunConfig& c, const CliBinding& b) {
                  c.spec.fock_cutoff = b.values.spec.fock_cutoff;
                  c.cutoff_is_auto = false;
              });
        track(cmd->add_option("--kind", kind_name,
                              "detector kind: ladder | two-level-ensemble | ho-truncated"),
              [](dce::RunConfig& c, const CliBinding& b) {
                  c.spec.detector_kind = dce::detector_kind_from_string(b.kind_name);
              });
        track(cmd->add_option("--rel-tol", values.spec.tol.rel_tol, "integrator relative tolerance"),
              [](dce::RunConfig& c, const CliBinding& b) {
                  c.spec.tol.rel_tol = b.values.spec.tol.rel_tol;
              });
        track(cmd->add_option("--abs-tol", values.spec.tol.abs_tol, "integrator absolute tolerance"),
              [](dce::RunConfig& c, const CliBinding& b) {
                  c.spec.tol.abs_tol = b.values.spec.tol.abs_tol;
              });
        track(cmd->add_option("--tail-threshold", values.spec.tol.tail_threshold,
                              "allowed occupation of the top 4 Fock modes"),
              [](dce::RunConfig& c, const CliBinding& b) {
                  c.spec.tol.tail_threshold = b.values.spec.tol.tail_threshold;
              });
        track(cmd->add_option("--k-report", values.k_report,
                              "photon distribution columns (default min(K,30))"),
              [](dce::RunConfig& c, const CliBinding& b) { c.k_report = b.values.k_report; });
        track(cmd->add_flag("--verbose-photons", values.verbose_photons,
                            "emit the full photon distribution"),
              [](dce::RunConfig& c, const CliBinding& b) {
                  c.verbose_photons = b.values.verbose_photons;
              });
        track(cmd->add_option("--retry-cap", values.retry_cap,
                              "cutoff doublings allowed on truncation overflow"),
              [](dce::RunConfig& c, const CliBinding& b) { c.retry_cap = b.values.retry_cap; });
    }

    dce::RunConfig resolve(dce::RunMode mode) const {
        dce::RunConfig eff;
        if (!config_path.empty()) eff = dce::load_config_file(config_path);
        for (const auto& [opt, fn] : appliers)
            if (opt->count() > 0) fn(eff, *this);
        eff.mode = mode;
        return eff;
    }
};

void maybe_write_config(const CliBinding& bind, dce::RunConfig cfg,
                        const dce::RunResult& result) {
    if (bind.write_config_path.empty()) return;
    cfg.spec = result.effective_spec;
    cfg.cutoff_is_auto = false;
    std::ofstream out(bind.write_config_path, std::ios::binary);
    out << dce::serialize_config(cfg);
}

int finish(const CliBinding& bind, const dce::RunConfig& cfg, const dce::RunResult& result) {
    maybe_write_config(bind, cfg, result);
    for (const auto& path : result.outputs) std::cout << "wrote " << path << "\n";
    if (!result.message.empty()) std::cout << result.message << "\n";
    return static_cast<int>(dce::RunStatus::Ok);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamical Casimir effect simulator: cavity mode + N-level detector"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "integrate the amplitude equations, write CSV");
    CliBinding sim_bind;
    sim_bind.bind_common(sim);

    auto* ana = app.add_subcommand("analytic", "closed-form observables, write CSV");
    CliBinding ana_bind;
    ana_bind.bind_common(ana);
    std::string model = "ho";
    ana->add_option("--model", model, "ho | empty");

    auto* spe = app.add_subcommand("spectral", "excitation-block spectra and photon-cap report");
    CliBinding spe_bind;
    spe_bind.bind_common(spe);
    int max_excitation = 20;
    auto* max_exc_opt = spe->add_option("--max-excitation", max_excitation,
                                        "highest block excitation E");

    auto* cmp = app.add_subcommand("compare", "numerical vs analytic columns plus deviations");
    CliBinding cmp_bind;
    cmp_bind.bind_common(cmp);
    std::string compare_model;
    auto* cmp_model_opt = cmp->add_option("--model", compare_model, "ho | empty");

    auto* pre = app.add_subcommand("preset", "figure presets (g = 1e-2, epsilon = 1e-3)");
    CliBinding pre_bind;
    pre_bind.bind_common(pre);
    std::string preset_id;
    pre->add_option("--id", preset_id, "fig1 | fig2 | fig3a | fig3b")->required();

    auto* swp = app.add_subcommand("sweep", "independent simulate runs over a parameter list");
    CliBinding swp_bind;
    swp_bind.bind_common(swp);
    std::string sweep_param;
    std::string sweep_values;
    int sweep_jobs = std::max(1u, std::thread::hardware_concurrency());
    swp->add_option("--param", sweep_param, "levels | g | epsilon")->required();
    swp->add_option("--values", sweep_values, "comma-separated values")->required();
    swp->add_option("--jobs", sweep_jobs, "worker pool size");

    auto* chk = app.add_subcommand("check", "convergence check: doubled cutoff, rel_tol/10");
    CliBinding chk_bind;
    chk_bind.bind_common(chk);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        app.exit(e);
        return static_cast<int>(dce::RunStatus::ConfigError);
    }

    try {
        if (app.got_subcommand(sim)) {
            dce::RunConfig cfg = sim_bind.resolve(dce::RunMode::Simulate);
            return finish(sim_bind, cfg, dce::run_simulate(cfg));
        }
        if (app.got_subcommand(ana)) {
            if (model != "empty" && model != "ho")
                throw std::invalid_argument("analytic --model must be ho or empty");
            dce::RunMode mode =
                model == "empty" ? dce::RunMode::EmptyCavity : dce::RunMode::AnalyticHO;
            dce::RunConfig cfg = ana_bind.resolve(mode);
            return finish(ana_bind, cfg,
                          mode == dce::RunMode::EmptyCavity ? dce::run_empty_cavity(cfg)
                                                            : dce::run_analytic_ho(cfg));
        }
        if (app.got_subcommand(spe)) {
            dce::RunConfig cfg = spe_bind.resolve(dce::RunMode::Spectral);
            if (max_exc_opt->count() > 0) cfg.max_excitation = max_excitation;
            return finish(spe_bind, cfg, dce::run_spectral(cfg));
        }
        if (app.got_subcommand(cmp)) {
            dce::RunConfig cfg = cmp_bind.resolve(dce::RunMode::Compare);
            if (cmp_model_opt->count() > 0) cfg.compare_model = compare_model;
            return finish(cmp_bind, cfg, dce::run_compare(cfg));
        }
        if (app.got_subcommand(pre)) {
            dce::RunConfig cfg = pre_bind.resolve(dce::RunMode::Preset);
            cfg.preset_id = preset_id;
            return finish(pre_bind, cfg, dce::run_preset(cfg));
        }
        if (app.got_subcommand(swp)) {
            dce::RunConfig cfg = swp_bind.resolve(dce::RunMode::Simulate);
            std::vector<std::string> values;
            std::stringstream ss(sweep_values);
            std::string item;
            while (std::getline(ss, item, ',')) values.push_back(item);
            if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
            auto outcomes = dce::run_sweep(cfg, sweep_param, values, sweep_jobs);
            int rc = 0;
            for (const auto& o : outcomes) {
                if (o.status == dce::RunStatus::Ok) {
                    std::cout << sweep_param << "=" << o.value << " wrote " << o.output << "\n";
                } else {
                    std::cerr << sweep_param << "=" << o.value << " failed: " << o.error << "\n";
                    rc = static_cast<int>(o.status);
                }
            }
            return rc;
        }
        if (app.got_subcommand(chk)) {
            dce::RunConfig cfg = chk_bind.resolve(dce::RunMode::Simulate);
            dce::ConvergenceReport rep = dce::convergence_check(cfg);
            std::cout << (rep.pass ? "PASS" : "FAIL") << " max_rel_deviation_n="
                      << dce::csv::num(rep.max_rel_deviation_n) << " (K=" << rep.base_cutoff
                      << " vs K=" << rep.check_cutoff << ")\n";
            return rep.pass ? 0 : 1;
        }
    } catch (const dce::TruncationOverflow& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(dce::RunStatus::TruncationFailure);
    } catch (const dce::NormDriftExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(dce::RunStatus::NormFailure);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return static_cast<int>(dce::RunStatus::ConfigError);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
