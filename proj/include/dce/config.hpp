#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dce/system.hpp"

namespace dce {

enum class RunMode { Simulate, AnalyticHO, EmptyCavity, Spectral, Compare, Preset };

inline const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::Simulate: return "simulate";
        case RunMode::AnalyticHO: return "analytic-ho";
        case RunMode::EmptyCavity: return "empty-cavity";
        case RunMode::Spectral: return "spectral";
        case RunMode::Compare: return "compare";
        case RunMode::Preset: return "preset";
    }
    return "?";
}

/// One batch run: mode, physical spec, output location and sampling.
struct RunConfig {
    RunMode mode = RunMode::Simulate;
    SystemSpec spec;
    bool cutoff_is_auto = true;   ///< fock_cutoff not pinned by the user
    std::string output;           ///< empty = "<mode>.csv" in the default directory
    int sample_count = 600;       ///< uniform intervals in eps*t (rows = count+1)
    std::string preset_id;        ///< fig1 | fig2 | fig3a | fig3b
    int k_report = -1;            ///< photon columns; -1 = min(fock_cutoff, 30)
    bool verbose_photons = false; ///< emit the full photon distribution
    int retry_cap = 3;            ///< cutoff doublings allowed on TruncationOverflow
    int max_excitation = 20;      ///< spectral mode: highest block excitation
    std::string compare_model = "ho"; ///< compare mode: "ho" or "empty"

    int effective_k_report() const {
        if (verbose_photons) return spec.fock_cutoff;
        return k_report >= 0 ? std::min(k_report, spec.fock_cutoff)
                             : std::min(spec.fock_cutoff, 30);
    }
};

inline DetectorKind detector_kind_from_string(const std::string& s) {
    if (s == "ladder") return DetectorKind::Ladder;
    if (s == "two-level-ensemble") return DetectorKind::TwoLevelEnsemble;
    if (s == "ho-truncated") return DetectorKind::HarmonicOscillatorTruncated;
    throw std::invalid_argument("unknown detector kind '" + s + "'");
}

inline RunMode run_mode_from_string(const std::string& s) {
    if (s == "simulate") return RunMode::Simulate;
    if (s == "analytic-ho") return RunMode::AnalyticHO;
    if (s == "empty-cavity") return RunMode::EmptyCavity;
    if (s == "spectral") return RunMode::Spectral;
    if (s == "compare") return RunMode::Compare;
    if (s == "preset") return RunMode::Preset;
    throw std::invalid_argument("unknown mode '" + s + "'");
}

/// Flat key=value config file, UTF-8, one pair per line, '#' comments.
inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        std::size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) +
                                                     ": empty key");
        kv[key] = value;
    }
    return kv;
}

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad number '" + v + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad integer '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config key '" + key + "': bad boolean '" + v + "'");
}

} // namespace detail

/// Applies config-file pairs onto a RunConfig. Unknown keys are an error.
inline void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;
    for (const auto& [key, value] : kv) {
        if (key == "mode") cfg.mode = run_mode_from_string(value);
        else if (key == "kind") cfg.spec.detector_kind = detector_kind_from_string(value);
        else if (key == "levels") cfg.spec.levels = parse_int(key, value);
        else if (key == "g") cfg.spec.g = parse_double(key, value);
        else if (key == "epsilon") cfg.spec.epsilon = parse_double(key, value);
        else if (key == "fock_cutoff") {
            cfg.spec.fock_cutoff = parse_int(key, value);
            cfg.cutoff_is_auto = false;
        } else if (key == "t_final") cfg.spec.t_final = parse_double(key, value);
        else if (key == "rel_tol") cfg.spec.tol.rel_tol = parse_double(key, value);
        else if (key == "abs_tol") cfg.spec.tol.abs_tol = parse_double(key, value);
        else if (key == "tail_threshold") cfg.spec.tol.tail_threshold = parse_double(key, value);
        else if (key == "output") cfg.output = value;
        else if (key == "samples") cfg.sample_count = parse_int(key, value);
        else if (key == "preset") cfg.preset_id = value;
        else if (key == "k_report") cfg.k_report = parse_int(key, value);
        else if (key == "verbose_photons") cfg.verbose_photons = parse_bool(key, value);
        else if (key == "retry_cap") cfg.retry_cap = parse_int(key, value);
        else if (key == "max_excitation") cfg.max_excitation = parse_int(key, value);
        else if (key == "compare_model") cfg.compare_model = value;
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    RunConfig cfg;
    apply_key_values(cfg, parse_key_values(in));
    return cfg;
}

/// Serializes the effective config; loading the result reproduces the run.
inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "mode = " << to_string(cfg.mode) << "\n";
    out << "kind = " << to_string(cfg.spec.detector_kind) << "\n";
    out << "levels = " << cfg.spec.levels << "\n";
    out << "g = " << num(cfg.spec.g) << "\n";
    out << "epsilon = " << num(cfg.spec.epsilon) << "\n";
    out << "fock_cutoff = " << cfg.spec.fock_cutoff << "\n";
    out << "t_final = " << num(cfg.spec.t_final) << "\n";
    out << "rel_tol = " << num(cfg.spec.tol.rel_tol) << "\n";
    out << "abs_tol = " << num(cfg.spec.tol.abs_tol) << "\n";
    out << "tail_threshold = " << num(cfg.spec.tol.tail_threshold) << "\n";
    out << "samples = " << cfg.sample_count << "\n";
    out << "k_report = " << cfg.effective_k_report() << "\n";
    out << "verbose_photons = " << (cfg.verbose_photons ? "true" : "false") << "\n";
    out << "retry_cap = " << cfg.retry_cap << "\n";
    out << "max_excitation = " << cfg.max_excitation << "\n";
    out << "compare_model = " << cfg.compare_model << "\n";
    if (!cfg.output.empty()) out << "output = " << cfg.output << "\n";
    return out.str();
}

} // namespace dce
