#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dce {

enum class DetectorKind {
    Ladder,                      ///< N equidistant levels, g_j = g*sqrt(j)
    TwoLevelEnsemble,            ///< N-1 identical atoms via Dicke states, g_j = g*sqrt(j(N-j))
    HarmonicOscillatorTruncated, ///< oscillator truncated to N levels, g_j = g*sqrt(j)
};

inline const char* to_string(DetectorKind k) {
    switch (k) {
        case DetectorKind::Ladder: return "ladder";
        case DetectorKind::TwoLevelEnsemble: return "two-level-ensemble";
        case DetectorKind::HarmonicOscillatorTruncated: return "ho-truncated";
    }
    return "?";
}

struct Tolerances {
    double rel_tol = 1e-11;        ///< per-step relative error (max-norm)
    double abs_tol = 1e-13;        ///< per-step absolute error (max-norm)
    double tail_threshold = 1e-6;  ///< allowed occupation of the top 4 Fock modes

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(tail_threshold > 0.0))
            throw std::invalid_argument("tolerances must be positive");
    }
};

/// Full physical configuration of a run. Units are dimensionless with
/// hbar = omega_0 = 1; time is measured in 1/omega_0. The squeezing rate
/// beta = epsilon/4 is always derived from epsilon, never stored.
struct SystemSpec {
    DetectorKind detector_kind = DetectorKind::Ladder;
    int levels = 2;        ///< N; for TwoLevelEnsemble this is atom_count + 1 Dicke levels
    double g = 0.0;        ///< base coupling, >= 0
    double epsilon = 0.0;  ///< frequency-modulation depth, |epsilon| << 1
    int fock_cutoff = 16;  ///< K_max: photon numbers 0..K_max are kept
    double t_final = 0.0;
    Tolerances tol{};

    double beta() const { return epsilon / 4.0; }

    void validate() const {
        if (levels < 1) throw std::invalid_argument("levels must be >= 1");
        if (detector_kind == DetectorKind::HarmonicOscillatorTruncated && levels < 4)
            throw std::invalid_argument("truncated-oscillator detector needs levels >= 4");
        if (fock_cutoff < 2) throw std::invalid_argument("fock_cutoff must be >= 2");
        if (!(g >= 0.0)) throw std::invalid_argument("g must be >= 0");
        if (!std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be finite");
        if (!(t_final >= 0.0)) throw std::invalid_argument("t_final must be >= 0");
        tol.validate();
    }
};

/// Ladder couplings g_1..g_{N-1}. Boundary convention: g_0 = g_{j>=N} = 0,
/// handled by the consumers, not stored here.
struct CouplingProfile {
    std::vector<double> couplings;

    int size() const { return static_cast<int>(couplings.size()); }

    /// g_j for j = 1..N-1; zero outside that range.
    double g(int j) const {
        if (j < 1 || j > size()) return 0.0;
        return couplings[static_cast<std::size_t>(j - 1)];
    }

    void validate(int levels) const {
        if (size() != levels - 1)
            throw std::invalid_argument("coupling profile must have N-1 entries");
        for (double v : couplings)
            if (!(v >= 0.0)) throw std::invalid_argument("couplings must be >= 0");
    }
};

/// Builds the coupling ladder for a detector kind. Ladder and truncated
/// oscillator use g_j = g*sqrt(j); the Dicke mapping of N-1 identical
/// two-level atoms gives g_j = g*sqrt(j(N-j)).
inline CouplingProfile coupling_profile(DetectorKind kind, int levels, double g) {
    if (levels < 1) throw std::invalid_argument("levels must be >= 1");
    if (!(g >= 0.0)) throw std::invalid_argument("g must be >= 0");
    CouplingProfile profile;
    profile.couplings.reserve(static_cast<std::size_t>(levels > 0 ? levels - 1 : 0));
    for (int j = 1; j <= levels - 1; ++j) {
        double gj = 0.0;
        switch (kind) {
            case DetectorKind::Ladder:
            case DetectorKind::HarmonicOscillatorTruncated:
                gj = g * std::sqrt(static_cast<double>(j));
                break;
            case DetectorKind::TwoLevelEnsemble:
                gj = g * std::sqrt(static_cast<double>(j) * static_cast<double>(levels - j));
                break;
        }
        profile.couplings.push_back(gj);
    }
    return profile;
}

inline CouplingProfile coupling_profile(const SystemSpec& spec) {
    return coupling_profile(spec.detector_kind, spec.levels, spec.g);
}

} // namespace dce
