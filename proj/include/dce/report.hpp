#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "dce/analytic.hpp"
#include "dce/dynamics.hpp"
#include "dce/spectral.hpp"

namespace dce {

namespace csv {

/// 17 significant digits: enough to round-trip any double bit-exactly.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string opt(const std::optional<double>& v) {
    return v ? num(*v) : std::string{}; // undefined serializes as an empty field
}

} // namespace csv

/// Simulation CSV: fixed column order t, eps_t, n_mean, mandel_q, x_var,
/// p_var, purity, norm_error, then P_level_1..N, then P_photon_0..K_report.
inline void write_csv_header(std::ostream& out, int levels, int k_report) {
    out << "t,eps_t,n_mean,mandel_q,x_var,p_var,purity,norm_error";
    for (int j = 1; j <= levels; ++j) out << ",P_level_" << j;
    for (int k = 0; k <= k_report; ++k) out << ",P_photon_" << k;
    out << "\n";
}

inline void write_csv_row(std::ostream& out, const ObservableRecord& r, double epsilon,
                          int k_report) {
    out << csv::num(r.time) << ',' << csv::num(epsilon * r.time) << ',' << csv::num(r.n_mean)
        << ',' << csv::opt(r.mandel_q) << ',' << csv::num(r.x_var) << ',' << csv::num(r.p_var)
        << ',' << csv::num(r.purity) << ',' << csv::num(r.norm_error);
    for (double p : r.level_probs) out << ',' << csv::num(p);
    for (int k = 0; k <= k_report; ++k) out << ',' << csv::num(r.photon_probs[static_cast<std::size_t>(k)]);
    out << "\n";
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj, double epsilon,
                                 int levels, int k_report) {
    write_csv_header(out, levels, k_report);
    for (const auto& s : traj.samples) write_csv_row(out, s.record, epsilon, k_report);
}

/// Closed-form CSV for the empty cavity.
inline void write_empty_cavity_csv(std::ostream& out, double epsilon,
                                   std::span<const double> times) {
    out << "t,eps_t,n_mean,mandel_q,x_var,p_var,purity\n";
    for (double t : times) {
        auto r = empty_cavity(t, epsilon);
        out << csv::num(t) << ',' << csv::num(epsilon * t) << ',' << csv::num(r.n_mean) << ','
            << csv::num(r.mandel_q) << ',' << csv::num(r.x_var) << ',' << csv::num(r.p_var)
            << ",1\n";
    }
}

/// Closed-form CSV for the oscillator detector.
inline void write_ho_csv(std::ostream& out, const HOParams& params, double epsilon,
                         std::span<const double> times) {
    out << "t,eps_t,n_mean,n_detector,mandel_q,x_var,p_var,uncertainty,purity\n";
    for (double t : times) {
        auto r = ho_observables(params, t);
        out << csv::num(t) << ',' << csv::num(epsilon * t) << ',' << csv::num(r.n_field) << ','
            << csv::num(r.n_detector) << ',' << csv::opt(r.mandel_q) << ',' << csv::num(r.x_var)
            << ',' << csv::num(r.p_var) << ',' << csv::num(r.uncertainty_product) << ','
            << csv::num(r.purity) << "\n";
    }
}

/// Spectral block table: E, dim, has_null, min |lambda|, plus the photon-cap
/// prediction for the configured detector.
inline void write_spectral_report(std::ostream& out, const CouplingProfile& profile, int levels,
                                  int max_excitation) {
    auto pred = predict_max_photons(levels);
    out << "# levels N = " << levels << "\n";
    if (pred.max_photons)
        out << "# predicted photon cap: " << *pred.max_photons << " (N-2 rule)\n";
    else
        out << "# predicted photon cap: unbounded (odd N)\n";
    out << "# resonant chain:";
    for (int e : pred.resonant_chain) out << ' ' << e;
    out << "\n";
    out << "E,dim,has_null,min_abs_eigenvalue\n";
    for (int e = 0; e <= max_excitation; ++e) {
        auto block = build_block(profile, levels, e);
        if (block.dim < 1) continue;
        double min_abs = 0.0;
        bool has_null = (block.dim % 2 == 1);
        if (block.dim > 1) {
            auto eig = eigen_tridiag(block);
            min_abs = 1e300;
            for (double v : eig.eigenvalues) min_abs = std::min(min_abs, std::abs(v));
        }
        out << e << ',' << block.dim << ',' << (has_null ? 1 : 0) << ',' << csv::num(min_abs)
            << "\n";
    }
}

/// Side-by-side numerical vs analytic columns with a deviation summary.
struct CompareSummary {
    double max_rel_n = 0.0;
    double max_rel_x_var = 0.0;
    double max_rel_p_var = 0.0;
    double max_abs_purity = 0.0;
};

inline void write_compare_csv(std::ostream& out, const Trajectory& traj, const HOParams& params,
                              double epsilon, bool against_ho, CompareSummary& summary) {
    out << "t,eps_t,n_num,n_ana,x_var_num,x_var_ana,p_var_num,p_var_ana,purity_num,purity_ana\n";
    summary = {};
    for (const auto& s : traj.samples) {
        double t = s.time;
        double n_ana, x_ana, p_ana, mu_ana;
        if (against_ho) {
            auto r = ho_observables(params, t);
            n_ana = r.n_field;
            x_ana = r.x_var;
            p_ana = r.p_var;
            mu_ana = r.purity;
        } else {
            auto r = empty_cavity(t, epsilon);
            n_ana = r.n_mean;
            x_ana = r.x_var;
            p_ana = r.p_var;
            mu_ana = 1.0;
        }
        const auto& r = s.record;
        out << csv::num(t) << ',' << csv::num(epsilon * t) << ',' << csv::num(r.n_mean) << ','
            << csv::num(n_ana) << ',' << csv::num(r.x_var) << ',' << csv::num(x_ana) << ','
            << csv::num(r.p_var) << ',' << csv::num(p_ana) << ',' << csv::num(r.purity) << ','
            << csv::num(mu_ana) << "\n";
        if (n_ana > 1e-9)
            summary.max_rel_n = std::max(summary.max_rel_n, std::abs(r.n_mean - n_ana) / n_ana);
        summary.max_rel_x_var =
            std::max(summary.max_rel_x_var, std::abs(r.x_var - x_ana) / x_ana);
        summary.max_rel_p_var =
            std::max(summary.max_rel_p_var, std::abs(r.p_var - p_ana) / p_ana);
        summary.max_abs_purity = std::max(summary.max_abs_purity, std::abs(r.purity - mu_ana));
    }
    out << "# max_rel_n=" << csv::num(summary.max_rel_n)
        << " max_rel_x_var=" << csv::num(summary.max_rel_x_var)
        << " max_rel_p_var=" << csv::num(summary.max_rel_p_var)
        << " max_abs_purity=" << csv::num(summary.max_abs_purity) << "\n";
}

} // namespace dce
