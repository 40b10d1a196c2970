// Acceptance suite. Each criterion prints one PASS/FAIL line; the process
// exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dce/analytic.hpp"
#include "dce/dynamics.hpp"
#include "dce/expm_oracle.hpp"
#include "dce/runner.hpp"
#include "dce/spectral.hpp"

using namespace dce;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

StepStats g_all_runs; ///< aggregated over every simulate run in the suite

void merge(const StepStats& s) {
    g_all_runs.accepted += s.accepted;
    g_all_runs.rejected += s.rejected;
    g_all_runs.max_norm_error = std::max(g_all_runs.max_norm_error, s.max_norm_error);
    g_all_runs.max_parity_even = std::max(g_all_runs.max_parity_even, s.max_parity_even);
    g_all_runs.max_tail = std::max(g_all_runs.max_tail, s.max_tail);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

SystemSpec make_spec(DetectorKind kind, int levels, double g, double eps, int cutoff,
                     double t_final) {
    SystemSpec s;
    s.detector_kind = kind;
    s.levels = levels;
    s.g = g;
    s.epsilon = eps;
    s.fock_cutoff = cutoff;
    s.t_final = t_final;
    return s;
}

Trajectory run(const SystemSpec& spec, int samples) {
    GeneratorSpec gen = GeneratorSpec::from_spec(spec);
    auto grid = uniform_grid(spec.t_final, samples);
    Trajectory traj =
        integrate_adaptive(StateVector::vacuum(spec), gen, spec.t_final, spec.tol, grid);
    merge(traj.step_stats);
    return traj;
}

double rel_err(double value, double reference) {
    return std::abs(value - reference) / std::abs(reference);
}

// 1. simulate g = 0 to eps t = 3: <n>, Q and both variances against the
//    squeezed-vacuum closed forms, relative error < 1e-6 at all samples.
Outcome criterion1() {
    SystemSpec spec = make_spec(DetectorKind::Ladder, 1, 0.0, 1e-3, 244, 3000.0);
    spec.tol.tail_threshold = 1e-8;
    Trajectory traj = run(spec, 600);
    Outcome out;
    double worst = 0.0;
    for (const auto& s : traj.samples) {
        auto ref = empty_cavity(s.time, spec.epsilon);
        if (s.time > 0.0) {
            worst = std::max(worst, rel_err(s.record.n_mean, ref.n_mean));
            worst = std::max(worst, rel_err(*s.record.mandel_q, 1.0 + 2.0 * ref.n_mean));
        }
        worst = std::max(worst, rel_err(s.record.x_var, ref.x_var));
        worst = std::max(worst, rel_err(s.record.p_var, ref.p_var));
    }
    out.pass = worst < 1e-6;
    out.detail = "max rel err " + fmt(worst) + " (limit 1e-6)";
    return out;
}

// 2. two-level blockade: N = 2 keeps <n> < 0.05 throughout eps t <= 3.
Outcome criterion2() {
    SystemSpec spec = make_spec(DetectorKind::Ladder, 2, 1e-2, 1e-3, 24, 3000.0);
    Trajectory traj = run(spec, 600);
    double n_max = 0.0;
    for (const auto& s : traj.samples) n_max = std::max(n_max, s.record.n_mean);
    Outcome out;
    out.pass = n_max < 0.05;
    out.detail = "max <n> " + fmt(n_max) + " (limit 0.05)";
    return out;
}

// 3. even-N photon cap: N = 4 keeps P(K >= 3) < 1e-2; N = 12 with Dicke
//    couplings keeps P(K >= 11) < 1e-2, at all samples to eps t = 3.
Outcome criterion3() {
    auto excess = [](const Trajectory& traj, int cap) {
        double worst = 0.0;
        for (const auto& s : traj.samples) {
            double p = 0.0;
            for (std::size_t k = static_cast<std::size_t>(cap) + 1;
                 k < s.record.photon_probs.size(); ++k)
                p += s.record.photon_probs[k];
            worst = std::max(worst, p);
        }
        return worst;
    };
    SystemSpec four = make_spec(DetectorKind::Ladder, 4, 1e-2, 1e-3, 32, 3000.0);
    double w4 = excess(run(four, 600), 2);
    SystemSpec twelve = make_spec(DetectorKind::TwoLevelEnsemble, 12, 1e-2, 1e-3, 64, 3000.0);
    double w12 = excess(run(twelve, 600), 10);
    Outcome out;
    out.pass = w4 < 1e-2 && w12 < 1e-2;
    out.detail = "P(K>2|N=4) " + fmt(w4) + ", P(K>10|N=12) " + fmt(w12) + " (limit 1e-2)";
    return out;
}

// 4. odd-N growth: N = 3 and N = 5 reach at least 0.5 sinh^2(eps t / 4)
//    at eps t = 4 and 6. The photon distribution is broad here (<n> ~ 30 by
//    eps t = 6, strongly super-Poissonian), so the envelope-rule cutoff
//    gets one doubling from the tail monitor before the run goes through.
Outcome criterion4() {
    Outcome out;
    std::ostringstream detail;
    for (int levels : {3, 5}) {
        RunConfig cfg;
        cfg.spec = make_spec(DetectorKind::Ladder, levels, 1e-2, 1e-3, 16, 6000.0);
        cfg.cutoff_is_auto = true;
        cfg.sample_count = 600;
        RunResult res;
        Trajectory traj = dce::detail::simulate_with_retry(cfg, res);
        merge(res.stats);
        for (double eps_t : {4.0, 6.0}) {
            double t = eps_t / cfg.spec.epsilon;
            double bound = 0.5 * std::pow(std::sinh(eps_t / 4.0), 2);
            double n = -1.0;
            for (const auto& s : traj.samples)
                if (std::abs(s.time - t) < 1e-9) n = s.record.n_mean;
            if (n < bound) out.pass = false;
            detail << "N=" << levels << " <n>(" << eps_t << ")=" << fmt(n) << " vs bound "
                   << fmt(bound) << "; ";
        }
        detail << "K=" << res.effective_spec.fock_cutoff << "; ";
    }
    out.detail = detail.str();
    return out;
}

// 5. truncated-ladder oscillator (N = 40) vs the exact oscillator solution
//    over the figure span eps t in [0, 3]: relative error < 1e-4 on <n>,
//    <n_b>, both variances and purity, comparing samples where
//    <n> + <n_b> < 4 (the gate never binds on this span, which peaks near
//    1.4). The N = 40 truncation holds 1e-4 only while the joint excitation
//    stays small; by <n> + <n_b> = 4 its squeezed-variance error reaches
//    ~9e-2, converging away as N grows (~1e-3 at N = 60, ~1e-5 at N = 80).
Outcome criterion5() {
    const double g = 1e-2, eps = 1e-3;
    HOParams params(eps / 4.0, g);
    SystemSpec spec = make_spec(DetectorKind::HarmonicOscillatorTruncated, 40, g, eps, 16, 3000.0);
    spec.fock_cutoff = auto_cutoff(spec);
    Trajectory traj = run(spec, 120);

    double worst = 0.0;
    double max_sum = 0.0;
    for (const auto& s : traj.samples) {
        if (s.time <= 0.0) continue;
        auto ref = ho_observables(params, s.time);
        max_sum = std::max(max_sum, ref.n_field + ref.n_detector);
        if (ref.n_field + ref.n_detector >= 4.0) continue;
        double nb_num = 0.0;
        for (std::size_t j = 0; j < s.record.level_probs.size(); ++j)
            nb_num += static_cast<double>(j) * s.record.level_probs[j];
        worst = std::max(worst, rel_err(s.record.n_mean, ref.n_field));
        worst = std::max(worst, rel_err(nb_num, ref.n_detector));
        worst = std::max(worst, rel_err(s.record.x_var, ref.x_var));
        worst = std::max(worst, rel_err(s.record.p_var, ref.p_var));
        worst = std::max(worst, rel_err(s.record.purity, ref.purity));
    }
    Outcome out;
    out.pass = worst < 1e-4;
    out.detail = "K=" + std::to_string(spec.fock_cutoff) + ", max rel err " + fmt(worst) +
                 " (limit 1e-4), window peak <n>+<n_b> " + fmt(max_sum);
    return out;
}

// 6. adaptive integration vs the dense eigendecomposition propagator on 20
//    random small configurations: max amplitude deviation < 1e-7.
Outcome criterion6() {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> gd(std::log(1e-3), std::log(1e-1));
    std::uniform_real_distribution<double> ed(std::log(1e-4), std::log(1e-2));
    std::uniform_int_distribution<int> cut(8, 20);
    std::uniform_real_distribution<double> td(100.0, 400.0);
    const DetectorKind kinds[] = {DetectorKind::Ladder, DetectorKind::TwoLevelEnsemble,
                                  DetectorKind::HarmonicOscillatorTruncated};
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        DetectorKind kind = kinds[trial % 3];
        int levels = (kind == DetectorKind::HarmonicOscillatorTruncated) ? 4 + trial % 2
                                                                         : 2 + trial % 4;
        SystemSpec spec =
            make_spec(kind, levels, std::exp(gd(rng)), std::exp(ed(rng)), cut(rng), td(rng));
        spec.tol.rel_tol = 1e-12;
        spec.tol.abs_tol = 1e-14;
        spec.tol.tail_threshold = 1.0; // the oracle shares the truncated generator
        GeneratorSpec gen = GeneratorSpec::from_spec(spec);
        StateVector s0 = StateVector::vacuum(spec);
        auto grid = uniform_grid(spec.t_final, 5);
        std::vector<StateVector> snaps;
        Trajectory traj = integrate_adaptive(s0, gen, spec.t_final, spec.tol, grid,
                                             [&](const StateVector& s) { snaps.push_back(s); });
        merge(traj.step_stats);
        for (const auto& snap : snaps) {
            StateVector exact = expm_oracle(gen, s0, snap.time);
            auto pa = snap.amplitudes();
            auto pb = exact.amplitudes();
            for (std::size_t i = 0; i < pa.size(); ++i)
                worst = std::max(worst, std::abs(pa[i] - pb[i]));
        }
    }
    Outcome out;
    out.pass = worst < 1e-7;
    out.detail = "max amplitude deviation " + fmt(worst) + " (limit 1e-7)";
    return out;
}

// 7. every accepted run in this suite: norm error within 1e-10 and the
//    parity-forbidden sector below 1e-14.
Outcome criterion7() {
    Outcome out;
    out.pass = g_all_runs.max_norm_error <= 1e-10 && g_all_runs.max_parity_even < 1e-14;
    out.detail = "max norm error " + fmt(g_all_runs.max_norm_error) + " (limit 1e-10), parity " +
                 fmt(g_all_runs.max_parity_even) + " (limit 1e-14), accepted steps " +
                 std::to_string(g_all_runs.accepted);
    return out;
}

// 8. spectral theorem: null eigenvalue iff odd block dimension for all
//    N <= 15, E <= 20 and both coupling profiles; the N = 2, E = 2 block has
//    eigenvalues +-sqrt(2) g1 to 1e-12; null support on odd positions only.
Outcome criterion8() {
    Outcome out;
    double worst_null = 0.0, worst_rank = 1e300, worst_support = 0.0;
    for (auto kind : {DetectorKind::Ladder, DetectorKind::TwoLevelEnsemble}) {
        for (int levels = 2; levels <= 15; ++levels) {
            auto profile = coupling_profile(kind, levels, 1e-2);
            for (int e = 1; e <= 20; ++e) {
                auto block = build_block(profile, levels, e);
                if (block.dim < 2) continue;
                auto eig = eigen_tridiag(block);
                double min_abs = 1e300;
                int zi = 0;
                for (int i = 0; i < block.dim; ++i)
                    if (std::abs(eig.eigenvalues[static_cast<std::size_t>(i)]) < min_abs) {
                        min_abs = std::abs(eig.eigenvalues[static_cast<std::size_t>(i)]);
                        zi = i;
                    }
                bool odd = block.dim % 2 == 1;
                if (null_space_analysis(block).has_null != odd) out.pass = false;
                if (odd) {
                    worst_null = std::max(worst_null, min_abs / block.matrix_norm());
                    for (int r = 1; r < block.dim; r += 2)
                        worst_support = std::max(worst_support, std::abs(eig.vec(r, zi)));
                } else {
                    double min_off = 1e300;
                    for (double v : block.offdiag) min_off = std::min(min_off, v);
                    worst_rank = std::min(worst_rank, min_abs / min_off);
                }
            }
        }
    }
    auto two = eigen_tridiag(build_block(coupling_profile(DetectorKind::Ladder, 2, 1e-2), 2, 2));
    double worst_pair = std::max(std::abs(two.eigenvalues[0] + std::sqrt(2.0) * 1e-2),
                                 std::abs(two.eigenvalues[1] - std::sqrt(2.0) * 1e-2));
    if (worst_null >= 1e-12 || worst_rank <= 0.1 || worst_support >= 1e-10 || worst_pair >= 1e-12)
        out.pass = false;
    out.detail = "null |l|/||M|| " + fmt(worst_null) + ", even-dim min|l|/min(g) " +
                 fmt(worst_rank) + ", support leak " + fmt(worst_support) + ", N=2 pair err " +
                 fmt(worst_pair);
    return out;
}

// 9. Bogoliubov coefficients preserve the commutator on a 10x10x10
//    (g, beta, t) grid to 1e-12.
Outcome criterion9() {
    double worst = 0.0;
    for (int ig = 0; ig < 10; ++ig) {
        double g = 1e-4 * std::pow(1e3, ig / 9.0); // 1e-4 .. 1e-1
        for (int ib = 0; ib < 10; ++ib) {
            double beta = 2.5e-5 * std::pow(80.0, ib / 9.0); // 2.5e-5 .. 2e-3
            for (int it = 0; it < 10; ++it) {
                double t = 1000.0 * it / 9.0;
                auto c = ho_bogoliubov_coeffs(HOParams(beta, g), t);
                worst =
                    std::max(worst, std::abs(BogoliubovCoefficients::symplectic_defect(c.field)));
                worst = std::max(worst,
                                 std::abs(BogoliubovCoefficients::symplectic_defect(c.detector)));
            }
        }
    }
    Outcome out;
    out.pass = worst < 1e-12;
    out.detail = "max symplectic defect " + fmt(worst) + " (limit 1e-12)";
    return out;
}

// 10. shelf flatness: central-difference d<n>/dt at the shelf centers
//     2 gamma t_n = (2n+1) pi, n = 1..5, g = 10 beta, must stay below 1e-3
//     of the local exponential slope 2 beta <n>. The exact derivative there
//     is 2 beta^3 sinh(2 beta t_n) / gamma^2, which at g = 10 beta sits at a
//     few percent of the slope, so this bound records how flat the shelves
//     actually are rather than a property that holds at these parameters.
Outcome criterion10() {
    HOParams p(2.5e-4, 2.5e-3);
    double worst = 0.0;
    for (int n = 1; n <= 5; ++n) {
        double tn = shelf_time(p, n);
        double delta = 0.001 / p.gamma_abs(); // discretization bias ~3e-5 relative
        double slope =
            (ho_observables(p, tn + delta).n_field - ho_observables(p, tn - delta).n_field) /
            (2.0 * delta);
        double ratio = std::abs(slope) / (2.0 * p.beta * ho_observables(p, tn).n_field);
        worst = std::max(worst, ratio);
    }
    Outcome out;
    out.pass = worst < 1e-3;
    out.detail = "max |dn/dt| / (2 beta n) " + fmt(worst) + " (limit 1e-3)";
    return out;
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {1, "empty-cavity exactness", criterion1},
        {2, "two-level blockade", criterion2},
        {3, "even-N photon cap", criterion3},
        {4, "odd-N growth", criterion4},
        {5, "oscillator-detector agreement", criterion5},
        {6, "propagator oracle equivalence", criterion6},
        {7, "norm and parity conservation", criterion7},
        {8, "excitation-block spectral theorem", criterion8},
        {9, "Bogoliubov symplecticity", criterion9},
        {10, "shelf flatness", criterion10},
    };
    int failures = 0;
    for (const auto& entry : entries) {
        auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = entry.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d [%s]: %s — %s (%.1fs)\n", entry.id, entry.name,
                    out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures;
}
