#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dce/errors.hpp"
#include "dce/state.hpp"
#include "dce/system.hpp"

namespace dce {

/// Interaction-picture generator: squeezing rate beta = epsilon/4 plus the
/// ladder couplings. The photon space is truncated by projection, so the
/// generator stays exactly anti-Hermitian (norm-preserving) at the wall.
struct GeneratorSpec {
    double beta = 0.0;
    CouplingProfile profile;
    int levels = 1;
    int fock_cutoff = 2;

    static GeneratorSpec from_spec(const SystemSpec& spec) {
        spec.validate();
        return {spec.beta(), coupling_profile(spec), spec.levels, spec.fock_cutoff};
    }

    void validate() const {
        if (levels < 1 || fock_cutoff < 2)
            throw std::invalid_argument("generator dimensions invalid");
        profile.validate(levels);
    }

    std::size_t dim() const {
        return static_cast<std::size_t>(levels) * static_cast<std::size_t>(fock_cutoff + 1);
    }
};

namespace detail {

/// Precomputed coefficient tables for the amplitude equations
///   dp_{j,m} = beta (sqrt(m(m-1)) p_{j,m-2} - sqrt((m+1)(m+2)) p_{j,m+2})
///              - i (g_j sqrt(m) p_{j+1,m-1} + g_{j-1} sqrt(m+1) p_{j-1,m+1})
/// with g_0 = g_N = 0 and out-of-range photon indices contributing zero.
class RhsKernel {
public:
    explicit RhsKernel(const GeneratorSpec& gen)
        : levels_(gen.levels), cutoff_(gen.fock_cutoff), couplings_(gen.profile.couplings) {
        const int K = cutoff_;
        sq_.resize(static_cast<std::size_t>(K) + 2);
        for (int k = 0; k <= K + 1; ++k) sq_[static_cast<std::size_t>(k)] = std::sqrt(double(k));
        pair_down_.assign(static_cast<std::size_t>(K) + 1, 0.0);
        pair_up_.assign(static_cast<std::size_t>(K) + 1, 0.0);
        for (int m = 2; m <= K; ++m)
            pair_down_[static_cast<std::size_t>(m)] = gen.beta * std::sqrt(double(m) * (m - 1));
        for (int m = 0; m + 2 <= K; ++m)
            pair_up_[static_cast<std::size_t>(m)] = gen.beta * std::sqrt(double(m + 1) * (m + 2));
    }

    void apply(std::span<const Complex> p, std::span<Complex> dp) const {
        const int K = cutoff_;
        const int stride = K + 1;
        for (int j = 1; j <= levels_; ++j) {
            const std::size_t row = static_cast<std::size_t>(j - 1) * stride;
            const double gj = (j <= levels_ - 1) ? couplings_[static_cast<std::size_t>(j - 1)] : 0.0;
            const double gjm = (j >= 2) ? couplings_[static_cast<std::size_t>(j - 2)] : 0.0;
            const Complex* up = (j <= levels_ - 1) ? p.data() + row + stride : nullptr;
            const Complex* dn = (j >= 2) ? p.data() + row - stride : nullptr;
            const Complex* pr = p.data() + row;
            Complex* out = dp.data() + row;
            for (int m = 0; m <= K; ++m) {
                Complex acc = 0.0;
                if (m >= 2) acc += pair_down_[static_cast<std::size_t>(m)] * pr[m - 2];
                if (m + 2 <= K) acc -= pair_up_[static_cast<std::size_t>(m)] * pr[m + 2];
                Complex hop = 0.0;
                if (up && m >= 1) hop += gj * sq_[static_cast<std::size_t>(m)] * up[m - 1];
                if (dn && m + 1 <= K) hop += gjm * sq_[static_cast<std::size_t>(m + 1)] * dn[m + 1];
                // acc += -i * hop
                out[m] = acc + Complex(hop.imag(), -hop.real());
            }
        }
    }

private:
    int levels_;
    int cutoff_;
    std::vector<double> couplings_;
    std::vector<double> sq_;
    std::vector<double> pair_down_;
    std::vector<double> pair_up_;
};

} // namespace detail

/// Right-hand side of the amplitude ODE system for one state.
inline StateVector rhs_apply(const StateVector& state, const GeneratorSpec& gen) {
    gen.validate();
    if (state.levels() != gen.levels || state.fock_cutoff() != gen.fock_cutoff)
        throw std::invalid_argument("state dimensions do not match generator");
    StateVector deriv(gen.levels, gen.fock_cutoff);
    detail::RhsKernel kernel(gen);
    kernel.apply(state.amplitudes(), deriv.amplitudes());
    deriv.time = state.time;
    return deriv;
}

struct StepStats {
    long accepted = 0;
    long rejected = 0;
    double max_norm_error = 0.0;   ///< max ||psi||^2 - 1| over accepted steps
    double max_parity_even = 0.0;  ///< max |p| on the (j+k even) sector
    double max_tail = 0.0;         ///< max occupation of the top 4 Fock modes
};

struct TrajectorySample {
    double time = 0.0;
    ObservableRecord record;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    StepStats step_stats;
};

/// Initial step from the fastest Rabi and squeezing scales.
inline double initial_step(const GeneratorSpec& gen) {
    double gmax = 0.0;
    for (double v : gen.profile.couplings) gmax = std::max(gmax, v);
    double rate = std::max(gmax * std::sqrt(double(gen.fock_cutoff)),
                           std::abs(gen.beta) * gen.fock_cutoff);
    if (rate <= 0.0) return 0.1;
    return std::min(0.1, 0.05 / rate);
}

/// Uniform output grid 0..t_final with `count` intervals.
inline std::vector<double> uniform_grid(double t_final, int count) {
    if (t_final <= 0.0 || count < 1) return {0.0};
    std::vector<double> t(static_cast<std::size_t>(count) + 1);
    for (int i = 0; i <= count; ++i) t[static_cast<std::size_t>(i)] = t_final * i / count;
    return t;
}

/// Adaptive propagation of the amplitude equations with the Dormand-Prince
/// 5(4) embedded pair and PI step-size control. Error is controlled in the
/// max-norm of the amplitude error; the integrator lands exactly on every
/// requested sample time (no interpolation). Per accepted step the norm
/// drift and wall-tail occupation are checked; crossing the hard limits
/// raises NormDriftExceeded / TruncationOverflow.
class Dopri5 {
public:
    Dopri5(const GeneratorSpec& gen, Tolerances tol)
        : gen_(gen), tol_(tol), kernel_(gen) {
        gen.validate();
        tol.validate();
    }

    /// Advances `state` in place to time `t_target` (>= state.time).
    void advance(StateVector& state, double t_target, StepStats& stats) {
        const std::size_t n = gen_.dim();
        if (state.amplitudes().size() != n)
            throw std::invalid_argument("state dimensions do not match generator");
        double t = state.time;
        if (t_target < t) throw std::invalid_argument("cannot integrate backwards");
        if (t_target == t) return;

        ensure_buffers(n);
        std::span<Complex> y = state.amplitudes();
        if (!fsal_valid_) {
            kernel_.apply(y, k_[0]);
            fsal_valid_ = true;
        }

        while (t < t_target) {
            double h = std::min(h_suggest_, t_target - t);
            if (!(h > 0.0) || t + h == t)
                throw NonFiniteAmplitude("step size underflow at t = " + std::to_string(t));

            // stages 2..7 (k7 doubles as the FSAL first stage of the next step)
            stage(y, h, 1, {kA21});
            stage(y, h, 2, {kA31, kA32});
            stage(y, h, 3, {kA41, kA42, kA43});
            stage(y, h, 4, {kA51, kA52, kA53, kA54});
            stage(y, h, 5, {kA61, kA62, kA63, kA64, kA65});
            for (std::size_t i = 0; i < n; ++i)
                ynew_[i] = y[i] + h * (kB1 * k_[0][i] + kB3 * k_[2][i] + kB4 * k_[3][i] +
                                       kB5 * k_[4][i] + kB6 * k_[5][i]);
            kernel_.apply(ynew_, k_[6]);

            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                Complex e = h * (kE1 * k_[0][i] + kE3 * k_[2][i] + kE4 * k_[3][i] +
                                 kE5 * k_[4][i] + kE6 * k_[5][i] + kE7 * k_[6][i]);
                double sc = tol_.abs_tol +
                            tol_.rel_tol * std::max(std::abs(y[i]), std::abs(ynew_[i]));
                double scaled = std::abs(e) / sc;
                if (!std::isfinite(scaled)) { // NaN compares false, never wins a max
                    err = scaled;
                    break;
                }
                err = std::max(err, scaled);
            }

            if (!std::isfinite(err)) {
                for (std::size_t i = 0; i < n; ++i)
                    if (!std::isfinite(ynew_[i].real()) || !std::isfinite(ynew_[i].imag()))
                        throw NonFiniteAmplitude("non-finite amplitude at t = " +
                                                 std::to_string(t));
                err = 1e10;
            }

            if (err <= 1.0) {
                t += h;
                std::copy(ynew_.begin(), ynew_.end(), y.begin());
                std::swap(k_[0], k_[6]); // FSAL
                state.time = t;
                ++stats.accepted;
                post_step_checks(state, stats);
                double fac = kSafety * std::pow(std::max(err, 1e-10), -kAlpha) *
                             std::pow(err_prev_, kBeta);
                fac = std::clamp(fac, kFacMin, rejected_last_ ? 1.0 : kFacMax);
                h_suggest_ = h * fac;
                err_prev_ = std::max(err, 1e-10);
                rejected_last_ = false;
            } else {
                ++stats.rejected;
                rejected_last_ = true;
                h_suggest_ = h * std::clamp(kSafety * std::pow(err, -0.2), 0.1, 1.0);
            }
        }
    }

    void reset() { fsal_valid_ = false; h_suggest_ = 0.0; }

private:
    void ensure_buffers(std::size_t n) {
        if (ynew_.size() == n && h_suggest_ > 0.0) return;
        for (auto& k : k_) k.assign(n, Complex{});
        ynew_.assign(n, Complex{});
        ytmp_.assign(n, Complex{});
        h_suggest_ = initial_step(gen_);
        err_prev_ = 1.0;
        rejected_last_ = false;
        fsal_valid_ = false;
    }

    void stage(std::span<const Complex> y, double h, int stage_idx,
               std::initializer_list<double> a) {
        const std::size_t n = y.size();
        for (std::size_t i = 0; i < n; ++i) {
            Complex acc = 0.0;
            int j = 0;
            for (double aij : a) acc += aij * k_[static_cast<std::size_t>(j++)][i];
            ytmp_[i] = y[i] + h * acc;
        }
        kernel_.apply(ytmp_, k_[static_cast<std::size_t>(stage_idx)]);
    }

    void post_step_checks(const StateVector& state, StepStats& stats) {
        double drift = state.norm_error();
        stats.max_norm_error = std::max(stats.max_norm_error, drift);
        if (!(drift <= kNormHardLimit))
            throw NormDriftExceeded("norm drift " + format_sci(drift) + " at t = " +
                                    std::to_string(state.time));
        double tail = state.tail_occupation();
        stats.max_tail = std::max(stats.max_tail, tail);
        if (!(tail <= tol_.tail_threshold))
            throw TruncationOverflow("tail occupation " + format_sci(tail) + " at t = " +
                                     std::to_string(state.time) + "; raise fock_cutoff");
        stats.max_parity_even = std::max(stats.max_parity_even, state.parity_even_max());
    }

    static std::string format_sci(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", v);
        return buf;
    }

    // Dormand-Prince 5(4) tableau; kE = b(5th) - b(4th)
    static constexpr double kA21 = 1.0 / 5;
    static constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
    static constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
    static constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                            kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
    static constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                            kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
    static constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                            kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
    static constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                            kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;
    static constexpr double kSafety = 0.9, kAlpha = 0.7 / 5, kBeta = 0.4 / 5;
    static constexpr double kFacMin = 0.2, kFacMax = 5.0;

    GeneratorSpec gen_;
    Tolerances tol_;
    detail::RhsKernel kernel_;
    std::array<std::vector<Complex>, 7> k_{};
    std::vector<Complex> ynew_, ytmp_;
    double h_suggest_ = 0.0;
    double err_prev_ = 1.0;
    bool rejected_last_ = false;
    bool fsal_valid_ = false;
};

using StateSink = std::function<void(const StateVector&)>;

/// Integrates from `state0` and records observables at the given sample
/// times (ascending, first entry 0, last entry t_final). The optional sink
/// receives the state at every sample time.
inline Trajectory integrate_adaptive(const StateVector& state0, const GeneratorSpec& gen,
                                     double t_final, const Tolerances& tol,
                                     std::span<const double> sample_times,
                                     const StateSink& sink = {}) {
    if (sample_times.empty() || sample_times.front() != 0.0)
        throw std::invalid_argument("sample times must start at 0");
    for (std::size_t i = 1; i < sample_times.size(); ++i)
        if (!(sample_times[i] > sample_times[i - 1]))
            throw std::invalid_argument("sample times must be strictly increasing");
    if (sample_times.back() > t_final)
        throw std::invalid_argument("sample times must not exceed t_final");
    if (!(t_final >= 0.0)) throw std::invalid_argument("t_final must be >= 0");

    Trajectory traj;
    StateVector state = state0;
    state.time = 0.0;
    Dopri5 stepper(gen, tol);
    for (double ts : sample_times) {
        stepper.advance(state, ts, traj.step_stats);
        traj.samples.push_back({ts, observe(state)});
        if (sink) sink(state);
    }
    if (t_final > sample_times.back()) stepper.advance(state, t_final, traj.step_stats);
    return traj;
}

/// Convenience single-target propagation; returns the final state.
inline StateVector integrate_to(const StateVector& state0, const GeneratorSpec& gen, double t,
                                const Tolerances& tol, StepStats* stats = nullptr) {
    StateVector state = state0;
    StepStats local;
    Dopri5 stepper(gen, tol);
    stepper.advance(state, t, stats ? *stats : local);
    return state;
}

/// Fock cutoff from the empty-cavity envelope, which bounds the
/// detector-loaded growth from above; verified post hoc by the tail
/// monitor, with the doubling retry handled by callers.
inline int auto_cutoff(const SystemSpec& spec) {
    double sh = std::sinh(spec.epsilon * spec.t_final / 2.0);
    double envelope = 8.0 * sh * sh;
    if (envelope == 0.0) return 16;
    return std::max(16, static_cast<int>(std::ceil(envelope + 24.0)));
}

} // namespace dce
