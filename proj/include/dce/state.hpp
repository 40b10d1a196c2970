#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dce/errors.hpp"
#include "dce/system.hpp"

namespace dce {

using Complex = std::complex<double>;

/// Mandel Q is reported as undefined below this mean photon number.
inline constexpr double kMandelFloor = 1e-12;
/// Norm drift beyond this is a hard error, never silently renormalized.
inline constexpr double kNormHardLimit = 1e-8;

/// Joint detector-field state: dense table of probability amplitudes
/// p_{j,k} with detector level j = 1..N (1-based, matching |1>..|N>) and
/// photon number k = 0..K_max. The parity-forbidden half of the table is
/// stored and stays identically zero for evolutions out of |1,0>.
class StateVector {
public:
    StateVector(int levels, int fock_cutoff)
        : levels_(levels), fock_cutoff_(fock_cutoff),
          amp_(static_cast<std::size_t>(levels) * static_cast<std::size_t>(fock_cutoff + 1)) {
        if (levels < 1 || fock_cutoff < 0)
            throw std::invalid_argument("StateVector dimensions invalid");
    }

    /// |1,0>: the paper's initial condition p_{1,0}(0) = 1.
    static StateVector vacuum(const SystemSpec& spec) {
        spec.validate();
        StateVector s(spec.levels, spec.fock_cutoff);
        s.amp_[0] = 1.0;
        return s;
    }

    int levels() const { return levels_; }
    int fock_cutoff() const { return fock_cutoff_; }
    std::size_t dim() const { return amp_.size(); }

    double time = 0.0;

    Complex& at(int j, int k) { return amp_[index(j, k)]; }
    const Complex& at(int j, int k) const { return amp_[index(j, k)]; }

    std::span<Complex> amplitudes() { return amp_; }
    std::span<const Complex> amplitudes() const { return amp_; }

    double norm_squared() const {
        double s = 0.0;
        for (const Complex& a : amp_) s += std::norm(a);
        return s;
    }

    double norm_error() const { return std::abs(norm_squared() - 1.0); }

    void normalize() {
        double n = std::sqrt(norm_squared());
        if (n == 0.0) throw std::invalid_argument("cannot normalize the zero state");
        for (Complex& a : amp_) a /= n;
    }

    /// Largest amplitude magnitude on the (j+k even) sector, which must stay
    /// at exact zero for evolutions started from |1,0>.
    double parity_even_max() const {
        double m = 0.0;
        for (int j = 1; j <= levels_; ++j)
            for (int k = ((j % 2 == 0) ? 0 : 1); k <= fock_cutoff_; k += 2)
                m = std::max(m, std::abs(at(j, k)));
        return m;
    }

    /// Occupation of the top four Fock modes, the truncation health monitor.
    double tail_occupation() const {
        double s = 0.0;
        int k_lo = std::max(0, fock_cutoff_ - 3);
        for (int j = 1; j <= levels_; ++j)
            for (int k = k_lo; k <= fock_cutoff_; ++k) s += std::norm(at(j, k));
        return s;
    }

    std::size_t index(int j, int k) const {
        return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(fock_cutoff_ + 1) +
               static_cast<std::size_t>(k);
    }

private:
    int levels_;
    int fock_cutoff_;
    std::vector<Complex> amp_;
};

inline double mean_photon(const StateVector& s) {
    double n = 0.0;
    for (int j = 1; j <= s.levels(); ++j)
        for (int k = 1; k <= s.fock_cutoff(); ++k) n += k * std::norm(s.at(j, k));
    return n;
}

inline double photon_second_moment(const StateVector& s) {
    double n2 = 0.0;
    for (int j = 1; j <= s.levels(); ++j)
        for (int k = 1; k <= s.fock_cutoff(); ++k)
            n2 += static_cast<double>(k) * static_cast<double>(k) * std::norm(s.at(j, k));
    return n2;
}

/// Q = (<n^2> - <n>^2 - <n>)/<n>; undefined (not NaN) for <n> below the floor.
inline std::optional<double> mandel_q(const StateVector& s) {
    double n = mean_photon(s);
    if (n < kMandelFloor) return std::nullopt;
    return (photon_second_moment(s) - n * n - n) / n;
}

struct QuadratureMoments {
    double x_mean = 0.0, p_mean = 0.0;
    double x_var = 0.0, p_var = 0.0, xp_cov = 0.0;
};

/// Moments of x = (a+a^t)/sqrt(2) and p = (a-a^t)/(i sqrt(2)) from the
/// one- and two-step ladder contractions of the amplitude table.
inline QuadratureMoments quadrature_moments(const StateVector& s) {
    Complex a1 = 0.0; // <a>
    Complex a2 = 0.0; // <a^2>
    const int K = s.fock_cutoff();
    for (int j = 1; j <= s.levels(); ++j) {
        for (int k = 0; k < K; ++k)
            a1 += std::conj(s.at(j, k)) * std::sqrt(k + 1.0) * s.at(j, k + 1);
        for (int k = 0; k + 2 <= K; ++k)
            a2 += std::conj(s.at(j, k)) * std::sqrt((k + 1.0) * (k + 2.0)) * s.at(j, k + 2);
    }
    double n = mean_photon(s);
    QuadratureMoments m;
    m.x_mean = std::sqrt(2.0) * a1.real();
    m.p_mean = std::sqrt(2.0) * a1.imag();
    m.x_var = a2.real() + n + 0.5 - m.x_mean * m.x_mean;
    m.p_var = -a2.real() + n + 0.5 - m.p_mean * m.p_mean;
    m.xp_cov = a2.imag() - m.x_mean * m.p_mean;
    return m;
}

/// P_K = sum_j |p_{j,K}|^2
inline std::vector<double> photon_distribution(const StateVector& s) {
    std::vector<double> p(static_cast<std::size_t>(s.fock_cutoff()) + 1, 0.0);
    for (int j = 1; j <= s.levels(); ++j)
        for (int k = 0; k <= s.fock_cutoff(); ++k)
            p[static_cast<std::size_t>(k)] += std::norm(s.at(j, k));
    return p;
}

/// P_j = sum_k |p_{j,k}|^2
inline std::vector<double> detector_distribution(const StateVector& s) {
    std::vector<double> p(static_cast<std::size_t>(s.levels()), 0.0);
    for (int j = 1; j <= s.levels(); ++j)
        for (int k = 0; k <= s.fock_cutoff(); ++k)
            p[static_cast<std::size_t>(j - 1)] += std::norm(s.at(j, k));
    return p;
}

/// Mean detector excitation number, sum_j (j-1) P_j.
inline double mean_detector_excitation(const StateVector& s) {
    double n = 0.0;
    for (int j = 2; j <= s.levels(); ++j)
        for (int k = 0; k <= s.fock_cutoff(); ++k) n += (j - 1) * std::norm(s.at(j, k));
    return n;
}

/// Tr(rho_f^2) of the reduced field state. For a pure joint state the two
/// reduced density matrices share their nonzero spectrum, so the sum runs
/// over the smaller Gram matrix of the two factors.
inline double field_purity(const StateVector& s) {
    const int N = s.levels();
    const int M = s.fock_cutoff() + 1;
    double purity = 0.0;
    if (N <= M) {
        for (int j = 1; j <= N; ++j) {
            for (int jp = 1; jp <= N; ++jp) {
                Complex r = 0.0;
                for (int k = 0; k < M; ++k) r += s.at(j, k) * std::conj(s.at(jp, k));
                purity += std::norm(r);
            }
        }
    } else {
        for (int k = 0; k < M; ++k) {
            for (int kp = 0; kp < M; ++kp) {
                Complex r = 0.0;
                for (int j = 1; j <= N; ++j) r += s.at(j, k) * std::conj(s.at(j, kp));
                purity += std::norm(r);
            }
        }
    }
    return purity;
}

/// One time sample of every reported observable.
struct ObservableRecord {
    double time = 0.0;
    double n_mean = 0.0;
    double n_second_moment = 0.0;
    std::optional<double> mandel_q;
    double x_var = 0.0, p_var = 0.0, xp_cov = 0.0;
    double purity = 1.0;
    std::vector<double> level_probs;
    std::vector<double> photon_probs;
    double norm_error = 0.0;
};

/// Evaluates every observable of a state. Distributions and moments are
/// renormalized when the norm drift is below the hard limit; larger drift
/// throws instead of being silently fixed.
inline ObservableRecord observe(const StateVector& s) {
    ObservableRecord r;
    r.time = s.time;
    double nsq = s.norm_squared();
    r.norm_error = std::abs(nsq - 1.0);
    if (r.norm_error >= kNormHardLimit)
        throw NormDriftExceeded("norm drift " + std::to_string(r.norm_error) +
                                " exceeds hard limit");
    r.n_mean = mean_photon(s) / nsq;
    r.n_second_moment = photon_second_moment(s) / nsq;
    if (r.n_mean >= kMandelFloor)
        r.mandel_q = (r.n_second_moment - r.n_mean * r.n_mean - r.n_mean) / r.n_mean;
    QuadratureMoments q = quadrature_moments(s);
    r.x_var = q.x_var / nsq;
    r.p_var = q.p_var / nsq;
    r.xp_cov = q.xp_cov / nsq;
    r.purity = field_purity(s) / (nsq * nsq);
    r.level_probs = detector_distribution(s);
    for (double& p : r.level_probs) p /= nsq;
    r.photon_probs = photon_distribution(s);
    for (double& p : r.photon_probs) p /= nsq;
    return r;
}

} // namespace dce
