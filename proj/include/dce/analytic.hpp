#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>

#include "dce/state.hpp"

namespace dce {

/// Ideal empty cavity under eta = 2 modulation: photon number, Mandel
/// factor and quadrature variances of the squeezed vacuum.
struct EmptyCavityObservables {
    double n_mean;
    double mandel_q;
    double p_var;
    double x_var;
};

inline EmptyCavityObservables empty_cavity(double t, double epsilon) {
    double sh = std::sinh(epsilon * t / 2.0);
    EmptyCavityObservables r;
    r.n_mean = sh * sh;
    r.mandel_q = 1.0 + 2.0 * r.n_mean;
    r.p_var = 0.5 * std::exp(-epsilon * t);
    r.x_var = 0.5 * std::exp(epsilon * t);
    return r;
}

enum class HOBranch { Trigonometric, Hyperbolic, Degenerate };

/// Oscillator-detector parameters. The detuning-like combination
/// w = g^2 - beta^2 selects the branch: oscillatory for |g| > |beta|,
/// hyperbolic below, with c_gamma and s_gamma continuous across the
/// crossover (s_gamma -> t as gamma -> 0).
struct HOParams {
    double beta = 0.0;
    double g = 0.0;

    HOParams() = default;
    HOParams(double beta_, double g_) : beta(beta_), g(g_) {
        if (!(g >= 0.0)) throw std::invalid_argument("g must be >= 0");
    }

    double w() const { return g * g - beta * beta; }

    HOBranch branch() const {
        if (std::abs(g - std::abs(beta)) < 1e-14) return HOBranch::Degenerate;
        return w() > 0.0 ? HOBranch::Trigonometric : HOBranch::Hyperbolic;
    }

    /// gamma on the trigonometric branch, gamma-tilde on the hyperbolic one.
    double gamma_abs() const { return std::sqrt(std::abs(w())); }

    /// c_gamma(t): cos(gamma t) or cosh(gamma~ t), as an entire function of w.
    double c_gamma(double t) const { return cosw(w(), t); }

    /// s_gamma(t): sin(gamma t)/gamma or sinh(gamma~ t)/gamma~; -> t at w = 0.
    double s_gamma(double t) const { return sincw(w(), t); }

    /// s_{2 gamma}(t) = sin(2 gamma t)/(2 gamma), branch-correct.
    double s_2gamma(double t) const { return sincw(w(), 2.0 * t) / 2.0; }

    // cos(sqrt(w) t) continued through w <= 0; series near the branch point
    // avoids the 0/0 cancellation.
    static double cosw(double w, double t) {
        double x = w * t * t;
        if (std::abs(x) < 1e-8)
            return 1.0 - x / 2.0 + x * x / 24.0 - x * x * x / 720.0;
        double r = std::sqrt(std::abs(w)) * std::abs(t);
        return w > 0.0 ? std::cos(r) : std::cosh(r);
    }

    // sin(sqrt(w) t)/sqrt(w) continued through w <= 0.
    static double sincw(double w, double t) {
        double x = w * t * t;
        if (std::abs(x) < 1e-8)
            return t * (1.0 - x / 6.0 + x * x / 120.0 - x * x * x / 5040.0);
        double rg = std::sqrt(std::abs(w));
        double r = rg * t;
        return w > 0.0 ? std::sin(r) / rg : std::sinh(r) / rg;
    }
};

/// Heisenberg-picture solution for the oscillator detector: a(t) and b(t)
/// as linear combinations of (a0, b0, a0^t, b0^t), in that order.
struct BogoliubovCoefficients {
    std::array<std::complex<double>, 4> field;
    std::array<std::complex<double>, 4> detector;

    /// |u_a|^2 + |u_b|^2 - |v_a|^2 - |v_b|^2, equal to 1 when the
    /// transformation preserves [a, a^t] = 1.
    static double symplectic_defect(const std::array<std::complex<double>, 4>& c) {
        return std::norm(c[0]) + std::norm(c[1]) - std::norm(c[2]) - std::norm(c[3]) - 1.0;
    }
};

inline BogoliubovCoefficients ho_bogoliubov_coeffs(const HOParams& p, double t) {
    const std::complex<double> i(0.0, 1.0);
    double Cb = std::cosh(p.beta * t);
    double Sb = std::sinh(p.beta * t);
    double cg = p.c_gamma(t);
    double sg = p.s_gamma(t);
    BogoliubovCoefficients out;
    out.field = {Cb * cg + p.beta * Sb * sg, -i * p.g * Cb * sg,
                 Sb * cg + p.beta * Cb * sg, i * p.g * Sb * sg};
    out.detector = {Cb * cg - p.beta * Sb * sg, -i * p.g * Cb * sg,
                    -(Sb * cg - p.beta * Cb * sg), -i * p.g * Sb * sg};
    // detector order: (b0, a0, b0^t, a0^t) mapped back to (a0, b0, a0^t, b0^t)
    std::swap(out.detector[0], out.detector[1]);
    std::swap(out.detector[2], out.detector[3]);
    return out;
}

struct HOObservables {
    double n_field = 0.0;
    double n_detector = 0.0;
    std::optional<double> mandel_q;
    double p_var = 0.5;
    double x_var = 0.5;
    double uncertainty_product = 0.25;
    double purity = 1.0;
};

/// Exact observables of the oscillator-detector model from the vacuum
/// start: mean quanta, Mandel factor, quadrature variances, uncertainty
/// product and field purity.
inline HOObservables ho_observables(const HOParams& p, double t) {
    double b = p.beta;
    double Sb = std::sinh(b * t);
    double S2b = std::sinh(2.0 * b * t);
    double C2b = std::cosh(2.0 * b * t);
    double sg = p.s_gamma(t);
    double s2g = p.s_2gamma(t);

    HOObservables r;
    double common = Sb * Sb + b * b * C2b * sg * sg;
    double cross = b * S2b * s2g;
    r.n_field = common + cross;
    r.n_detector = common - cross;
    if (r.n_field >= kMandelFloor) {
        double num = S2b * (1.0 + 2.0 * b * b * sg * sg) + 2.0 * b * C2b * s2g;
        r.mandel_q = r.n_field + num * num / (4.0 * r.n_field);
    }
    double osc = 0.5 + b * b * sg * sg;
    r.p_var = std::exp(-2.0 * b * t) * (osc - b * s2g);
    r.x_var = std::exp(2.0 * b * t) * (osc + b * s2g);
    r.uncertainty_product = 0.25 + p.g * p.g * b * b * sg * sg * sg * sg;
    r.purity = 1.0 / std::sqrt(4.0 * r.uncertainty_product);
    return r;
}

/// Large-beta*t envelope of the mean photon number: exponential growth with
/// increment epsilon/2 modulated at frequency 2 gamma. Trigonometric branch
/// only; meaningless for beta*t of order unity or below.
inline double ho_asymptotic_n(const HOParams& p, double t) {
    if (p.w() <= 0.0)
        throw std::invalid_argument("asymptotic form requires |g| > |beta|");
    double gamma = p.gamma_abs();
    double b = p.beta;
    double s = std::sin(gamma * t);
    double ratio = b / gamma;
    return 0.25 * std::exp(2.0 * b * t) *
           (1.0 + ratio * std::sin(2.0 * gamma * t) + 2.0 * ratio * ratio * s * s);
}

/// <n_b>/<n>, close to unity deep in the |g| >> |beta| regime. Undefined
/// at t = 0 where both means vanish.
inline std::optional<double> detector_field_ratio(const HOParams& p, double t) {
    HOObservables r = ho_observables(p, t);
    if (r.n_field < kMandelFloor) return std::nullopt;
    return r.n_detector / r.n_field;
}

/// Center of the n-th shelf: 2 gamma t_n = (2n+1) pi.
inline double shelf_time(const HOParams& p, int n) {
    if (p.w() <= 0.0)
        throw std::invalid_argument("shelves exist on the trigonometric branch only");
    return (2.0 * n + 1.0) * M_PI / (2.0 * p.gamma_abs());
}

} // namespace dce
