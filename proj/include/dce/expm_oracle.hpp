#pragma once

// Dense eigendecomposition propagator. Exact up to roundoff for the
// truncated system, feasible for dims up to ~2000; used as the independent
// verification oracle for the adaptive integrator — never in production
// paths.

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "dce/dynamics.hpp"

namespace dce {

/// Dense interaction-picture Hamiltonian H_I on the truncated product basis
/// |j,k>, index (j-1)*(K+1) + k. Hermitian by construction.
inline Eigen::MatrixXcd assemble_hamiltonian(const GeneratorSpec& gen) {
    gen.validate();
    const int K = gen.fock_cutoff;
    const int N = gen.levels;
    const auto dim = static_cast<Eigen::Index>(gen.dim());
    const std::complex<double> i(0.0, 1.0);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    auto idx = [K](int j, int k) { return static_cast<Eigen::Index>((j - 1) * (K + 1) + k); };
    for (int j = 1; j <= N; ++j) {
        for (int k = 0; k + 2 <= K; ++k) {
            // -i beta (a^2 - a^t^2):  <j,k|H|j,k+2> = -i beta sqrt((k+1)(k+2))
            std::complex<double> v = -i * gen.beta * std::sqrt((k + 1.0) * (k + 2.0));
            h(idx(j, k), idx(j, k + 2)) = v;
            h(idx(j, k + 2), idx(j, k)) = std::conj(v);
        }
        if (j <= N - 1) {
            double gj = gen.profile.g(j);
            for (int k = 0; k + 1 <= K; ++k) {
                // g_j (a sigma_{j+1,j} + h.c.): <j+1,k|H|j,k+1> = g_j sqrt(k+1)
                double v = gj * std::sqrt(k + 1.0);
                h(idx(j + 1, k), idx(j, k + 1)) = v;
                h(idx(j, k + 1), idx(j + 1, k)) = v;
            }
        }
    }
    return h;
}

/// Exact propagation psi(t) = U exp(-i Lambda t) U^t psi(0) via Hermitian
/// eigendecomposition of the assembled H_I.
inline StateVector expm_oracle(const GeneratorSpec& gen, const StateVector& state0, double t) {
    if (gen.dim() > 2000)
        throw std::invalid_argument("expm oracle limited to dimension 2000");
    if (state0.amplitudes().size() != gen.dim())
        throw std::invalid_argument("state dimensions do not match generator");
    Eigen::MatrixXcd h = assemble_hamiltonian(gen);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");
    const auto dim = static_cast<Eigen::Index>(gen.dim());
    Eigen::VectorXcd psi(dim);
    for (Eigen::Index i = 0; i < dim; ++i) psi(i) = state0.amplitudes()[static_cast<std::size_t>(i)];
    Eigen::VectorXcd coeff = es.eigenvectors().adjoint() * psi;
    const std::complex<double> mi(0.0, -1.0);
    for (Eigen::Index i = 0; i < dim; ++i)
        coeff(i) *= std::exp(mi * es.eigenvalues()(i) * t);
    psi = es.eigenvectors() * coeff;
    StateVector out(gen.levels, gen.fock_cutoff);
    for (Eigen::Index i = 0; i < dim; ++i) out.amplitudes()[static_cast<std::size_t>(i)] = psi(i);
    out.time = state0.time + t;
    return out;
}

} // namespace dce
