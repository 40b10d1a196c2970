#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "dce/errors.hpp"
#include "dce/system.hpp"

namespace dce {

/// Invariant subspace of the beta = 0 Hamiltonian with fixed total
/// excitation E = (j-1) + k. On resonance the diagonal vanishes and the
/// block is symmetric tridiagonal with entries g_j * sqrt(E - j + 1)
/// between the basis states (j, E-j+1) and (j+1, E-j).
struct ExcitationBlock {
    int excitation = 0;           ///< E
    int dim = 0;                  ///< min(N, E+1)
    std::vector<double> offdiag;  ///< dim-1 entries, all diagonal entries are zero

    /// Basis state (detector level j, photon number k) at position
    /// pos = 1..dim, ordered (1,E), (2,E-1), ...
    std::pair<int, int> basis_state(int pos) const {
        return {pos, excitation - pos + 1};
    }

    double matrix_norm() const {
        double m = 0.0;
        for (double v : offdiag) m = std::max(m, std::abs(v));
        return 2.0 * m; // bound on the spectral radius of a tridiagonal
    }
};

inline ExcitationBlock build_block(const CouplingProfile& profile, int levels, int excitation) {
    if (excitation < 0) throw std::invalid_argument("excitation must be >= 0");
    profile.validate(levels);
    ExcitationBlock block;
    block.excitation = excitation;
    block.dim = std::min(levels, excitation + 1);
    block.offdiag.reserve(static_cast<std::size_t>(std::max(block.dim - 1, 0)));
    for (int p = 1; p <= block.dim - 1; ++p)
        block.offdiag.push_back(profile.g(p) * std::sqrt(static_cast<double>(excitation - p + 1)));
    return block;
}

/// Implicit-shift QL iteration for a symmetric tridiagonal matrix.
/// diag/offdiag are consumed; on return `eigenvalues` is ascending and
/// eigenvector i is stored in column i of `vectors` (row-major n x n).
struct TridiagEigen {
    std::vector<double> eigenvalues;
    std::vector<double> vectors;
    int n = 0;

    double vec(int row, int col) const { return vectors[static_cast<std::size_t>(row) * n + col]; }
};

namespace detail {

inline void tridiag_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z,
                       int n) {
    constexpr int kMaxIter = 60;
    if (n <= 1) return;
    e.resize(static_cast<std::size_t>(n), 0.0); // e[n-1] is workspace
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (iter++ == kMaxIter)
                    throw EigenConvergenceFailure("tridiagonal QL exceeded iteration cap");
                double shift = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(shift, 1.0);
                shift = d[m] - d[l] + e[l] / (shift + std::copysign(r, shift));
                double s = 1.0, c = 1.0, p = 0.0;
                int i = m - 1;
                for (; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, shift);
                    e[i + 1] = r;
                    if (r == 0.0) { // deflate and restart this column
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = shift / r;
                    shift = d[i + 1] - p;
                    r = (d[i] - shift) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = shift + p;
                    shift = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        double zk1 = z[static_cast<std::size_t>(k) * n + i + 1];
                        double zk0 = z[static_cast<std::size_t>(k) * n + i];
                        z[static_cast<std::size_t>(k) * n + i + 1] = s * zk0 + c * zk1;
                        z[static_cast<std::size_t>(k) * n + i] = c * zk0 - s * zk1;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = shift;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

} // namespace detail

inline TridiagEigen eigen_tridiag(const ExcitationBlock& block) {
    const int n = block.dim;
    TridiagEigen out;
    out.n = n;
    if (n == 0) return out;
    std::vector<double> d(static_cast<std::size_t>(n), 0.0);
    std::vector<double> e = block.offdiag;
    out.vectors.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) out.vectors[static_cast<std::size_t>(i) * n + i] = 1.0;
    detail::tridiag_ql(d, e, out.vectors, n);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
    out.eigenvalues.resize(static_cast<std::size_t>(n));
    std::vector<double> sorted(static_cast<std::size_t>(n) * n);
    for (int c = 0; c < n; ++c) {
        out.eigenvalues[static_cast<std::size_t>(c)] = d[static_cast<std::size_t>(order[c])];
        for (int r = 0; r < n; ++r)
            sorted[static_cast<std::size_t>(r) * n + c] =
                out.vectors[static_cast<std::size_t>(r) * n + order[c]];
    }
    out.vectors = std::move(sorted);
    return out;
}

/// Null eigenvector of a zero-diagonal tridiagonal block with positive
/// couplings. Exact rule: a null eigenvalue exists iff the dimension is
/// odd, and its eigenvector is supported on the odd positions 1,3,5,...
/// (odd detector level, even photon number).
struct NullSpaceInfo {
    bool has_null = false;
    std::vector<int> support;                          ///< positions, 1-based
    std::vector<std::pair<int, int>> support_states;   ///< (level j, photons k)
};

inline NullSpaceInfo null_space_analysis(const ExcitationBlock& block) {
    for (double v : block.offdiag)
        if (!(v > 0.0))
            throw ZeroCoupling("vanishing off-diagonal breaks the support theorem");
    NullSpaceInfo info;
    info.has_null = (block.dim % 2 == 1) && block.dim >= 1;
    if (!info.has_null) return info;

    // three-term recurrence from the first row: strict alternation, even
    // positions exactly zero
    std::vector<double> v(static_cast<std::size_t>(block.dim), 0.0);
    v[0] = 1.0;
    for (int i = 2; i < block.dim; i += 2)
        v[static_cast<std::size_t>(i)] =
            -block.offdiag[static_cast<std::size_t>(i - 2)] /
            block.offdiag[static_cast<std::size_t>(i - 1)] * v[static_cast<std::size_t>(i - 2)];
    double nrm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (int i = 0; i < block.dim; ++i) {
        if (std::abs(v[static_cast<std::size_t>(i)]) > 1e-10 * nrm) {
            info.support.push_back(i + 1);
            info.support_states.push_back(block.basis_state(i + 1));
        }
    }
    return info;
}

/// Photon-number cap prediction: walks even-excitation blocks and follows
/// the resonant chain while null eigenvalues persist. Even N terminates the
/// chain at E = N-2; odd N >= 3 never terminates. N = 1 and N = 2 support
/// no detector-mediated chain at all.
struct ParityPrediction {
    std::optional<int> max_photons;  ///< empty means unbounded
    std::vector<int> resonant_chain; ///< excitations E with a null eigenvalue
};

inline ParityPrediction predict_max_photons(int levels) {
    if (levels < 1) throw std::invalid_argument("levels must be >= 1");
    ParityPrediction pred;
    if (levels <= 2) {
        pred.max_photons = 0;
        pred.resonant_chain = {0};
        return pred;
    }
    if (levels % 2 == 1) {
        // every even-E block has odd dimension min(N, E+1), hence a null
        // eigenvalue; list the chain up to the first uncapped block
        for (int e = 0; e <= levels + 1; e += 2) pred.resonant_chain.push_back(e);
        pred.max_photons = std::nullopt;
        return pred;
    }
    for (int e = 0; e <= levels - 2; e += 2) pred.resonant_chain.push_back(e);
    pred.max_photons = levels - 2;
    return pred;
}

} // namespace dce
