#pragma once

#include <stdexcept>
#include <string>

namespace dce {

/// Accumulated norm error of the integrated state exceeded the hard limit
/// (1e-8); results past this point are not trustworthy.
struct NormDriftExceeded : std::runtime_error {
    explicit NormDriftExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

/// Occupation near the Fock-space wall exceeded the tail threshold. Caller
/// should retry with a larger cutoff.
struct TruncationOverflow : std::runtime_error {
    explicit TruncationOverflow(const std::string& msg) : std::runtime_error(msg) {}
};

/// A NaN or Inf appeared in the amplitude table.
struct NonFiniteAmplitude : std::runtime_error {
    explicit NonFiniteAmplitude(const std::string& msg) : std::runtime_error(msg) {}
};

/// A vanishing off-diagonal coupling breaks the null-space support theorem.
struct ZeroCoupling : std::runtime_error {
    explicit ZeroCoupling(const std::string& msg) : std::runtime_error(msg) {}
};

/// The tridiagonal QL iteration did not converge within the iteration cap.
struct EigenConvergenceFailure : std::runtime_error {
    explicit EigenConvergenceFailure(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace dce
