#pragma once
#include <stdexcept>
#include <string>

namespace lattice {

// invalid request at the problem-domain level: unknown family/branch pairing,
// nonpositive parameter, unsupported waveform orientation, window too small, ...
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

// an internal numerical cross-check failed (negative Bloch eigenvalue, NaN in a
// field, mismatched analytic/numeric paths). Callers map this to exit code 4.
struct consistency_error : std::runtime_error {
    explicit consistency_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lattice
