#pragma once
#include <vector>

#include "lattice/core.hpp"
#include "lattice/dispersion.hpp"

// Independent reference implementations used to cross-check the closed-form
// dispersion layer. Everything here goes through generic numerics (direct
// eigenvalue extraction, finite differences) rather than the per-family
// formulas in dispersion.cpp.
namespace lattice::oracle {

// Eigenfrequencies of the Bloch dynamic matrix at k, sorted ascending.
// Throws consistency_error if the matrix is not Hermitian or an eigenvalue
// comes out negative beyond rounding.
std::vector<double> bloch_eigenfrequencies(const LatticeSpec& spec, WaveVector k);

struct FdVelocity {
    Vec2 cg{};
    bool flagged = false; // one-sided differences disagree: kink, apex or stationary point
};

// Central-difference gradient of the dispersion surface.
FdVelocity fd_group_velocity(const LatticeSpec& spec, WaveVector k, Branch branch,
                             double h = 1e-5);

// Eigenfrequencies of a fixed-fixed chain of n_nodes masses joined by springs:
// omega_j = 2*sqrt(g/m)*sin(j*pi/(2*(n_nodes+1))), j = 1..n_nodes.
std::vector<double> finite_chain_eigenfrequencies(int n_nodes, double g = 1.0,
                                                  double mass = 1.0);

} // namespace lattice::oracle
