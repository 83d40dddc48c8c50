#include "lattice/oracle.hpp"

#include <cmath>

namespace lattice::oracle {

std::vector<double> bloch_eigenfrequencies(const LatticeSpec& spec, WaveVector k) {
    const BlochMatrix D = bloch_matrix(spec, k);
    if (D.dim == 1) {
        const double lam = D.d00.real();
        if (std::abs(D.d00.imag()) > 1e-12)
            throw consistency_error("scalar dynamic matrix has an imaginary part");
        if (lam < -1e-12)
            throw consistency_error("negative Bloch eigenvalue");
        return {std::sqrt(std::max(0.0, lam))};
    }

    if (std::abs(D.d10 - std::conj(D.d01)) > 1e-12)
        throw consistency_error("dynamic matrix is not Hermitian");
    const double a = D.d00.real();
    const double d = D.d11.real();
    const double off = std::abs(D.d01);
    const double tr = a + d;
    const double disc = (a - d) * (a - d) + 4.0 * off * off;
    const double root = std::sqrt(std::max(0.0, disc));
    const double lo = 0.5 * (tr - root);
    const double hi = 0.5 * (tr + root);
    if (lo < -1e-12 * std::max(1.0, hi))
        throw consistency_error("negative Bloch eigenvalue");
    return {std::sqrt(std::max(0.0, lo)), std::sqrt(std::max(0.0, hi))};
}

FdVelocity fd_group_velocity(const LatticeSpec& spec, WaveVector k, Branch branch,
                             double h) {
    if (!(h > 0.0)) throw domain_error("finite-difference step must be positive");
    const double wxp = omega(spec, {k.kx + h, k.ky}, branch);
    const double wxm = omega(spec, {k.kx - h, k.ky}, branch);
    const double wyp = omega(spec, {k.kx, k.ky + h}, branch);
    const double wym = omega(spec, {k.kx, k.ky - h}, branch);
    const double w = omega(spec, k, branch);

    FdVelocity r;
    r.cg.x = (wxp - wxm) / (2.0 * h);
    r.cg.y = (wyp - wym) / (2.0 * h);
    if (spec.family == Family::MSL1D) r.cg.y = 0.0;

    // forward and backward one-sided gradients; at a smooth point they agree to
    // O(h), at a cone apex or a kink they point different ways
    const double fx = (wxp - w) / h, bx = (w - wxm) / h;
    const double fy = spec.family == Family::MSL1D ? 0.0 : (wyp - w) / h;
    const double by = spec.family == Family::MSL1D ? 0.0 : (w - wym) / h;
    const double nf = std::hypot(fx, fy), nb = std::hypot(bx, by);
    if (nf < 1e-6 || nb < 1e-6) {
        r.flagged = true; // too flat to trust a direction
        return r;
    }
    const double dot = (fx * bx + fy * by) / (nf * nb);
    const double ang = std::acos(std::min(1.0, std::max(-1.0, dot)));
    const double mag = std::abs(nf - nb) / std::max(nf, nb);
    if (ang > 1e-3 || mag > 1e-3) r.flagged = true;
    return r;
}

std::vector<double> finite_chain_eigenfrequencies(int n_nodes, double g, double mass) {
    if (n_nodes < 1) throw domain_error("chain needs at least one node");
    if (g <= 0.0 || mass <= 0.0) throw domain_error("stiffness and mass must be positive");
    const double pi = 3.141592653589793238462643383279502884;
    std::vector<double> w(n_nodes);
    for (int j = 1; j <= n_nodes; ++j)
        w[j - 1] = 2.0 * std::sqrt(g / mass) * std::sin(j * pi / (2.0 * (n_nodes + 1)));
    return w;
}

} // namespace lattice::oracle
