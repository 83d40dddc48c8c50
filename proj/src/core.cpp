#include "lattice/core.hpp"

#include <cmath>

namespace lattice {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const double kSqrt3 = std::sqrt(3.0);

bool bad(double x) { return !std::isfinite(x); }

// Translate x by multiples of 2*half into (-half, half].
double fold_half(double x, double half) {
    if (half <= 0.0) return 0.0;
    double y = x - 2.0 * half * std::ceil((x - half) / (2.0 * half));
    // guard against fp landing a hair outside
    if (y > half) y = half;
    if (y <= -half) y = half;
    return y;
}

} // namespace

void LatticeSpec::validate() const {
    if (bad(gx) || bad(gy) || bad(l) || bad(gamma) || bad(mass))
        throw domain_error("lattice parameters must be finite");
    if (mass <= 0.0) throw domain_error("mass must be positive");
    if (gx <= 0.0) throw domain_error("stiffness gx must be positive");
    switch (family) {
    case Family::RCL:
        if (gy <= 0.0) throw domain_error("stiffness gy must be positive");
        if (l <= 0.0) throw domain_error("vertical period l must be positive");
        break;
    case Family::RTL:
        if (gamma < 0.0) throw domain_error("diagonal stiffness gamma must be nonnegative");
        break;
    default:
        break;
    }
}

LatticeSpec make_msl1d(double g, double mass) {
    LatticeSpec s;
    s.family = Family::MSL1D;
    s.gx = g;
    s.gy = g;
    s.mass = mass;
    s.validate();
    return s;
}

LatticeSpec make_scl(double g, double mass) { return make_srcl(1.0, g, mass); }

LatticeSpec make_srcl(double l, double g, double mass) {
    LatticeSpec s;
    s.family = Family::RCL;
    s.l = l;
    s.gx = g;
    s.gy = g;
    s.mass = mass;
    s.validate();
    return s;
}

LatticeSpec make_rcl(double l, double gx, double gy, double mass) {
    LatticeSpec s;
    s.family = Family::RCL;
    s.l = l;
    s.gx = gx;
    s.gy = gy > 0.0 ? gy : (l > 0.0 ? 1.0 / l : -1.0);
    s.mass = mass;
    s.validate();
    return s;
}

LatticeSpec make_hcl(double g, double mass) {
    LatticeSpec s;
    s.family = Family::HCL;
    s.gx = g;
    s.gy = g;
    s.mass = mass;
    s.validate();
    return s;
}

LatticeSpec make_etl(double g, double mass) {
    LatticeSpec s;
    s.family = Family::ETL;
    s.gx = g;
    s.gy = g;
    s.mass = mass;
    s.validate();
    return s;
}

LatticeSpec make_rtl(double gamma, double g, double mass) {
    LatticeSpec s;
    s.family = Family::RTL;
    s.gamma = gamma;
    s.gx = g;
    s.gy = g;
    s.mass = mass;
    s.validate();
    return s;
}

int sublattice_count(const LatticeSpec& spec) {
    return spec.family == Family::HCL ? 2 : 1;
}

Vec2 node_position(const LatticeSpec& spec, NodeIndex node) {
    spec.validate();
    if (node.sub == Sub::V && spec.family != Family::HCL)
        throw domain_error("sublattice V exists only on the honeycomb lattice");
    const double m = node.m, n = node.n;
    switch (spec.family) {
    case Family::MSL1D:
        return {m, 0.0};
    case Family::RCL:
        return {m, spec.l * n};
    case Family::ETL:
        return {m + 0.5 * n, 0.5 * kSqrt3 * n};
    case Family::RTL:
        return {m, n};
    case Family::HCL: {
        // cell vectors a1 = (sqrt(3)/2, 1/2), a2 = (sqrt(3)/2, -1/2)
        Vec2 v{0.5 * kSqrt3 * (n + m), 0.5 * (n - m)};
        if (node.sub == Sub::V) return v;
        return {v.x - 1.0 / kSqrt3, v.y};
    }
    }
    throw domain_error("unknown lattice family");
}

Vec2 zone_half_widths(const LatticeSpec& spec) {
    spec.validate();
    switch (spec.family) {
    case Family::MSL1D: return {kPi, 0.0};
    case Family::RCL:   return {kPi, kPi / spec.l};
    case Family::HCL:   return {2.0 * kPi / kSqrt3, kPi};
    case Family::ETL:   return {kPi, 2.0 * kPi / kSqrt3};
    case Family::RTL:   return {kPi, kPi};
    }
    throw domain_error("unknown lattice family");
}

bool in_zone(const LatticeSpec& spec, WaveVector k, double tol) {
    Vec2 hw = zone_half_widths(spec);
    if (std::abs(k.kx) > hw.x + tol) return false;
    if (spec.family == Family::MSL1D) return std::abs(k.ky) <= tol;
    return std::abs(k.ky) <= hw.y + tol;
}

WaveVector fold_into_zone(const LatticeSpec& spec, WaveVector k) {
    Vec2 hw = zone_half_widths(spec);
    switch (spec.family) {
    case Family::MSL1D:
        return {fold_half(k.kx, hw.x), 0.0};
    case Family::RCL:
    case Family::RTL:
        return {fold_half(k.kx, hw.x), fold_half(k.ky, hw.y)};
    case Family::HCL: {
        // Reciprocal cell is spanned by b1 = 2*pi*(1/sqrt(3), 1) and
        // b2 = 2*pi*(1/sqrt(3), -1). Reduce ky with b1 (shifting kx along),
        // then reduce kx with b1 + b2 = (4*pi/sqrt(3), 0).
        double j = std::ceil((k.ky - kPi) / (2.0 * kPi));
        double kx = k.kx - j * 2.0 * kPi / kSqrt3;
        double ky = k.ky - j * 2.0 * kPi;
        kx = fold_half(kx, hw.x);
        ky = fold_half(ky, hw.y); // no-op up to fp clean-up
        return {kx, ky};
    }
    case Family::ETL: {
        // b1 = 2*pi*(1, -1/sqrt(3)) reduces kx (shifting ky along),
        // b2 = 2*pi*(0, 2/sqrt(3)) reduces ky.
        double p = std::ceil((k.kx - kPi) / (2.0 * kPi));
        double kx = k.kx - p * 2.0 * kPi;
        double ky = k.ky + p * 2.0 * kPi / kSqrt3;
        kx = fold_half(kx, hw.x);
        ky = fold_half(ky, hw.y);
        return {kx, ky};
    }
    }
    throw domain_error("unknown lattice family");
}

BlochMatrix bloch_matrix(const LatticeSpec& spec, WaveVector k0) {
    spec.validate();
    const WaveVector k = fold_into_zone(spec, k0);
    const double invM = 1.0 / spec.mass;
    BlochMatrix D;
    switch (spec.family) {
    case Family::MSL1D:
        D.dim = 1;
        D.d00 = 2.0 * spec.gx * (1.0 - std::cos(k.kx)) * invM;
        break;
    case Family::RCL:
        D.dim = 1;
        D.d00 = (2.0 * spec.gx * (1.0 - std::cos(k.kx)) +
                 2.0 * spec.gy * (1.0 - std::cos(spec.l * k.ky))) * invM;
        break;
    case Family::ETL: {
        // bond directions e1 = (1,0), e2 = (1/2, sqrt(3)/2), e3 = e2 - e1
        const double p1 = k.kx;
        const double p2 = 0.5 * k.kx + 0.5 * kSqrt3 * k.ky;
        const double p3 = p2 - p1;
        D.dim = 1;
        D.d00 = spec.gx * invM *
                (6.0 - 2.0 * std::cos(p1) - 2.0 * std::cos(p2) - 2.0 * std::cos(p3));
        break;
    }
    case Family::RTL:
        D.dim = 1;
        D.d00 = (2.0 * spec.gx * (2.0 - std::cos(k.kx) - std::cos(k.ky)) +
                 2.0 * spec.gamma * (1.0 - std::cos(k.kx + k.ky))) * invM;
        break;
    case Family::HCL: {
        const double f1 = 0.5 * (kSqrt3 * k.kx + k.ky); // k . a1
        const double f2 = 0.5 * (kSqrt3 * k.kx - k.ky); // k . a2
        const std::complex<double> S =
            1.0 + std::polar(1.0, -f1) + std::polar(1.0, -f2);
        D.dim = 2;
        D.d00 = D.d11 = 3.0 * spec.gx * invM;
        D.d01 = -spec.gx * invM * S;
        D.d10 = std::conj(D.d01);
        break;
    }
    }
    return D;
}

FieldState FieldState::zeros(const LatticeSpec& spec, int m_lo, int m_hi, int n_lo, int n_hi) {
    spec.validate();
    if (m_lo > m_hi || n_lo > n_hi)
        throw domain_error("field window bounds are inverted");
    if (spec.family == Family::MSL1D && (n_lo != 0 || n_hi != 0))
        throw domain_error("1D chain fields must use n_lo = n_hi = 0");
    FieldState f;
    f.m_lo = m_lo;
    f.m_hi = m_hi;
    f.n_lo = n_lo;
    f.n_hi = n_hi;
    f.nsub = sublattice_count(spec);
    const std::size_t N = f.size_with_halo();
    f.u.assign(N, 0.0);
    f.du.assign(N, 0.0);
    if (f.nsub == 2) {
        f.v_sub.assign(N, 0.0);
        f.dv_sub.assign(N, 0.0);
    }
    return f;
}

void acceleration(const LatticeSpec& spec, const FieldState& f,
                  std::vector<double>& au, std::vector<double>& av) {
    spec.validate();
    if (f.nsub != sublattice_count(spec))
        throw domain_error("field sublattice count does not match the lattice family");
    const std::size_t N = f.size_with_halo();
    if (f.u.size() != N || (f.nsub == 2 && f.v_sub.size() != N))
        throw consistency_error("field arrays do not match the declared window");
    au.assign(N, 0.0);
    if (f.nsub == 2) av.assign(N, 0.0); else av.clear();

    const std::ptrdiff_t s = f.stride();
    const double invM = 1.0 / spec.mass;
    const int rows = f.rows(), cols = f.cols();

    switch (spec.family) {
    case Family::MSL1D: {
        const double c = spec.gx * invM;
        for (int i = 1; i <= rows; ++i) {
            const double* p = f.u.data() + std::size_t(i) * s + 1;
            au[std::size_t(i) * s + 1] = c * (p[-s] + p[s] - 2.0 * p[0]);
        }
        break;
    }
    case Family::RCL: {
        const double cx = spec.gx * invM, cy = spec.gy * invM;
        const double c0 = 2.0 * (spec.gx + spec.gy) * invM;
        for (int i = 1; i <= rows; ++i) {
            const double* p = f.u.data() + std::size_t(i) * s + 1;
            double* a = au.data() + std::size_t(i) * s + 1;
            for (int j = 0; j < cols; ++j)
                a[j] = cx * (p[j - s] + p[j + s]) + cy * (p[j - 1] + p[j + 1]) - c0 * p[j];
        }
        break;
    }
    case Family::ETL: {
        const double c = spec.gx * invM;
        for (int i = 1; i <= rows; ++i) {
            const double* p = f.u.data() + std::size_t(i) * s + 1;
            double* a = au.data() + std::size_t(i) * s + 1;
            for (int j = 0; j < cols; ++j)
                a[j] = c * (p[j - s] + p[j + s] + p[j - 1] + p[j + 1] +
                            p[j + s - 1] + p[j - s + 1] - 6.0 * p[j]);
        }
        break;
    }
    case Family::RTL: {
        const double cg = spec.gx * invM, cd = spec.gamma * invM;
        const double c0 = (4.0 * spec.gx + 2.0 * spec.gamma) * invM;
        for (int i = 1; i <= rows; ++i) {
            const double* p = f.u.data() + std::size_t(i) * s + 1;
            double* a = au.data() + std::size_t(i) * s + 1;
            for (int j = 0; j < cols; ++j)
                a[j] = cg * (p[j - s] + p[j + s] + p[j - 1] + p[j + 1]) +
                       cd * (p[j + s + 1] + p[j - s - 1]) - c0 * p[j];
        }
        break;
    }
    case Family::HCL: {
        const double c = spec.gx * invM;
        for (int i = 1; i <= rows; ++i) {
            const double* pu = f.u.data() + std::size_t(i) * s + 1;
            const double* pv = f.v_sub.data() + std::size_t(i) * s + 1;
            double* a = au.data() + std::size_t(i) * s + 1;
            double* b = av.data() + std::size_t(i) * s + 1;
            for (int j = 0; j < cols; ++j) {
                a[j] = c * (pv[j] + pv[j - s] + pv[j - 1] - 3.0 * pu[j]);
                b[j] = c * (pu[j] + pu[j + s] + pu[j + 1] - 3.0 * pv[j]);
            }
        }
        break;
    }
    }
}

double total_energy(const LatticeSpec& spec, const FieldState& f) {
    spec.validate();
    const std::ptrdiff_t s = f.stride();
    const int rows = f.rows(), cols = f.cols();

    double kin = 0.0;
    for (int i = 1; i <= rows; ++i)
        for (int j = 1; j <= cols; ++j) {
            const std::size_t q = std::size_t(i) * s + j;
            kin += f.du[q] * f.du[q];
            if (f.nsub == 2) kin += f.dv_sub[q] * f.dv_sub[q];
        }
    kin *= 0.5 * spec.mass;

    // Elastic energy: walk every node including the halo ring and sum bonds in
    // a fixed half-space of directions so each bond is counted once. Bonds with
    // both ends in the halo contribute zero.
    auto sq = [](double d) { return d * d; };
    double pot = 0.0;
    const int I = rows + 2, J = cols + 2;
    auto inb = [&](int i, int j) { return i >= 0 && i < I && j >= 0 && j < J; };
    auto U = [&](int i, int j) { return f.u[std::size_t(i) * s + j]; };
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j) {
            switch (spec.family) {
            case Family::MSL1D:
                if (inb(i + 1, j)) pot += 0.5 * spec.gx * sq(U(i + 1, j) - U(i, j));
                break;
            case Family::RCL:
                if (inb(i + 1, j)) pot += 0.5 * spec.gx * sq(U(i + 1, j) - U(i, j));
                if (inb(i, j + 1)) pot += 0.5 * spec.gy * sq(U(i, j + 1) - U(i, j));
                break;
            case Family::ETL:
                if (inb(i + 1, j)) pot += 0.5 * spec.gx * sq(U(i + 1, j) - U(i, j));
                if (inb(i, j + 1)) pot += 0.5 * spec.gx * sq(U(i, j + 1) - U(i, j));
                if (inb(i + 1, j - 1)) pot += 0.5 * spec.gx * sq(U(i + 1, j - 1) - U(i, j));
                break;
            case Family::RTL:
                if (inb(i + 1, j)) pot += 0.5 * spec.gx * sq(U(i + 1, j) - U(i, j));
                if (inb(i, j + 1)) pot += 0.5 * spec.gx * sq(U(i, j + 1) - U(i, j));
                if (inb(i + 1, j + 1)) pot += 0.5 * spec.gamma * sq(U(i + 1, j + 1) - U(i, j));
                break;
            case Family::HCL: {
                // every bond has exactly one u end: u(i,j) pairs with v(i,j),
                // v(i-1,j) and v(i,j-1)
                auto V = [&](int a, int b) { return f.v_sub[std::size_t(a) * s + b]; };
                const double g = spec.gx;
                pot += 0.5 * g * sq(V(i, j) - U(i, j));
                if (inb(i - 1, j)) pot += 0.5 * g * sq(V(i - 1, j) - U(i, j));
                if (inb(i, j - 1)) pot += 0.5 * g * sq(V(i, j - 1) - U(i, j));
                break;
            }
            }
        }
    return kin + pot;
}

} // namespace lattice
