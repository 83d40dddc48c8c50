#pragma once
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "lattice/errors.hpp"

namespace lattice {

// Families of scalar mass-spring lattices handled by this library.
//
//   MSL1D  monatomic chain, nearest-neighbour bonds
//   RCL    rectangular cell lattice; covers the square lattice (l = 1, gx = gy),
//          the stretched square lattice (l != 1, gx = gy) and the genuinely
//          anisotropic rectangular lattice (gx != gy). One node per cell.
//   HCL    honeycomb lattice, two nodes per cell (sublattices u and v)
//   ETL    equilateral triangular lattice, one node per cell
//   RTL    rhombic (sheared square) lattice: square grid plus one set of
//          diagonal bonds of stiffness gamma
enum class Family { MSL1D, RCL, HCL, ETL, RTL };

struct LatticeSpec {
    Family family = Family::RCL;
    // RCL only: vertical period (y spacing is l, x spacing is 1). Ignored elsewhere.
    double l = 1.0;
    // Bond stiffnesses. RCL uses gx along x and gy along y. The single-stiffness
    // families (MSL1D, HCL, ETL, RTL main bonds) read gx and ignore gy.
    double gx = 1.0;
    double gy = 1.0;
    // RTL only: stiffness of the (m,n)-(m+1,n+1) diagonal bonds.
    double gamma = 1.0;
    double mass = 1.0;

    void validate() const;   // throws domain_error on nonphysical parameters
};

// Factories for the conventional parameter sets.
LatticeSpec make_msl1d(double g = 1.0, double mass = 1.0);
LatticeSpec make_scl(double g = 1.0, double mass = 1.0);
LatticeSpec make_srcl(double l, double g = 1.0, double mass = 1.0);
// Rectangular lattice with stiffness tied to spacing: gy = 1/l unless overridden.
LatticeSpec make_rcl(double l, double gx = 1.0, double gy = -1.0, double mass = 1.0);
LatticeSpec make_hcl(double g = 1.0, double mass = 1.0);
LatticeSpec make_etl(double g = 1.0, double mass = 1.0);
LatticeSpec make_rtl(double gamma, double g = 1.0, double mass = 1.0);

// Number of nodes per primitive cell (2 for HCL, 1 otherwise).
int sublattice_count(const LatticeSpec& spec);

enum class Sub : std::uint8_t { U = 0, V = 1 };

struct NodeIndex {
    int m = 0;
    int n = 0;         // always 0 for MSL1D
    Sub sub = Sub::U;  // V is meaningful only for HCL

    friend bool operator==(const NodeIndex& a, const NodeIndex& b) {
        return a.m == b.m && a.n == b.n && a.sub == b.sub;
    }
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct WaveVector {
    double kx = 0.0;
    double ky = 0.0;
};

// Physical position of a node.
//   MSL1D:  (m, 0)
//   RCL:    (m, l*n)
//   ETL:    (m + n/2, sqrt(3)/2 * n)
//   RTL:    (m, n)   (bonds realised on the sheared lattice, coordinates square)
//   HCL:    cell vectors a1 = (sqrt(3)/2, 1/2), a2 = (sqrt(3)/2, -1/2);
//           v sits at n*a1 + m*a2, u sits a bond length 1/sqrt(3) to its left.
Vec2 node_position(const LatticeSpec& spec, NodeIndex node);

// Half-widths of the rectangular first Brillouin zone: |kx| <= x, |ky| <= y.
// MSL1D reports y = 0. HCL uses the rectangular (brick) reduction of the
// hexagonal zone, |kx| <= 2*pi/sqrt(3), |ky| <= pi, which tiles the plane under
// the reciprocal lattice and has the correct area.
Vec2 zone_half_widths(const LatticeSpec& spec);

bool in_zone(const LatticeSpec& spec, WaveVector k, double tol = 1e-12);

// Translate k by reciprocal lattice vectors into the zone rectangle.
WaveVector fold_into_zone(const LatticeSpec& spec, WaveVector k);

// Dynamic matrix of the Bloch problem  omega^2 * a = D(k) * a,  dim 1 or 2.
// Hermitian by construction; d10 = conj(d01).
struct BlochMatrix {
    int dim = 1;
    std::complex<double> d00{0.0, 0.0};
    std::complex<double> d01{0.0, 0.0};
    std::complex<double> d10{0.0, 0.0};
    std::complex<double> d11{0.0, 0.0};
};

BlochMatrix bloch_matrix(const LatticeSpec& spec, WaveVector k);

// Displacement (and velocity) data on a finite index window
// [m_lo..m_hi] x [n_lo..n_hi], with one ring of implicit fixed (zero) nodes
// around it. Arrays are stored row-major with the halo included, so stencils
// never branch on the boundary. MSL1D uses n_lo = n_hi = 0.
struct FieldState {
    int m_lo = 0, m_hi = 0, n_lo = 0, n_hi = 0;
    int nsub = 1;
    double t = 0.0;
    std::vector<double> u;      // size (rows+2)*(cols+2)
    std::vector<double> v_sub;  // same size when nsub == 2, else empty
    std::vector<double> du;     // velocities, same layout as u
    std::vector<double> dv_sub;

    static FieldState zeros(const LatticeSpec& spec, int m_lo, int m_hi, int n_lo, int n_hi);

    int rows() const { return m_hi - m_lo + 1; }
    int cols() const { return n_hi - n_lo + 1; }
    std::ptrdiff_t stride() const { return cols() + 2; }
    std::size_t size_with_halo() const {
        return static_cast<std::size_t>(rows() + 2) * static_cast<std::size_t>(cols() + 2);
    }
    bool contains(int m, int n) const {
        return m >= m_lo && m <= m_hi && n >= n_lo && n <= n_hi;
    }
    // Valid for the halo ring too (m_lo-1 .. m_hi+1 etc).
    std::size_t idx(int m, int n) const {
        return static_cast<std::size_t>(m - m_lo + 1) * static_cast<std::size_t>(stride()) +
               static_cast<std::size_t>(n - n_lo + 1);
    }
    double& at(int m, int n, Sub s = Sub::U) { return s == Sub::U ? u[idx(m, n)] : v_sub[idx(m, n)]; }
    double at(int m, int n, Sub s = Sub::U) const { return s == Sub::U ? u[idx(m, n)] : v_sub[idx(m, n)]; }
    double& vel(int m, int n, Sub s = Sub::U) { return s == Sub::U ? du[idx(m, n)] : dv_sub[idx(m, n)]; }
    double vel(int m, int n, Sub s = Sub::U) const { return s == Sub::U ? du[idx(m, n)] : dv_sub[idx(m, n)]; }
};

// Accelerations of every window node from the current displacements; the halo
// ring acts as clamped (zero) neighbours. au/av are resized to match the field
// layout (halo entries are written as zero).
void acceleration(const LatticeSpec& spec, const FieldState& f,
                  std::vector<double>& au, std::vector<double>& av);

// Total energy of the window: kinetic from the stored velocities plus the
// elastic energy of every bond with at least one end inside the window
// (bonds into the fixed halo count with the halo end at zero).
double total_energy(const LatticeSpec& spec, const FieldState& f);

} // namespace lattice
