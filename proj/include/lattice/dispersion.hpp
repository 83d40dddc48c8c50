#pragma once
#include <vector>

#include "lattice/core.hpp"

namespace lattice {

// Branch selector. Single-band families use Single; the honeycomb lattice has
// an acoustic branch (I, the lower sheet) and an optical branch (II) and must
// be queried with one of those explicitly.
enum class Branch { Single, AcousticI, OpticalII };

// throws domain_error on invalid family/branch pairing
double omega(const LatticeSpec& spec, WaveVector k, Branch branch = Branch::Single);

struct GroupVelocity {
    Vec2 cg{};
    double beta = 0.0;   // atan2(cg.y, cg.x), 0 when not smooth
    bool smooth = true;  // false at conical apices, stationary points and omega = 0
};

GroupVelocity group_velocity(const LatticeSpec& spec, WaveVector k,
                             Branch branch = Branch::Single);

struct DispersionSample {
    WaveVector k{};
    double omega = 0.0;
    Vec2 cg{};
    double beta = 0.0;
    Branch branch = Branch::Single;
    bool smooth = true;
};

// res samples per axis, endpoints included (res >= 2); the 1D chain returns a
// single row along kx.
std::vector<DispersionSample> group_velocity_field(const LatticeSpec& spec,
                                                   Branch branch, int res);

enum class ResonanceKind { BandEdge, InteriorLPW, ConicalPoint };

struct ResonanceEntry {
    double omega = 0.0;
    ResonanceKind kind = ResonanceKind::BandEdge;
    std::vector<WaveVector> kpoints;   // representative zone points
    std::vector<double> beaming;       // ray directions in [0, 2*pi), physical frame
};

// All resonant frequencies of the family, sorted ascending.
std::vector<ResonanceEntry> resonance_catalog(const LatticeSpec& spec);

// Pass band [0, edge] of the full spectrum (all branches).
struct Band {
    double lo = 0.0;
    double hi = 0.0;
};
Band band_edges(const LatticeSpec& spec);

// Star directions for an interior resonance frequency; domain_error when omega
// does not match an interior (flat-contour) resonance of the family.
std::vector<double> beaming_directions(const LatticeSpec& spec, double omega);

struct ContourPolyline {
    double omega = 0.0;
    Branch branch = Branch::Single;
    bool closed = false;
    std::vector<WaveVector> vertices;
};

// Level set omega(k) = target inside the zone rectangle, extracted on a
// res x res cell grid and refined until |omega(v) - target| < 1e-7 at every
// vertex. Exactly at the band edge the contour degenerates to the edge points
// (single-vertex polylines); above the band the result is empty.
std::vector<ContourPolyline> equifrequency_contour(const LatticeSpec& spec, double target,
                                                   Branch branch = Branch::Single,
                                                   int res = 512);

} // namespace lattice
