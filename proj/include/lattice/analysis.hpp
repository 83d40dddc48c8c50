#pragma once
// Post-processing of time-domain simulation output: per-period amplitude
// envelopes, power-law growth fits, angular beaming detection, self-similar
// front-collapse checks, and the closed-form long-time response of a driven
// chain at its band-edge frequency.

#include <cstddef>
#include <vector>

#include "lattice/core.hpp"
#include "lattice/transient.hpp"

namespace lattice {

// Per-period amplitude envelope of a probe series: the maximum |u| over each
// consecutive full period of the drive, reported at the window-centre time.
// Requires at least 20 samples per period; a shorter series yields fewer (or
// zero) windows, never partial ones.
struct EnvelopeSeries {
    NodeIndex node;
    std::vector<double> times;       // centre of each period window
    std::vector<double> amplitudes;  // max |u| over that window
};

EnvelopeSeries envelope(const ProbeRecord& probe, double omega0);

// Least-squares power-law fit  amplitude ~ t^exponent  over a time range.
struct GrowthFit {
    NodeIndex node;
    double t_begin = 0.0;
    double t_end = 0.0;
    double exponent = 0.0;
    double r_squared = 0.0;
};

// Fits log(amplitude) against log(t) over envelope windows whose centres lie
// in [t_begin, t_end]. Requires at least ten windows in range and strictly
// positive amplitudes throughout.
GrowthFit growth_exponent(const EnvelopeSeries& series, double t_begin, double t_end);

// Angular structure of a snapshot envelope: which nodes exceed a fraction of
// the source amplitude, and along which directions the excess concentrates.
//
// Ray detection: masked nodes farther than 10 from `origin` are binned by
// angle into 360 one-degree sectors. A sector counts as beam-bearing only if
// BOTH of two scores exceed twice their median over all sectors: its REACH
// (farthest masked distance — beams stay masked far beyond the isotropic
// near field, while a merely elongated response varies too smoothly to clear
// the bar) and its FAR MEAN envelope (mean over nodes beyond one third of
// the overall farthest masked distance — rejecting sectors whose reach comes
// from mild in-band focusing rather than a beam). The reach must also exceed
// twice the inner radius outright: when a compact spot's fringe barely pokes
// past the inner radius, most sectors are empty, both medians collapse to
// zero, and the relative bars alone would bless every occupied sector. Beam-bearing sectors are
// grouped into arcs, tolerating interior gaps of up to 8 quiet sectors
// (a beam's angular footprint thins with radius, so its fringes may dip
// below significance without splitting the beam); if no gap wider than that
// exists, the excess rings the whole circle and no rays are reported. Each
// arc reports its envelope-weighted mean direction; arcs carrying less than
// 5% of the strongest arc's summed envelope are discarded as noise. A flat
// (isotropic) histogram yields no rays.
struct BeamingMap {
    double t = 0.0;
    double threshold = 0.0;
    int m_lo = 0, m_hi = 0, n_lo = 0, n_hi = 0;
    int nsub = 1;
    // Row-major [sub][m][n] without halo.
    std::vector<unsigned char> mask;
    std::vector<double> ray_angles;   // radians in (-pi, pi], ascending
    std::vector<double> ray_weights;  // envelope weight captured by each ray

    std::size_t rows() const { return static_cast<std::size_t>(m_hi - m_lo + 1); }
    std::size_t cols() const { return static_cast<std::size_t>(n_hi - n_lo + 1); }
    bool above(NodeIndex node) const;
    std::size_t count_above() const;
};

BeamingMap beaming_map(const LatticeSpec& spec, const Snapshot& snap,
                       double threshold = 0.1, double source_amplitude = 1.0,
                       Vec2 origin = {});

// Closed-form long-time response of the chain driven at its band-edge
// frequency 2 by a unit-amplitude force at the origin:
//   u_m(t) ~ sqrt(t) [ F2(L) sin(2t - pi m) - F1(L) cos(2t - pi m) ],
// where L = 2|m|/sqrt(t) is the self-similar front coordinate.
double asymptotic_1d(int m, double t);

// sqrt(t) * hypot(F1, F2): the envelope of the asymptotic response.
double asymptotic_amplitude_1d(int m, double t);

// The two front-profile functions of the similarity variable L >= 0.
double front_profile_f1(double lambda);
double front_profile_f2(double lambda);

// Fresnel integrals C(x) = int_0^x cos(pi s^2/2) ds and S likewise.
double fresnel_c(double x);
double fresnel_s(double x);

// Self-similar collapse error of chain front envelopes. Each snapshot's
// envelope |u_m| is resampled onto a fixed grid of the similarity variable
// L = 2|m|/sqrt(t) over [0, 4], scaled by 1/sqrt(t), and L2-normalised; the
// result is the maximum pairwise L2 distance between the resampled profiles
// (0 for perfectly collapsing fronts). Chain snapshots only; requires at
// least two snapshots with envelopes covering the sampled range.
double front_scaling(const LatticeSpec& spec, const std::vector<Snapshot>& snaps);

// Per-period envelope ratio between two probes on opposite sublattices of the
// honeycomb lattice. Windows where the denominator envelope vanishes are
// dropped (nothing has arrived yet).
struct RatioSeries {
    NodeIndex node_u;
    NodeIndex node_v;
    std::vector<double> times;
    std::vector<double> ratios;
};

RatioSeries sublattice_ratio(const LatticeSpec& spec, const ProbeRecord& u_probe,
                             const ProbeRecord& v_probe, double omega0);

}  // namespace lattice
