#pragma once
#include <utility>
#include <vector>

#include "lattice/core.hpp"

namespace lattice {

// A monochromatic point source switched on at t = 0 (zero for t < 0).
//
//   Kinematic  the source node's displacement is prescribed exactly as
//              amplitude * sin(omega0 * t); the node is excluded from the
//              integration (its equation of motion is replaced)
//   Force      amplitude * sin(omega0 * t) / mass is added to the node's
//              acceleration; the node otherwise moves freely
enum class SourceKind { Kinematic, Force };

struct SourceSpec {
    SourceKind kind = SourceKind::Kinematic;
    double omega0 = 1.0;              // driving frequency, must be positive
    double amplitude = 1.0;
    NodeIndex node{0, 0, Sub::U};     // origin of the u sublattice by default
};

// Index window the simulation runs on. Boundary nodes outside it are clamped
// at zero. `automatic` sizes the window so the fastest wavefront cannot reach
// the boundary: radius = (max group speed) * t_end + 10 bonds, centred on the
// source, converted to index ranges per family geometry.
struct WindowSpec {
    bool automatic = true;
    int m_lo = 0, m_hi = 0, n_lo = 0, n_hi = 0;  // used when !automatic
};

struct SimConfig {
    double dt = 0.01;       // must be positive and <= 0.01
    double t_end = 0.0;     // must be positive
    WindowSpec window;
    std::vector<NodeIndex> probes;       // nodes whose full time series is kept
    std::vector<double> snapshot_times;  // each in [0, t_end], snapped to steps
    bool allow_small_window = false;     // override the too-small-window refusal
    int threads = 1;                     // worker count; output is identical for any value
    int energy_stride = 0;               // sample total energy every N steps (0 = off)
};

// Time series of one node, sampled every step on a uniform grid.
struct ProbeRecord {
    NodeIndex node;
    std::vector<double> times;
    std::vector<double> displacements;
};

// Field copy at one instant. Velocities are centred differences, second-order
// in dt. env_u/env_v hold the per-node running max of |displacement| over the
// trailing source period [t - 2*pi/omega0, t] in the field's halo layout --
// the oscillation envelope used by the beaming analysis.
struct Snapshot {
    double t = 0.0;
    FieldState field;
    std::vector<double> env_u, env_v;
};

struct SimResult {
    std::vector<ProbeRecord> probes;
    std::vector<Snapshot> snapshots;
    std::vector<std::pair<double, double>> energy;  // (t, total) when sampled
    WindowSpec window_used;                         // actual index bounds of the run
    double cg_max = 0.0;                            // group-speed bound used for sizing
};

// Largest |group velocity| over a res x res sweep of the zone (all branches).
double max_group_speed(const LatticeSpec& spec, int res = 128);

// Explicit second-order integration of the windowed lattice from zero initial
// conditions. Returns every probe series, the requested snapshots and any
// energy samples. The run is deterministic: repeated calls and different
// thread counts produce bit-identical results.
//
// Throws domain_error if a user-supplied window is too small for the
// wavefront at t_end (unless allow_small_window), if a probe or the source
// falls outside the window, or on invalid dt / t_end / snapshot times.
SimResult simulate(const LatticeSpec& spec, const SourceSpec& source, const SimConfig& config);

// One velocity-Verlet step in place (displacements and velocities), applying
// the source at the state's current time; advances state.t by dt. Source-free
// integration (amplitude 0) conserves the window energy to high accuracy.
FieldState& step(const LatticeSpec& spec, FieldState& state, const SourceSpec& source, double dt);

}  // namespace lattice
